"""Agent-based birth/death simulations with population-level recurrence estimators.

Models live on a rectangular environment of unit squares; each step
every agent transitions (move, change state, die) and may produce
offspring, all against the same population snapshot.  Expected per-state
counts can be estimated without ensembles via region probabilities,
either probed empirically or written in closed form for the bundled
Game-of-Life-like and rib-development models.
"""

from .core import (
    Agent,
    Environment,
    ModelDefinition,
    Neighborhood,
    Population,
    Position,
    StateId,
    StepEvents,
    count_by_state,
    generic_step,
    probe_production,
    probe_transition,
    production_rule,
    run_simulation,
    step,
    step_events,
    transition_rule,
    uniform_population,
    unit_step,
)
from .ensemble import EnsembleConfig, Trajectory, replicate_counts, run_ensemble
from .gol import GolParams, build_gol_model, living_neighbors, uniform_random_init
from .grr import (
    ExpectedCounts,
    ProbeStepper,
    RegionProbabilities,
    binomial_band,
    counts_from_population,
    estimate_region_probabilities,
    gol_band_probabilities,
    gol_closed_form_stepper,
    grr_generic_step,
    grr_gol_step,
    grr_rib_step,
    grr_trajectory,
    poisson_band,
    rib_closed_form_stepper,
    trajectory_array,
)
from .rib import (
    Genotype,
    RibParams,
    build_rib_model,
    build_rib_model_from_params,
    default_rib_params,
    hh_concentration,
    proximal_area_fraction,
    rib_params,
    uniform_rib_init,
)
from .rng import DEFAULT_SEED, AgentRng, ConstantStream, RandomStream

__version__ = "0.1.0"
