"""Population-level recurrence estimators.

The expected next count of each state is a linear function of the
current expected counts, with coefficients given by the probability
that a uniformly placed agent of state V transitions to U or produces a
U offspring.  Those region probabilities can be estimated empirically
by probing a concrete population with hypothetical agents, or written
in closed form for the models here under a
uniformly-mixed-positions assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

import numpy as np
from scipy.special import logsumexp

from .core import (
    Agent,
    ModelDefinition,
    Population,
    Position,
    count_by_state,
    probe_production,
    probe_transition,
    step,
)
from .gol import GolParams
from .rib import RibParams, proximal_area_fraction
from .rng import PROBE_INDEX_BASE, PROBE_X, PROBE_Y, RandomStream

__all__ = [
    "RegionProbabilities",
    "ExpectedCounts",
    "counts_from_population",
    "estimate_region_probabilities",
    "grr_generic_step",
    "binomial_band",
    "poisson_band",
    "gol_band_probabilities",
    "grr_gol_step",
    "grr_rib_step",
    "grr_trajectory",
    "trajectory_array",
    "gol_closed_form_stepper",
    "rib_closed_form_stepper",
    "ProbeStepper",
]


@dataclass(frozen=True)
class RegionProbabilities:
    """Per state pair (V, U): transition and production region measures.

    `transition[V, U]` is the probability that a state-V agent at a
    uniform position becomes state U; `production[V, U]` that it
    produces at least one state-U offspring; `production_multiplicity`
    the mean number of state-U offspring conditioned on producing any.
    """

    transition: np.ndarray
    production: np.ndarray
    production_multiplicity: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=np.float64)
        p = np.asarray(self.production, dtype=np.float64)
        m = np.asarray(self.production_multiplicity, dtype=np.float64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or p.shape != t.shape or m.shape != t.shape:
            raise ValueError("probability matrices must share one square shape")
        if np.any(t < 0) or np.any(t > 1) or np.any(p < 0) or np.any(p > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.any(m < 0):
            raise ValueError("multiplicities must be non-negative")
        if not np.allclose(t.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("each transition row must sum to 1")
        object.__setattr__(self, "transition", t)
        object.__setattr__(self, "production", p)
        object.__setattr__(self, "production_multiplicity", m)

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]


@dataclass(frozen=True)
class ExpectedCounts:
    """Expected number of agents per state at one time step."""

    values: np.ndarray
    time: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("expected counts must be a flat per-state vector")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("expected counts must be finite and non-negative")
        object.__setattr__(self, "values", v)

    @property
    def total(self) -> float:
        return float(self.values.sum())


def counts_from_population(population: Population, model: ModelDefinition) -> ExpectedCounts:
    counts = count_by_state(population, model.num_states)
    return ExpectedCounts(values=counts.astype(np.float64), time=population.time)


def _probe_outcomes_scalar(
    population: Population,
    model: ModelDefinition,
    samples_per_state: int,
    rng: RandomStream,
) -> tuple:
    """Per-agent fallback for models without a vectorized probe path."""
    env = model.environment
    t = population.time
    num_states = model.num_states
    next_states = np.zeros((num_states, samples_per_state), dtype=np.int64)
    offspring = np.zeros((num_states, samples_per_state, num_states), dtype=np.int64)
    for v in range(num_states):
        if model.is_dead(v):
            next_states[v] = v
            continue
        for k in range(samples_per_state):
            index = PROBE_INDEX_BASE + v * samples_per_state + k
            arng = rng.agent(t, index)
            x = arng.uniform(PROBE_X) * env.width
            y = arng.uniform(PROBE_Y) * env.height
            probe = Agent(v, Position(x, y), env.square_of(x, y))
            next_states[v, k] = probe_transition(probe, population, model, arng).state
            for child in probe_production(probe, population, model, arng):
                offspring[v, k, child.state] += 1
    return next_states, offspring


def estimate_region_probabilities(
    population: Population,
    model: ModelDefinition,
    samples_per_state: int,
    rng: RandomStream,
) -> RegionProbabilities:
    """Empirical region probabilities from uniformly placed probe agents.

    For each non-dead state V, `samples_per_state` hypothetical agents
    are evaluated against the population snapshot.  The death-state row
    is written exactly (it is absorbing and produces nothing), never
    sampled.
    """
    if samples_per_state < 1:
        raise ValueError("samples_per_state must be at least 1")
    num_states = model.num_states
    if model.batch_probe is not None:
        next_states, offspring = model.batch_probe(population, model, rng, samples_per_state)
    else:
        next_states, offspring = _probe_outcomes_scalar(population, model, samples_per_state, rng)

    transition = np.zeros((num_states, num_states))
    production = np.zeros((num_states, num_states))
    multiplicity = np.zeros((num_states, num_states))
    for v in range(num_states):
        if model.is_dead(v):
            transition[v, v] = 1.0
            continue
        transition[v] = np.bincount(np.asarray(next_states[v], dtype=np.int64), minlength=num_states) / samples_per_state
        produced = offspring[v] > 0
        production[v] = produced.mean(axis=0)
        for u in range(num_states):
            mask = produced[:, u]
            if mask.any():
                multiplicity[v, u] = offspring[v][mask, u].mean()
    return RegionProbabilities(transition, production, multiplicity)


def grr_generic_step(counts: ExpectedCounts, probs: RegionProbabilities) -> ExpectedCounts:
    """One recurrence step: counts' = counts @ (transition + mult*production)."""
    if counts.values.shape[0] != probs.num_states:
        raise ValueError("counts and probabilities disagree on the number of states")
    gain = probs.transition + probs.production_multiplicity * probs.production
    return ExpectedCounts(values=counts.values @ gain, time=counts.time + 1)


def binomial_band(m: int, q: float, lo: int, hi: int) -> float:
    """P(lo <= K <= hi) for K ~ Binomial(m, q), by log-space summation.

    The band is clamped to [0, m]; an empty or out-of-range band gives 0.
    Exact integer binomial coefficients keep the result accurate to
    ~1e-14 even for large m.
    """
    if m < 0:
        raise ValueError("m must be a non-negative integer")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must be a probability")
    lo, hi = max(lo, 0), min(hi, m)
    if lo > hi:
        return 0.0
    if q == 0.0:
        return 1.0 if lo == 0 else 0.0
    if q == 1.0:
        return 1.0 if hi == m else 0.0
    log_q = math.log(q)
    log_1q = math.log1p(-q)
    logs = [math.log(math.comb(m, k)) + k * log_q + (m - k) * log_1q for k in range(lo, hi + 1)]
    return min(float(np.exp(logsumexp(logs))), 1.0)


def poisson_band(lam: float, lo: int, hi: int) -> float:
    """P(lo <= K <= hi) for K ~ Poisson(lam), by log-space summation."""
    if lam < 0:
        raise ValueError("lam must be non-negative")
    lo = max(lo, 0)
    if lo > hi:
        return 0.0
    if lam == 0.0:
        return 1.0 if lo == 0 else 0.0
    log_lam = math.log(lam)
    logs = [k * log_lam - lam - math.lgamma(k + 1) for k in range(lo, hi + 1)]
    return min(float(np.exp(logsumexp(logs))), 1.0)


def gol_band_probabilities(n_t: float, params: GolParams, mode: str = "binomial") -> tuple:
    """(P_surv, P_rep) for a focal agent among n_t uniformly mixed living agents.

    binomial mode: neighbor count K ~ Binomial(max(round(n_t)-1, 0), 1/w^2);
    poisson mode: K ~ Poisson(n_t/w^2), no rounding.
    """
    q = 1.0 / (params.w * params.w)
    if mode == "binomial":
        m = max(int(round(n_t)) - 1, 0)
        return (
            binomial_band(m, q, params.l_surv, params.u_surv),
            binomial_band(m, q, params.l_rep, params.u_rep),
        )
    if mode == "poisson":
        lam = n_t * q
        return (
            poisson_band(lam, params.l_surv, params.u_surv),
            poisson_band(lam, params.l_rep, params.u_rep),
        )
    raise ValueError("mode must be 'binomial' or 'poisson'")


def grr_gol_step(n_t: float, params: GolParams, mode: str = "binomial") -> float:
    """Mean-field expected living count after one step: n*(P_surv + P_rep)."""
    if n_t < 0:
        raise ValueError("n_t must be non-negative")
    if n_t == 0.0:
        return 0.0
    p_surv, p_rep = gol_band_probabilities(n_t, params, mode)
    return n_t * (p_surv + p_rep)


def grr_rib_step(counts: ExpectedCounts, params: RibParams) -> ExpectedCounts:
    """Compartmental expected-count recurrence for the rib model.

    Works on (undetermined, proximal, distal) vectors; a 4th entry, when
    present, accumulates the dead so totals are conserved.
    """
    vals = counts.values
    if vals.shape[0] not in (3, 4):
        raise ValueError("rib counts need 3 live states plus optional dead entry")
    y, r, b = float(vals[0]), float(vals[1]), float(vals[2])
    a_prox = proximal_area_fraction(params)
    survive_u = 1.0 - params.die_undet
    flux = y * survive_u * params.commit_rate
    committed_growth = (1.0 - params.die_comm) * (1.0 + params.div_comm)
    out = [
        y * survive_u * (1.0 - params.commit_rate) * (1.0 + params.div_undet),
        r * committed_growth + flux * a_prox,
        b * committed_growth + flux * (1.0 - a_prox),
    ]
    if vals.shape[0] == 4:
        out.append(float(vals[3]) + y * params.die_undet + (r + b) * params.die_comm)
    return ExpectedCounts(values=np.array(out), time=counts.time + 1)


def gol_closed_form_stepper(params: GolParams, mode: str = "binomial") -> Callable[[ExpectedCounts], ExpectedCounts]:
    """Stepper over (dead, alive) vectors; dead absorbs the non-survivors."""

    def step_fn(counts: ExpectedCounts) -> ExpectedCounts:
        if counts.values.shape[0] != 2:
            raise ValueError("gol counts are (dead, alive) vectors")
        dead, alive = float(counts.values[0]), float(counts.values[1])
        p_surv, p_rep = gol_band_probabilities(alive, params, mode) if alive > 0 else (0.0, 0.0)
        return ExpectedCounts(
            values=np.array([dead + alive * (1.0 - p_surv), alive * (p_surv + p_rep)]),
            time=counts.time + 1,
        )

    return step_fn


def rib_closed_form_stepper(params: RibParams) -> Callable[[ExpectedCounts], ExpectedCounts]:
    def step_fn(counts: ExpectedCounts) -> ExpectedCounts:
        return grr_rib_step(counts, params)

    return step_fn


class ProbeStepper:
    """Recurrence stepper that re-estimates probabilities every step.

    Drives one internal simulation: each call probes the current
    population snapshot, advances the expected counts through the
    estimated matrices, then steps the population.
    """

    def __init__(self, model: ModelDefinition, population: Population, stream: RandomStream, samples_per_state: int):
        self.model = model
        self.population = population
        self.stream = stream
        self.samples_per_state = samples_per_state

    def __call__(self, counts: ExpectedCounts) -> ExpectedCounts:
        probs = estimate_region_probabilities(self.population, self.model, self.samples_per_state, self.stream)
        out = grr_generic_step(counts, probs)
        self.population = step(self.population, self.model, self.stream)
        return out


def grr_trajectory(
    initial: ExpectedCounts,
    stepper: Callable[[ExpectedCounts], ExpectedCounts],
    horizon: int,
) -> List[ExpectedCounts]:
    """Iterate a stepper: expected counts for t = initial.time .. +horizon."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    out = [initial]
    current = initial
    for _ in range(horizon):
        current = stepper(current)
        out.append(current)
    return out


def trajectory_array(counts_seq: Iterable[ExpectedCounts]) -> np.ndarray:
    """Stack a counts sequence into a (T, S) array in time order."""
    return np.vstack([c.values for c in counts_seq])
