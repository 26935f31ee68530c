"""Game-of-Life-like models in continuous space.

The family G(w, l_surv, u_surv, l_rep, u_rep): living agents in a w-by-w
environment survive (and take one random unit step) when the number of
other living agents in their unit square falls in the survival band,
die in place otherwise, and emit one living unit-displaced offspring
when that count falls in the reproduction band.  Dead agents are inert.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .core import (
    Agent,
    Environment,
    ModelDefinition,
    Neighborhood,
    Population,
    Position,
    StateId,
    unit_step,
    uniform_population,
)
from .rng import MOVE, PROBE_X, PROBE_Y, PROBE_INDEX_BASE, SPAWN, AgentRng, RandomStream

__all__ = [
    "DEAD",
    "ALIVE",
    "GolParams",
    "build_gol_model",
    "living_neighbors",
    "uniform_random_init",
]

DEAD = 0
ALIVE = 1

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GolParams:
    """Parameters of one family member; A_G is GolParams(20, 2, 8, 2, 4)."""

    w: int
    l_surv: int
    u_surv: int
    l_rep: int
    u_rep: int

    def __post_init__(self):
        if self.w < 1:
            raise ValueError("environment width w must be a positive integer")
        for name in ("l_surv", "u_surv", "l_rep", "u_rep"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.l_surv > self.u_surv:
            raise ValueError("survival band requires l_surv <= u_surv")
        if self.l_rep > self.u_rep:
            raise ValueError("reproduction band requires l_rep <= u_rep")


def living_neighbors(agent: Agent, population: Population) -> int:
    """Living agents other than `agent` inside `agent`'s unit square.

    Multiset semantics: when the population holds a copy of the exact
    triple, one copy (the agent itself) is excluded from its own count;
    a hypothetical agent not in the population excludes nothing.
    """
    in_square = (population.squares[:, 0] == agent.neighborhood.i) & (
        population.squares[:, 1] == agent.neighborhood.j
    )
    count = int(np.sum(in_square & (population.states == ALIVE)))
    if agent.state == ALIVE and population.contains(agent):
        count -= 1
    return count


def _gol_transition(agent: Agent, population: Population, rng: AgentRng, params: GolParams, env: Environment) -> Agent:
    count = living_neighbors(agent, population)
    if params.l_surv <= count <= params.u_surv:
        pos = unit_step(agent.position, rng.angle(MOVE), env)
        return Agent(ALIVE, pos, env.square_of(pos.x, pos.y))
    return Agent(DEAD, agent.position, agent.neighborhood)


def _gol_production(agent: Agent, population: Population, rng: AgentRng, params: GolParams, env: Environment) -> list:
    count = living_neighbors(agent, population)
    if params.l_rep <= count <= params.u_rep:
        # Offspring displaces from the parent's time-t position with its
        # own angle; the parent's move is a separate draw.
        pos = unit_step(agent.position, rng.angle(SPAWN), env)
        return [Agent(ALIVE, pos, env.square_of(pos.x, pos.y))]
    return []


def _flat_square_index(squares: np.ndarray, env: Environment) -> np.ndarray:
    return squares[:, 0] * env.height + squares[:, 1]


def _neighbor_counts(population: Population, env: Environment) -> np.ndarray:
    """Per-row living-neighbor counts (own copy excluded for living rows)."""
    alive = population.states == ALIVE
    flat = _flat_square_index(population.squares, env)
    occupancy = np.bincount(flat[alive], minlength=env.width * env.height)
    return occupancy[flat] - alive.astype(np.int64)


def _displace(xy: np.ndarray, theta: np.ndarray, env: Environment) -> np.ndarray:
    """Unit steps from `xy`, keeping rows that would exit the environment."""
    cand = xy + np.column_stack([np.cos(theta), np.sin(theta)])
    inside = (
        (cand[:, 0] >= 0.0)
        & (cand[:, 0] < env.width)
        & (cand[:, 1] >= 0.0)
        & (cand[:, 1] < env.height)
    )
    return np.where(inside[:, None], cand, xy)


def _gol_batch_step(population: Population, model: ModelDefinition, stream: RandomStream, params: GolParams) -> Population:
    env = model.environment
    t = population.time
    n = len(population)
    if n == 0:
        return Population.empty(time=t + 1)

    counts = _neighbor_counts(population, env)
    alive = population.states == ALIVE
    survives = alive & (counts >= params.l_surv) & (counts <= params.u_surv)
    reproduces = alive & (counts >= params.l_rep) & (counts <= params.u_rep)

    new_states = np.where(alive & ~survives, DEAD, population.states).astype(np.int16)
    new_xy = population.xy.copy()
    midx = np.nonzero(survives)[0]
    if midx.size:
        theta = stream.uniforms(t, midx.astype(np.uint64), MOVE) * _TWO_PI
        new_xy[midx] = _displace(population.xy[midx], theta, env)
    new_squares = np.floor(new_xy).astype(np.int64)

    bidx = np.nonzero(reproduces)[0]
    if bidx.size:
        theta = stream.uniforms(t, bidx.astype(np.uint64), SPAWN) * _TWO_PI
        birth_xy = _displace(population.xy[bidx], theta, env)
        new_states = np.concatenate([new_states, np.full(bidx.size, ALIVE, dtype=np.int16)])
        new_xy = np.concatenate([new_xy, birth_xy])
        new_squares = np.concatenate([new_squares, np.floor(birth_xy).astype(np.int64)])

    return Population(states=new_states, xy=new_xy, squares=new_squares, time=t + 1)


def _gol_batch_probe(population: Population, model: ModelDefinition, stream: RandomStream, samples: int, params: GolParams) -> tuple:
    """Vectorized region probing: outcome of hypothetical agents per state.

    Returns (next_states (S, samples), offspring counts (S, samples, S)).
    Probe positions are continuous uniforms, so the self-collision scan
    of `living_neighbors` is skipped: a probe coincides with no member.
    """
    env = model.environment
    t = population.time
    num_states = model.num_states
    next_states = np.zeros((num_states, samples), dtype=np.int16)
    offspring = np.zeros((num_states, samples, num_states), dtype=np.int64)

    alive = population.states == ALIVE
    flat = _flat_square_index(population.squares, env)
    occupancy = np.bincount(flat[alive], minlength=env.width * env.height)

    for v in range(num_states):
        if model.is_dead(v):
            next_states[v] = v
            continue
        idx = (PROBE_INDEX_BASE + v * samples + np.arange(samples)).astype(np.uint64)
        px = stream.uniforms(t, idx, PROBE_X) * env.width
        py = stream.uniforms(t, idx, PROBE_Y) * env.height
        pflat = np.floor(px).astype(np.int64) * env.height + np.floor(py).astype(np.int64)
        counts = occupancy[pflat]
        survives = (counts >= params.l_surv) & (counts <= params.u_surv)
        next_states[v] = np.where(survives, ALIVE, DEAD)
        reproduces = (counts >= params.l_rep) & (counts <= params.u_rep)
        offspring[v, :, ALIVE] = reproduces.astype(np.int64)
    return next_states, offspring


def build_gol_model(params: GolParams) -> ModelDefinition:
    """Assemble the two-state model for one parameter tuple."""
    env = Environment(params.w, params.w)
    return ModelDefinition(
        name=f"gol({params.w},{params.l_surv},{params.u_surv},{params.l_rep},{params.u_rep})",
        states=(StateId(DEAD, "dead"), StateId(ALIVE, "alive")),
        environment=env,
        transition=functools.partial(_gol_transition, params=params, env=env),
        production=functools.partial(_gol_production, params=params, env=env),
        death_state=DEAD,
        batch_step=functools.partial(_gol_batch_step, params=params),
        batch_probe=functools.partial(_gol_batch_probe, params=params),
    )


def uniform_random_init(n0: int, model: ModelDefinition, rng: RandomStream) -> Population:
    """n0 living agents placed i.i.d. uniformly over the environment at t=0."""
    return uniform_population(model, n0, ALIVE, rng)
