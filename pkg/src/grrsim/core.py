"""Agents, environments, update rules, and the simulation recurrence.

An agent is a (state, position, neighborhood) triple living in a
rectangular environment partitioned into unit squares.  A model supplies
a local transition rule (what happens to an existing agent) and a local
production rule (which new agents it emits); one synchronous step maps
the population at time t to the population at time t+1, with every rule
evaluation reading the same time-t snapshot.

Populations are stored as parallel numpy arrays for speed; `Agent`
values materialize individual rows for rule evaluation and tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .rng import INIT_X, INIT_Y, AgentRng, RandomStream

__all__ = [
    "StateId",
    "Position",
    "Neighborhood",
    "Agent",
    "Environment",
    "Population",
    "ModelDefinition",
    "StepEvents",
    "transition_rule",
    "production_rule",
    "probe_transition",
    "probe_production",
    "step",
    "generic_step",
    "step_events",
    "count_by_state",
    "uniform_population",
    "run_simulation",
    "unit_step",
]


@dataclass(frozen=True)
class StateId:
    """Entry in a model's state table."""

    id: int
    label: str


class Position(NamedTuple):
    x: float
    y: float


class Neighborhood(NamedTuple):
    """The unit square [i, i+1) x [j, j+1)."""

    i: int
    j: int

    def contains(self, position: Position) -> bool:
        return (self.i <= position.x < self.i + 1) and (self.j <= position.y < self.j + 1)


class Agent(NamedTuple):
    state: int
    position: Position
    neighborhood: Neighborhood


@dataclass(frozen=True)
class Environment:
    """The rectangle [0, width) x [0, height), split into unit squares."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("environment must be at least 1x1")

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x < self.width and 0.0 <= y < self.height

    def square_of(self, x: float, y: float) -> Neighborhood:
        return Neighborhood(int(math.floor(x)), int(math.floor(y)))

    @property
    def area(self) -> float:
        return float(self.width * self.height)


def unit_step(position: Position, theta: float, environment: Environment) -> Position:
    """Displace by (cos(theta), sin(theta)); stay in place if that exits."""
    x = position.x + math.cos(theta)
    y = position.y + math.sin(theta)
    if environment.contains(x, y):
        return Position(x, y)
    return position


@dataclass
class Population:
    """Finite multiset of agents at one time step.

    Multiset semantics: duplicate rows are permitted and row order is the
    stable iteration order.  The row index doubles as the agent's identity
    for randomness keying.
    """

    states: np.ndarray  # (n,) int16, state ids
    xy: np.ndarray      # (n, 2) float64 positions
    squares: np.ndarray  # (n, 2) int64 unit-square indices
    time: int = 0

    @classmethod
    def empty(cls, time: int = 0) -> "Population":
        return cls(
            states=np.zeros(0, dtype=np.int16),
            xy=np.zeros((0, 2), dtype=np.float64),
            squares=np.zeros((0, 2), dtype=np.int64),
            time=time,
        )

    @classmethod
    def from_agents(cls, agents: Sequence[Agent], time: int = 0) -> "Population":
        if not agents:
            return cls.empty(time)
        states = np.array([a.state for a in agents], dtype=np.int16)
        xy = np.array([[a.position.x, a.position.y] for a in agents], dtype=np.float64)
        squares = np.array([[a.neighborhood.i, a.neighborhood.j] for a in agents], dtype=np.int64)
        return cls(states=states, xy=xy, squares=squares, time=time)

    def agent(self, index: int) -> Agent:
        return Agent(
            int(self.states[index]),
            Position(float(self.xy[index, 0]), float(self.xy[index, 1])),
            Neighborhood(int(self.squares[index, 0]), int(self.squares[index, 1])),
        )

    def __len__(self) -> int:
        return int(self.states.shape[0])

    def __iter__(self) -> Iterator[Agent]:
        for i in range(len(self)):
            yield self.agent(i)

    def contains(self, agent: Agent) -> bool:
        """Multiset membership: some row equals the full triple."""
        return bool(
            np.any(
                (self.states == agent.state)
                & (self.xy[:, 0] == agent.position.x)
                & (self.xy[:, 1] == agent.position.y)
                & (self.squares[:, 0] == agent.neighborhood.i)
                & (self.squares[:, 1] == agent.neighborhood.j)
            )
        )

    def check_consistent(self, environment: Environment) -> None:
        """Assert membership in the environment and position-in-square."""
        if len(self) == 0:
            return
        x, y = self.xy[:, 0], self.xy[:, 1]
        if not (np.all(x >= 0) and np.all(x < environment.width) and np.all(y >= 0) and np.all(y < environment.height)):
            raise AssertionError("agent position outside the environment")
        i, j = self.squares[:, 0], self.squares[:, 1]
        if not (np.all(i <= x) and np.all(x < i + 1) and np.all(j <= y) and np.all(y < j + 1)):
            raise AssertionError("agent position outside its neighborhood square")


# A transition rule maps one agent plus the time-t snapshot to its
# time-(t+1) version; a production rule maps them to newborn agents.
# Stored callables implement the live-state case analysis only; the
# death-state and membership conventions are enforced by the wrappers
# below so each model does not restate them.
TransitionFn = Callable[[Agent, Population, AgentRng], Agent]
ProductionFn = Callable[[Agent, Population, AgentRng], list]
BatchStepFn = Callable[[Population, "ModelDefinition", RandomStream], Population]
# Vectorized region probing: (population, model, stream, samples) ->
# (next_state (S,K) int array, offspring (S,K,S) int array).
BatchProbeFn = Callable[[Population, "ModelDefinition", RandomStream, int], tuple]


@dataclass(frozen=True)
class ModelDefinition:
    """A model: states, environment, update rules, optional death state.

    `batch_step` and `batch_probe`, when present, are vectorized
    equivalents of the per-agent rules and must reproduce them draw for
    draw; `step` prefers `batch_step`.
    """

    name: str
    states: tuple
    environment: Environment
    transition: TransitionFn
    production: ProductionFn
    death_state: Optional[int] = None
    batch_step: Optional[BatchStepFn] = None
    batch_probe: Optional[BatchProbeFn] = None

    def __post_init__(self):
        ids = [s.id for s in self.states]
        if ids != list(range(len(ids))):
            raise ValueError("state ids must be 0..S-1 in table order")
        labels = [s.label for s in self.states]
        if len(set(labels)) != len(labels):
            raise ValueError("state labels must be unique")
        if self.death_state is not None and not 0 <= self.death_state < len(ids):
            raise ValueError("death state must be a valid state id")

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def state_labels(self) -> tuple:
        return tuple(s.label for s in self.states)

    def is_dead(self, state: int) -> bool:
        return self.death_state is not None and state == self.death_state


def transition_rule(agent: Agent, population: Population, model: ModelDefinition, rng: AgentRng) -> Agent:
    """Apply the model's transition rule to one agent.

    Total by convention: an agent that is not in the population, or one
    in the death state, is returned unchanged.
    """
    if model.is_dead(agent.state):
        return agent
    if not population.contains(agent):
        return agent
    return model.transition(agent, population, rng)


def production_rule(agent: Agent, population: Population, model: ModelDefinition, rng: AgentRng) -> list:
    """Apply the model's production rule to one agent (empty for dead or absent agents)."""
    if model.is_dead(agent.state):
        return []
    if not population.contains(agent):
        return []
    return model.production(agent, population, rng)


def probe_transition(agent: Agent, population: Population, model: ModelDefinition, rng: AgentRng) -> Agent:
    """Evaluate the transition case analysis on a hypothetical agent.

    Region probing asks what WOULD happen to an agent of a given state
    at a given position, so the membership convention is skipped; the
    death state still acts as identity.
    """
    if model.is_dead(agent.state):
        return agent
    return model.transition(agent, population, rng)


def probe_production(agent: Agent, population: Population, model: ModelDefinition, rng: AgentRng) -> list:
    """Production twin of :func:`probe_transition`."""
    if model.is_dead(agent.state):
        return []
    return model.production(agent, population, rng)


def generic_step(population: Population, model: ModelDefinition, stream: RandomStream) -> Population:
    """One synchronous step via per-agent rule evaluation.

    Reference path: clear, always applicable, O(n) rule calls (each of
    which may scan the population).  `step` uses the model's vectorized
    path instead when one is defined.
    """
    t = population.time
    moved: list = []
    born: list = []
    for i in range(len(population)):
        agent = population.agent(i)
        if model.is_dead(agent.state):
            moved.append(agent)
            continue
        rng = stream.agent(t, i)
        moved.append(model.transition(agent, population, rng))
    for i in range(len(population)):
        agent = population.agent(i)
        if model.is_dead(agent.state):
            continue
        rng = stream.agent(t, i)
        born.extend(model.production(agent, population, rng))
    out = Population.from_agents(moved + born, time=t + 1)
    if len(out) == 0:
        out = Population.empty(time=t + 1)
    return out


def step(
    population: Population,
    model: ModelDefinition,
    stream: RandomStream,
    prune_dead: bool = False,
) -> Population:
    """Advance one time step: transition every agent, then add newborns.

    All rule evaluations read the same time-t snapshot.  With
    `prune_dead`, rows in the (absorbing, inert) death state are dropped
    from the result to bound memory; their counts are then no longer
    reported.
    """
    if model.batch_step is not None:
        out = model.batch_step(population, model, stream)
    else:
        out = generic_step(population, model, stream)
    if prune_dead and model.death_state is not None:
        keep = out.states != model.death_state
        out = Population(states=out.states[keep], xy=out.xy[keep], squares=out.squares[keep], time=out.time)
    return out


class StepEvents(NamedTuple):
    """Per-step tallies derived from the input/output row structure."""

    survivors: int  # live rows that stayed live through the transition
    deaths: int     # live rows that entered the death state
    births: int     # rows appended by the production rule


def step_events(before: Population, after: Population, model: ModelDefinition) -> StepEvents:
    """Tally survivals, deaths, and births for one step.

    Relies on the step structure: the first len(before) output rows are
    the transitioned agents in input order, the rest are newborns.
    """
    n = len(before)
    if len(after) < n:
        raise ValueError("output population cannot be smaller than its input")
    dead = model.death_state
    live_before = before.states != dead if dead is not None else np.ones(n, dtype=bool)
    transitioned = after.states[:n]
    live_after = transitioned != dead if dead is not None else np.ones(n, dtype=bool)
    survivors = int(np.sum(live_before & live_after))
    deaths = int(np.sum(live_before & ~live_after))
    return StepEvents(survivors=survivors, deaths=deaths, births=len(after) - n)


def count_by_state(population: Population, num_states: Optional[int] = None) -> np.ndarray:
    """Counts per state id; index s holds the number of state-s agents."""
    if num_states is None:
        num_states = int(population.states.max()) + 1 if len(population) else 0
    return np.bincount(population.states, minlength=num_states).astype(np.int64)


def uniform_population(model: ModelDefinition, n0: int, state: int, stream: RandomStream) -> Population:
    """n0 agents of one state placed i.i.d. uniformly over the environment."""
    if n0 < 1:
        raise ValueError("n0 must be at least 1")
    if not 0 <= state < model.num_states:
        raise ValueError("unknown state id")
    env = model.environment
    idx = np.arange(n0, dtype=np.uint64)
    x = stream.uniforms(0, idx, INIT_X) * env.width
    y = stream.uniforms(0, idx, INIT_Y) * env.height
    xy = np.column_stack([x, y])
    return Population(
        states=np.full(n0, state, dtype=np.int16),
        xy=xy,
        squares=np.floor(xy).astype(np.int64),
        time=0,
    )


def run_simulation(
    population: Population,
    model: ModelDefinition,
    stream: RandomStream,
    horizon: int,
    prune_dead: bool = False,
) -> Iterator[Population]:
    """Yield the populations at t = population.time .. +horizon."""
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    yield population
    current = population
    for _ in range(horizon):
        current = step(current, model, stream, prune_dead=prune_dead)
        yield current
