"""Rib-development model: fate commitment under a Hedgehog gradient.

Undetermined cells wander a rectangular tissue, die, divide, or commit
to a proximal or distal fate depending on whether the local Hh
concentration clears a threshold; committed cells are stationary and
keep dividing and dying at their own rates.  Four genotype presets
(normal, Apaf1 KO, Shh KO, double KO) rewire death rates and the
gradient amplitude.
"""

from __future__ import annotations

import configparser
import enum
import functools
import math
from dataclasses import dataclass, fields, replace
from importlib import resources
from typing import Optional

import numpy as np

from .core import (
    Agent,
    Environment,
    ModelDefinition,
    Population,
    StateId,
    unit_step,
    uniform_population,
)
from .rng import (
    COMMIT,
    DIE,
    DIVIDE,
    MOVE,
    PROBE_INDEX_BASE,
    PROBE_X,
    PROBE_Y,
    SPAWN,
    AgentRng,
    RandomStream,
)

__all__ = [
    "UNDETERMINED",
    "PROXIMAL",
    "DISTAL",
    "DEAD",
    "RibParams",
    "Genotype",
    "default_rib_params",
    "rib_params",
    "hh_concentration",
    "proximal_area_fraction",
    "build_rib_model",
    "uniform_rib_init",
]

UNDETERMINED = 0
PROXIMAL = 1
DISTAL = 2
DEAD = 3

_TWO_PI = 2.0 * np.pi

RIB_STATES = (
    StateId(UNDETERMINED, "undetermined"),
    StateId(PROXIMAL, "proximal"),
    StateId(DISTAL, "distal"),
    StateId(DEAD, "dead"),
)


@dataclass(frozen=True)
class RibParams:
    """Geometry, gradient, and per-step event rates.

    `shh_log_intensity` is the log10 multiplier on the gradient
    amplitude; -inf is the knocked-out gradient (amplitude 0).
    """

    width: int
    height: int
    shh_log_intensity: float
    decay_length: float
    commit_threshold: float
    commit_rate: float
    div_undet: float
    die_undet: float
    div_comm: float
    die_comm: float

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be positive integers")
        if math.isnan(self.shh_log_intensity):
            raise ValueError("shh_log_intensity must not be NaN")
        if not self.decay_length > 0:
            raise ValueError("decay_length must be positive")
        if not self.commit_threshold > 0:
            raise ValueError("commit_threshold must be positive")
        for name in ("commit_rate", "div_undet", "die_undet", "div_comm", "die_comm"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability in [0, 1]")


class Genotype(enum.Enum):
    NORMAL = "normal"
    APAF1_KO = "apaf1ko"
    SHH_KO = "shhko"
    APAF1_SHH_DKO = "dko"


@functools.lru_cache(maxsize=1)
def default_rib_params() -> RibParams:
    """Baseline constants, read from the packaged config file."""
    text = resources.files("grrsim").joinpath("data/defaults.cfg").read_text()
    cp = configparser.ConfigParser()
    cp.read_string(text)
    sec = cp["rib"]
    return RibParams(
        width=sec.getint("width"),
        height=sec.getint("height"),
        shh_log_intensity=sec.getfloat("shh_log_intensity"),
        decay_length=sec.getfloat("decay_length"),
        commit_threshold=sec.getfloat("commit_threshold"),
        commit_rate=sec.getfloat("commit_rate"),
        div_undet=sec.getfloat("div_undet"),
        die_undet=sec.getfloat("die_undet"),
        div_comm=sec.getfloat("div_comm"),
        die_comm=sec.getfloat("die_comm"),
    )


def rib_params(genotype: Genotype = Genotype.NORMAL, **overrides) -> RibParams:
    """Baseline constants, genotype adjustments, then explicit overrides.

    Overrides are applied last and win even against the genotype's own
    fields; passing one that contradicts the genotype is the caller's
    explicit choice.
    """
    params = default_rib_params()
    if genotype in (Genotype.APAF1_KO, Genotype.APAF1_SHH_DKO):
        params = replace(params, die_undet=0.0, die_comm=0.0)
    if genotype in (Genotype.SHH_KO, Genotype.APAF1_SHH_DKO):
        params = replace(params, shh_log_intensity=float("-inf"))
    if overrides:
        known = {f.name for f in fields(RibParams)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown rib parameter(s): {sorted(unknown)}")
        params = replace(params, **overrides)
    return params


def hh_concentration(x, params: RibParams):
    """Hh concentration s*exp(-x/decay_length) at distance x from the proximal edge.

    Accepts a scalar or an array; the amplitude is s = 10**shh_log_intensity.
    """
    s = 10.0 ** params.shh_log_intensity
    arr = np.asarray(x, dtype=np.float64)
    out = s * np.exp(-arr / params.decay_length)
    return float(out) if arr.ndim == 0 else out


def proximal_area_fraction(params: RibParams) -> float:
    """Fraction of the tissue where the gradient clears the commit threshold."""
    s = 10.0 ** params.shh_log_intensity
    if s <= 0.0:
        return 0.0
    frontier = params.decay_length * math.log(s / params.commit_threshold)
    return min(max(frontier / params.width, 0.0), 1.0)


def _rib_transition(agent: Agent, population: Population, rng: AgentRng, params: RibParams, env: Environment) -> Agent:
    if agent.state == UNDETERMINED:
        if rng.uniform(DIE) < params.die_undet:
            return Agent(DEAD, agent.position, agent.neighborhood)
        if rng.uniform(COMMIT) < params.commit_rate:
            proximal = hh_concentration(agent.position.x, params) >= params.commit_threshold
            return Agent(PROXIMAL if proximal else DISTAL, agent.position, agent.neighborhood)
        pos = unit_step(agent.position, rng.angle(MOVE), env)
        return Agent(UNDETERMINED, pos, env.square_of(pos.x, pos.y))
    # Committed cells are stationary; they only risk death.
    if rng.uniform(DIE) < params.die_comm:
        return Agent(DEAD, agent.position, agent.neighborhood)
    return agent


def _rib_production(agent: Agent, population: Population, rng: AgentRng, params: RibParams, env: Environment) -> list:
    # Re-derives this step's death/commit outcomes from the same keyed
    # draws the transition uses, so the two rules never disagree.
    if agent.state == UNDETERMINED:
        if rng.uniform(DIE) < params.die_undet:
            return []
        if rng.uniform(COMMIT) < params.commit_rate:
            return []
        if rng.uniform(DIVIDE) < params.div_undet:
            pos = unit_step(agent.position, rng.angle(SPAWN), env)
            return [Agent(UNDETERMINED, pos, env.square_of(pos.x, pos.y))]
        return []
    if rng.uniform(DIE) < params.die_comm:
        return []
    if rng.uniform(DIVIDE) < params.div_comm:
        pos = unit_step(agent.position, rng.angle(SPAWN), env)
        return [Agent(agent.state, pos, env.square_of(pos.x, pos.y))]
    return []


def _displace(xy: np.ndarray, theta: np.ndarray, env: Environment) -> np.ndarray:
    cand = xy + np.column_stack([np.cos(theta), np.sin(theta)])
    inside = (
        (cand[:, 0] >= 0.0)
        & (cand[:, 0] < env.width)
        & (cand[:, 1] >= 0.0)
        & (cand[:, 1] < env.height)
    )
    return np.where(inside[:, None], cand, xy)


def _rib_batch_step(population: Population, model: ModelDefinition, stream: RandomStream, params: RibParams) -> Population:
    env = model.environment
    t = population.time
    n = len(population)
    if n == 0:
        return Population.empty(time=t + 1)

    states = population.states
    undet = states == UNDETERMINED
    committed = (states == PROXIMAL) | (states == DISTAL)
    live = undet | committed

    dies = np.zeros(n, dtype=bool)
    lidx = np.nonzero(live)[0]
    if lidx.size:
        u_die = stream.uniforms(t, lidx.astype(np.uint64), DIE)
        thresh = np.where(undet[lidx], params.die_undet, params.die_comm)
        dies[lidx] = u_die < thresh

    commits = np.zeros(n, dtype=bool)
    cidx = np.nonzero(undet & ~dies)[0]
    if cidx.size:
        u_commit = stream.uniforms(t, cidx.astype(np.uint64), COMMIT)
        commits[cidx] = u_commit < params.commit_rate

    movers = undet & ~dies & ~commits
    new_xy = population.xy.copy()
    midx = np.nonzero(movers)[0]
    if midx.size:
        theta = stream.uniforms(t, midx.astype(np.uint64), MOVE) * _TWO_PI
        new_xy[midx] = _displace(population.xy[midx], theta, env)

    new_states = states.copy()
    new_states[dies] = DEAD
    kidx = np.nonzero(commits)[0]
    if kidx.size:
        c = hh_concentration(population.xy[kidx, 0], params)
        new_states[kidx] = np.where(c >= params.commit_threshold, PROXIMAL, DISTAL).astype(np.int16)

    divides = np.zeros(n, dtype=bool)
    if midx.size:
        u_div = stream.uniforms(t, midx.astype(np.uint64), DIVIDE)
        divides[midx] = u_div < params.div_undet
    scidx = np.nonzero(committed & ~dies)[0]
    if scidx.size:
        u_div = stream.uniforms(t, scidx.astype(np.uint64), DIVIDE)
        divides[scidx] = u_div < params.div_comm

    pidx = np.nonzero(divides)[0]
    if pidx.size:
        theta = stream.uniforms(t, pidx.astype(np.uint64), SPAWN) * _TWO_PI
        birth_xy = _displace(population.xy[pidx], theta, env)
        new_states = np.concatenate([new_states, states[pidx]])
        new_xy = np.concatenate([new_xy, birth_xy])

    return Population(
        states=new_states,
        xy=new_xy,
        squares=np.floor(new_xy).astype(np.int64),
        time=t + 1,
    )


def _rib_batch_probe(population: Population, model: ModelDefinition, stream: RandomStream, samples: int, params: RibParams) -> tuple:
    """Vectorized probe outcomes; rib rules ignore the population itself."""
    env = model.environment
    t = population.time
    num_states = model.num_states
    next_states = np.zeros((num_states, samples), dtype=np.int16)
    offspring = np.zeros((num_states, samples, num_states), dtype=np.int64)
    next_states[DEAD] = DEAD

    for v in (UNDETERMINED, PROXIMAL, DISTAL):
        idx = (PROBE_INDEX_BASE + v * samples + np.arange(samples)).astype(np.uint64)
        u_die = stream.uniforms(t, idx, DIE)
        u_div = stream.uniforms(t, idx, DIVIDE)
        if v == UNDETERMINED:
            px = stream.uniforms(t, idx, PROBE_X) * env.width
            dies = u_die < params.die_undet
            u_commit = stream.uniforms(t, idx, COMMIT)
            commits = ~dies & (u_commit < params.commit_rate)
            fate = np.where(hh_concentration(px, params) >= params.commit_threshold, PROXIMAL, DISTAL)
            next_states[v] = np.where(dies, DEAD, np.where(commits, fate, UNDETERMINED))
            divides = ~dies & ~commits & (u_div < params.div_undet)
            offspring[v, :, UNDETERMINED] = divides.astype(np.int64)
        else:
            dies = u_die < params.die_comm
            next_states[v] = np.where(dies, DEAD, v)
            divides = ~dies & (u_div < params.div_comm)
            offspring[v, :, v] = divides.astype(np.int64)
    return next_states, offspring


def build_rib_model(genotype: Genotype = Genotype.NORMAL, overrides: Optional[dict] = None) -> ModelDefinition:
    """Assemble the four-state tissue model for one genotype preset."""
    params = rib_params(genotype, **(overrides or {}))
    return build_rib_model_from_params(params, name=f"rib({genotype.value})")


def build_rib_model_from_params(params: RibParams, name: str = "rib") -> ModelDefinition:
    env = Environment(params.width, params.height)
    return ModelDefinition(
        name=name,
        states=RIB_STATES,
        environment=env,
        transition=functools.partial(_rib_transition, params=params, env=env),
        production=functools.partial(_rib_production, params=params, env=env),
        death_state=DEAD,
        batch_step=functools.partial(_rib_batch_step, params=params),
        batch_probe=functools.partial(_rib_batch_probe, params=params),
    )


def uniform_rib_init(n0: int, model: ModelDefinition, rng: RandomStream) -> Population:
    """n0 undetermined cells placed i.i.d. uniformly over the tissue at t=0."""
    return uniform_population(model, n0, UNDETERMINED, rng)
