"""Deterministic counter-based random substreams.

Every draw consumed by a simulation is a pure function of
``(seed, time step, agent index, purpose)``.  This makes runs
reproducible bit-for-bit, lets the per-agent and the vectorized rule
paths consume identical randomness, and keeps results independent of
evaluation order or parallel scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RandomStream",
    "AgentRng",
    "ConstantStream",
    "DEFAULT_SEED",
    "MOVE",
    "SPAWN",
    "DIE",
    "COMMIT",
    "DIVIDE",
    "INIT_X",
    "INIT_Y",
    "PROBE_X",
    "PROBE_Y",
    "PROBE_INDEX_BASE",
]

# Documented default: omitting --seed must still be reproducible.
DEFAULT_SEED = 1729

# Draw purposes.  One (seed, t, index) substream carries several
# independent channels; keying by purpose instead of a sequential
# counter means an unused draw never shifts the ones that follow.
MOVE = 1      # movement direction of a surviving agent
SPAWN = 2     # displacement direction of a newborn
DIE = 3       # death event
COMMIT = 4    # fate-commitment event
DIVIDE = 5    # division event
INIT_X = 6    # initial placement, x coordinate
INIT_Y = 7    # initial placement, y coordinate
PROBE_X = 8   # region-probe placement, x coordinate
PROBE_Y = 9   # region-probe placement, y coordinate

# Probe agents must never share an index with a population member.
PROBE_INDEX_BASE = 1 << 40

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U53 = 1.0 / (1 << 53)


def mix64(values: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer over a uint64 array (bijective)."""
    h = np.asarray(values, dtype=np.uint64) + np.uint64(_GAMMA)
    h ^= h >> np.uint64(30)
    h *= np.uint64(_MIX1)
    h ^= h >> np.uint64(27)
    h *= np.uint64(_MIX2)
    h ^= h >> np.uint64(31)
    return h


def mix64_int(value: int) -> int:
    """Scalar twin of :func:`mix64`; must agree with it exactly."""
    h = (value + _GAMMA) & _MASK64
    h ^= h >> 30
    h = (h * _MIX1) & _MASK64
    h ^= h >> 27
    h = (h * _MIX2) & _MASK64
    h ^= h >> 31
    return h


def _digest(seed: int, t: int, indices: np.ndarray, purpose: int) -> np.ndarray:
    """Hash (seed, t, index, purpose) tuples to uint64, mixing between fields."""
    h = mix64_int(seed & _MASK64)
    h = mix64_int(h ^ (t + 1))
    out = mix64(np.asarray(indices, dtype=np.uint64) ^ np.uint64(h))
    return mix64(out ^ np.uint64(purpose))


def _to_unit(h: np.ndarray) -> np.ndarray:
    """Map uint64 hashes to float64 in [0, 1)."""
    return (h >> np.uint64(11)).astype(np.float64) * _U53


@dataclass(frozen=True)
class AgentRng:
    """Per-agent view of a stream: draws for one rule evaluation."""

    seed: int
    t: int
    index: int

    def uniform(self, purpose: int) -> float:
        h = _digest(self.seed, self.t, np.array([self.index], dtype=np.uint64), purpose)
        return float(_to_unit(h)[0])

    def angle(self, purpose: int) -> float:
        """Uniform direction in [0, 2*pi)."""
        return 2.0 * np.pi * self.uniform(purpose)


@dataclass(frozen=True)
class RandomStream:
    """Master stream for one simulation, identified by a 64-bit seed."""

    seed: int = DEFAULT_SEED

    def uniforms(self, t: int, indices: np.ndarray, purpose: int) -> np.ndarray:
        """Vectorized draws in [0, 1), one per index."""
        return _to_unit(_digest(self.seed, t, indices, purpose))

    def uniform(self, t: int, index: int, purpose: int) -> float:
        return float(self.uniforms(t, np.array([index], dtype=np.uint64), purpose)[0])

    def agent(self, t: int, index: int) -> AgentRng:
        return AgentRng(self.seed, t, index)

    def split(self, key: int) -> "RandomStream":
        """Derive an independent child stream (e.g. one per replicate)."""
        child = mix64_int(mix64_int(self.seed & _MASK64) ^ (key + 1))
        return RandomStream(child)


class _ConstantAgentRng:
    def __init__(self, value: float):
        self.value = value

    def uniform(self, purpose: int) -> float:
        return self.value

    def angle(self, purpose: int) -> float:
        return 2.0 * np.pi * self.value


class ConstantStream:
    """Stream stub returning one fixed value for every draw.

    Used to disable rule randomness: with value 0 every movement angle
    is 0, so displacements become exactly (+1, 0).
    """

    def __init__(self, value: float = 0.0, seed: int = 0):
        if not 0.0 <= value < 1.0:
            raise ValueError("stub value must lie in [0, 1)")
        self.value = value
        self.seed = seed

    def uniforms(self, t: int, indices: np.ndarray, purpose: int) -> np.ndarray:
        return np.full(np.asarray(indices).shape, self.value, dtype=np.float64)

    def uniform(self, t: int, index: int, purpose: int) -> float:
        return self.value

    def agent(self, t: int, index: int) -> _ConstantAgentRng:
        return _ConstantAgentRng(self.value)

    def split(self, key: int) -> "ConstantStream":
        return self
