"""Seeded Monte Carlo replicate runner.

Each replicate is an independent simulation advanced from a child seed
derived from the master seed and the replicate index, so the resulting
mean/std trajectories depend only on (model, initializer, config) and
never on scheduling or worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from typing import Callable, Optional

import numpy as np

from .core import ModelDefinition, Population, count_by_state, step
from .rng import DEFAULT_SEED, RandomStream

__all__ = ["EnsembleConfig", "Trajectory", "replicate_counts", "run_ensemble"]

Initializer = Callable[[ModelDefinition, RandomStream], Population]


@dataclass(frozen=True)
class EnsembleConfig:
    replicates: int
    horizon: int
    master_seed: int = DEFAULT_SEED
    workers: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class Trajectory:
    """Per-step, per-state count statistics across replicates.

    `std` is the sample (ddof=1) standard deviation, identically zero
    when there is a single replicate.  `grr` optionally carries an
    estimator trajectory aligned on the same (time, state) grid.
    """

    times: np.ndarray
    state_labels: tuple
    mean: np.ndarray
    std: np.ndarray
    replicates: int
    grr: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.mean.shape != self.std.shape or self.mean.shape[0] != self.times.shape[0]:
            raise ValueError("mean/std/times shapes disagree")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.mean < 0) or np.any(self.std < 0):
            raise ValueError("means and standard deviations must be non-negative")


def replicate_counts(model: ModelDefinition, init: Initializer, horizon: int, seed: int) -> np.ndarray:
    """One replicate's (horizon+1, num_states) per-step state counts."""
    stream = RandomStream(seed)
    population = init(model, stream)
    num_states = model.num_states
    out = np.zeros((horizon + 1, num_states), dtype=np.int64)
    out[0] = count_by_state(population, num_states)
    for t in range(horizon):
        population = step(population, model, stream)
        out[t + 1] = count_by_state(population, num_states)
    return out


def run_ensemble(model: ModelDefinition, init: Initializer, config: EnsembleConfig) -> Trajectory:
    """Mean/std count trajectories over seeded replicates.

    Replicate r runs from child seed split(master_seed, r); aggregation
    happens on the index-ordered stack, so results are bit-identical
    for any worker count.
    """
    master = RandomStream(config.master_seed)
    seeds = [master.split(r).seed for r in range(config.replicates)]
    if config.workers == 1 or config.replicates == 1:
        counts = [replicate_counts(model, init, config.horizon, s) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=min(config.workers, config.replicates)) as pool:
            counts = list(
                pool.map(replicate_counts, repeat(model), repeat(init), repeat(config.horizon), seeds)
            )
    stack = np.stack(counts).astype(np.float64)
    mean = stack.mean(axis=0)
    std = stack.std(axis=0, ddof=1) if config.replicates > 1 else np.zeros_like(mean)
    return Trajectory(
        times=np.arange(config.horizon + 1, dtype=np.int64),
        state_labels=model.state_labels,
        mean=mean,
        std=std,
        replicates=config.replicates,
    )
