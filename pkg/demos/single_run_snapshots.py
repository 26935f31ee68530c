"""Scatter snapshots of one simulation of the 20x20 birth/death model.

Runs a single seeded simulation from 500 uniformly placed living agents
and draws the population at eight consecutive steps.  Survivors drift
one unit per step while clusters seed new agents next door, so the
initial uniform scatter coarsens into clumps within a few steps.

Usage: python3 single_run_snapshots.py [seed]
"""

import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import grrsim as g
from grrsim.core import run_simulation
from grrsim.gol import ALIVE
from grrsim.rng import RandomStream

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1729
model = g.build_gol_model(g.GolParams(20, 2, 8, 2, 4))
stream = RandomStream(seed)
init = g.uniform_random_init(500, model, stream)

fig, axes = plt.subplots(2, 4, figsize=(14, 7), sharex=True, sharey=True)
for t, population in enumerate(run_simulation(init, model, stream, horizon=7)):
    ax = axes.flat[t]
    living = population.states == ALIVE
    ax.scatter(population.xy[living, 0], population.xy[living, 1], s=6, c="tab:green")
    ax.set_title(f"t = {t} ({int(living.sum())} alive)")
    ax.set_xlim(0, 20)
    ax.set_ylim(0, 20)
    ax.set_aspect("equal")

fig.suptitle(f"one simulation, seed {seed}")
fig.tight_layout()
target = OUT / "single_run_snapshots.png"
fig.savefig(target, dpi=120)
print(f"wrote {target}")
