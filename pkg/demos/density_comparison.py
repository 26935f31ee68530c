"""Ensemble means against the closed-form recurrence at five densities.

For each initial count the script runs a seeded ensemble of the 20x20
birth/death model and iterates the binomial mean-field recurrence from
the same starting mass, then plots the two curves side by side.  At high
density the recurrence tracks the simulation closely; at the lowest
density the simulated population clusters and recovers while the
uniform-mixing assumption predicts collapse — a real limitation of the
estimator, worth seeing once.

Usage: python3 density_comparison.py [replicates]
"""

import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import grrsim as g
from grrsim.ensemble import EnsembleConfig, run_ensemble
from grrsim.gol import ALIVE
from grrsim.grr import ExpectedCounts, gol_closed_form_stepper, grr_trajectory, trajectory_array

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

replicates = int(sys.argv[1]) if len(sys.argv) > 1 else 30
params = g.GolParams(20, 2, 8, 2, 4)
model = g.build_gol_model(params)
densities = (500, 1125, 1750, 2375, 3000)
horizon = 50

fig, ax = plt.subplots(figsize=(9, 6))
colors = plt.cm.viridis(np.linspace(0.1, 0.9, len(densities)))
for n0, color in zip(densities, colors):
    def init(m, stream, n0=n0):
        return g.uniform_random_init(n0, m, stream)

    traj = run_ensemble(model, init, EnsembleConfig(replicates=replicates, horizon=horizon, master_seed=1729))
    sim = traj.mean[:, ALIVE]
    est = trajectory_array(
        grr_trajectory(ExpectedCounts(values=np.array([0.0, float(n0)]), time=0),
                       gol_closed_form_stepper(params), horizon)
    )[:, 1]
    ax.plot(traj.times, sim, color=color, label=f"n0={n0} simulated")
    ax.plot(traj.times, est, color=color, linestyle="--", label=f"n0={n0} estimate")

ax.set_xlabel("step")
ax.set_ylabel("mean living agents")
ax.set_title(f"simulation ({replicates} replicates) vs recurrence estimate")
ax.legend(fontsize=7, ncol=2)
target = OUT / "density_comparison.png"
fig.tight_layout()
fig.savefig(target, dpi=120)
print(f"wrote {target}")
