"""Estimator accuracy across environment sizes at a fixed density.

Holds the initial density at 2 agents per unit square while the square
environment grows from 10x10 to 30x30.  The mean-field neighbor law
depends only on n/w^2, so the three error profiles land almost on top
of each other: accuracy is governed by density, not by absolute size.

Usage: python3 environment_size_study.py [replicates]
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
horizon = 12
widths = (10, 20, 30)

fig, (ax_counts, ax_err) = plt.subplots(1, 2, figsize=(12, 5))
for w in widths:
    params = g.GolParams(w, 2, 8, 2, 4)
    model = g.build_gol_model(params)
    n0 = 2 * w * w

    def init(m, stream, n0=n0):
        return g.uniform_random_init(n0, m, stream)

    traj = run_ensemble(model, init, EnsembleConfig(replicates=replicates, horizon=horizon, master_seed=1729))
    sim = traj.mean[:, ALIVE]
    est = trajectory_array(
        grr_trajectory(ExpectedCounts(values=np.array([0.0, float(n0)]), time=0),
                       gol_closed_form_stepper(params), horizon)
    )[:, 1]
    err = np.abs(est - sim) / np.maximum(sim, 1.0)
    ax_counts.plot(traj.times, sim / n0, label=f"w={w} simulated")
    ax_counts.plot(traj.times, est / n0, linestyle="--", label=f"w={w} estimate")
    ax_err.plot(traj.times, err, marker="o", label=f"w={w}")

ax_counts.set_xlabel("step")
ax_counts.set_ylabel("living agents / n0")
ax_counts.set_title("normalized trajectories, density 2 per square")
ax_counts.legend(fontsize=8)
ax_err.set_xlabel("step")
ax_err.set_ylabel("relative error of the estimate")
ax_err.set_title("error profiles nearly coincide across w")
ax_err.legend(fontsize=8)
fig.tight_layout()
target = OUT / "environment_size_study.png"
fig.savefig(target, dpi=120)
print(f"wrote {target}")
