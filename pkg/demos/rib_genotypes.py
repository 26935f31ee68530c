"""Cell-type trajectories for the four rib genotypes.

Runs a seeded ensemble per genotype from 1000 undetermined cells and
overlays the compartmental recurrence (dashed).  The knockouts read off
directly: no gradient means no proximal cells, and no cell death means
the largest total population.

Usage: python3 rib_genotypes.py [replicates]
"""

import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import grrsim as g
from grrsim.ensemble import EnsembleConfig, run_ensemble
from grrsim.grr import ExpectedCounts, grr_trajectory, rib_closed_form_stepper, trajectory_array
from grrsim.rib import DISTAL, PROXIMAL, UNDETERMINED, Genotype, rib_params, uniform_rib_init

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

replicates = int(sys.argv[1]) if len(sys.argv) > 1 else 30
horizon = 100
styles = ((UNDETERMINED, "undetermined", "tab:olive"),
          (PROXIMAL, "proximal", "tab:red"),
          (DISTAL, "distal", "tab:blue"))

fig, axes = plt.subplots(2, 2, figsize=(12, 8), sharex=True)
for ax, genotype in zip(axes.flat, Genotype):
    model = g.build_rib_model(genotype)

    def init(m, stream):
        return uniform_rib_init(1000, m, stream)

    traj = run_ensemble(model, init, EnsembleConfig(replicates=replicates, horizon=horizon, master_seed=1729))
    est = trajectory_array(
        grr_trajectory(ExpectedCounts(values=np.array([1000.0, 0.0, 0.0, 0.0]), time=0),
                       rib_closed_form_stepper(rib_params(genotype)), horizon)
    )
    for state, label, color in styles:
        ax.plot(traj.times, traj.mean[:, state], color=color, label=f"{label} simulated")
        ax.plot(traj.times, est[:, state], color=color, linestyle="--", label=f"{label} estimate")
    ax.set_title(genotype.value)
    ax.set_xlabel("step")
    ax.set_ylabel("mean cells")

axes.flat[0].legend(fontsize=7)
fig.suptitle(f"cell-type means over {replicates} replicates vs recurrence")
fig.tight_layout()
target = OUT / "rib_genotypes.png"
fig.savefig(target, dpi=120)
print(f"wrote {target}")
