"""The sampling estimator next to the closed form, on one live run.

The generic estimator knows nothing about binomial bands: each step it
drops uniformly placed probe agents into a live population snapshot,
reads empirical transition/production probabilities off the rules, and
advances the expected counts through them.  Early on it matches the
closed form; as the real population clusters, the probe estimates
(which see the actual positions) track the simulation better than the
uniform-mixing closed form does.

Usage: python3 probe_vs_closed_form.py [samples_per_state]
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
from grrsim.grr import (
    ExpectedCounts,
    ProbeStepper,
    counts_from_population,
    gol_closed_form_stepper,
    grr_trajectory,
    trajectory_array,
)
from grrsim.rng import RandomStream

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

samples = int(sys.argv[1]) if len(sys.argv) > 1 else 5000
params = g.GolParams(20, 2, 8, 2, 4)
model = g.build_gol_model(params)
n0, horizon = 500, 25

# simulated reference
def init(m, stream):
    return g.uniform_random_init(n0, m, stream)

traj = run_ensemble(model, init, EnsembleConfig(replicates=30, horizon=horizon, master_seed=1729))

# closed form from the same starting mass
closed = trajectory_array(
    grr_trajectory(ExpectedCounts(values=np.array([0.0, float(n0)]), time=0),
                   gol_closed_form_stepper(params), horizon)
)[:, 1]

# probe estimator driving its own internal simulation
stream = RandomStream(1729)
population = g.uniform_random_init(n0, model, stream.split(1))
stepper = ProbeStepper(model, population, stream.split(2), samples_per_state=samples)
probed = trajectory_array(grr_trajectory(counts_from_population(population, model), stepper, horizon))[:, 1]

fig, ax = plt.subplots(figsize=(8, 5))
ax.plot(traj.times, traj.mean[:, ALIVE], label="ensemble mean (30 replicates)")
ax.plot(traj.times, closed, linestyle="--", label="closed form")
ax.plot(traj.times, probed, linestyle=":", label=f"probe estimator ({samples} samples/state)")
ax.set_xlabel("step")
ax.set_ylabel("living agents")
ax.set_title("two estimators against the simulation")
ax.legend()
fig.tight_layout()
target = OUT / "probe_vs_closed_form.png"
fig.savefig(target, dpi=120)
print(f"wrote {target}")
