"""Terminal proximal fraction across seven gradient amplitudes.

Sweeps the log10 amplitude of the concentration field from -0.4 to 0.8.
The predicted committed-proximal share is the area fraction where the
field clears the threshold; the simulated terminal share follows it
point for point.

Usage: python3 shh_sweep.py [replicates]
"""

import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import grrsim as g
from grrsim.ensemble import EnsembleConfig, run_ensemble
from grrsim.rib import DISTAL, PROXIMAL, Genotype, proximal_area_fraction, rib_params, uniform_rib_init

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

replicates = int(sys.argv[1]) if len(sys.argv) > 1 else 30
sweep = (-0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8)

simulated, predicted = [], []
for shh in sweep:
    model = g.build_rib_model(Genotype.NORMAL, {"shh_log_intensity": shh})

    def init(m, stream):
        return uniform_rib_init(1000, m, stream)

    traj = run_ensemble(model, init, EnsembleConfig(replicates=replicates, horizon=100, master_seed=1729))
    prox, distal = traj.mean[-1, PROXIMAL], traj.mean[-1, DISTAL]
    simulated.append(prox / (prox + distal))
    predicted.append(proximal_area_fraction(rib_params(shh_log_intensity=shh)))
    print(f"shh_log={shh:+.1f}  simulated {simulated[-1]:.4f}  predicted {predicted[-1]:.4f}")

fig, ax = plt.subplots(figsize=(7, 5))
ax.plot(sweep, simulated, marker="o", label="simulated terminal fraction")
ax.plot(sweep, predicted, marker="s", linestyle="--", label="predicted area fraction")
ax.set_xlabel("log10 gradient amplitude")
ax.set_ylabel("proximal / (proximal + distal)")
ax.set_title(f"terminal proximal share, {replicates} replicates per point")
ax.legend()
fig.tight_layout()
target = OUT / "shh_sweep.png"
fig.savefig(target, dpi=120)
print(f"wrote {target}")
