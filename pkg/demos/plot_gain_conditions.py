"""
When the switching gain is too small
====================================

With the force set exactly to ``v*`` the sliding variable obeys
``d sigma/dt = -k S(sigma) + q_z``.  A constant disturbance ``q_z = Q_z``
is rejected only when ``k > Q_z``; below that, sigma drifts away.  The same
comparison is then repeated on the full cascade with a sweep over ``k``.
"""
import os
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from amb_smc.control import Gains, Reference, position_control
from amb_smc.plant import PlantParams, PlantState, axial_acceleration
from amb_smc.sweep import sweep

P = PlantParams()
out = Path(os.environ.get("AMB_SMC_OUTPUT_ROOT", "runs")) / "demos"
out.mkdir(parents=True, exist_ok=True)


def mechanical_only(gains, z0, q_z, dt=1e-6, duration=0.05):
    z, zd = z0, 0.0
    sig = []
    for _ in range(int(duration / dt)):
        v = position_control(P, PlantState(z, zd, 0.0), Reference(), gains, "ideal")
        z, zd = z + dt * zd, zd + dt * axial_acceleration(P, z, v, q_z)
        sig.append(zd + gains.c * z)
    return np.array(sig)


# %%
fig, ax = plt.subplots(figsize=(7, 4))
t = np.arange(50_000) * 1e-6
for k in (0.5, 2.0, 25.0):
    ax.plot(t, mechanical_only(Gains(k=k), 1e-4, 1.0), label=f"k = {k}")
ax.axhline(0, color="k", lw=0.5)
ax.set_xlabel("t [s]")
ax.set_ylabel("sigma")
ax.legend()
fig.savefig(out / "gain_condition.png", dpi=120)

# %%
# Full cascade, constant pulse for the whole run, k on both sides of Q_z = 1.
base = {
    "gains": {"gamma": 1e4, "enforce_conditions": False},
    "scenario": {"duration": 0.2, "noise_variance": 0.0,
                 "pulse": {"t_on": 0.0, "t_off": 0.2, "amplitude": 1.0}},
}
for row in sweep(base, [("k", [0.5, 25.0])], workers=1):
    print(f"k = {row['k']}: converged={row['converged']}, sigma radius={row['sigma_ss_radius']}, "
          f"stopped by {row['termination_reason']}")
