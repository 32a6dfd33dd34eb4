"""
Inverting the force map without solving it
==========================================

For a fixed gap ``z`` the scaled force ``v(z, i)`` is a parabola in ``i``.
Solving ``v = v*`` gives two roots, one on each side of the vertex where
``dv/di = 0``.  The adaptive estimator instead walks ``i_ref`` along the
gradient and lands on the root that shares the starting point's side.

This script freezes ``z`` and ``v*``, runs the estimator, and overlays the two
algebraic roots and the vertex.
"""
import math
import os
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from amb_smc.inversion import adaptive_rate, singular_current
from amb_smc.plant import PlantParams, dv_di, virtual_input

P = PlantParams()
out = Path(os.environ.get("AMB_SMC_OUTPUT_ROOT", "runs")) / "demos"
out.mkdir(parents=True, exist_ok=True)

z, v_star = 1.5e-3, 9000.0
gamma, dt, n = 1e5, 1e-6, 150_000

# %%
# Integrate the estimator from two starting currents on opposite sides of the vertex.
vertex = singular_current(P, z)
starts = np.array([0.0, vertex - 0.3])
i_ref = starts.copy()
hist = np.empty((n, 2))
for k in range(n):
    hist[k] = i_ref
    i_ref = i_ref + dt * adaptive_rate(P, z, i_ref, v_star, gamma, "approx", 25.0)

# %%
# Closed-form roots of (a - b) i^2 + 2 i0 (a + b) i + i0^2 (a - b) - v* = 0.
a, b = 1 / (P.s0 - z) ** 2, 1 / (P.s0 + z) ** 2
qa, qb, qc = a - b, 2 * P.i0 * (a + b), P.i0**2 * (a - b) - v_star
disc = math.sqrt(qb * qb - 4 * qa * qc)
roots = sorted([(-qb - disc) / (2 * qa), (-qb + disc) / (2 * qa)])
print("vertex", vertex, "roots", roots, "estimator ends at", i_ref)
print("gradient at the ends", dv_di(P, z, i_ref))

t = np.arange(n) * dt
fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6))
for j, label in enumerate(("start 0 A", f"start {starts[1]:.2f} A")):
    ax1.plot(t, hist[:, j], label=label)
for r in roots:
    ax1.axhline(r, color="k", lw=0.6, ls="--")
ax1.axhline(vertex, color="r", lw=0.6, ls=":", label="dv/di = 0")
ax1.set_xlabel("t [s]")
ax1.set_ylabel("i_ref [A]")
ax1.legend()

grid = np.linspace(vertex - 1.0, vertex + 1.0, 400)
ax2.plot(grid, virtual_input(P, z, grid))
ax2.axhline(v_star, color="k", lw=0.6)
ax2.set_xlabel("i [A]")
ax2.set_ylabel("v(z, i)")
fig.tight_layout()
fig.savefig(out / "inversion_branches.png", dpi=120)
print("saved", out / "inversion_branches.png")
