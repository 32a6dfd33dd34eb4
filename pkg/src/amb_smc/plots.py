"""Static multi-panel figures of a run."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .plant import PlantParams, virtual_input  # noqa: E402
from .sim import log_arrays  # noqa: E402


def build_figures(records, params: PlantParams = PlantParams()):
    """Return ``(state_figure, input_figure)``.

    The state figure stacks position with reference, coil current with its
    reference, the sliding variable and the force disturbance.  The input
    figure shows the demanded and generated scaled force, their difference
    and the coil voltage.
    """
    d = log_arrays(records)
    t = d["t"]

    fig_state, ax = plt.subplots(4, 1, sharex=True, figsize=(7, 8))
    ax[0].plot(t, d["r"], "--", label="r")
    ax[0].plot(t, d["z"], label="z")
    ax[0].set_ylabel("position [m]")
    ax[1].plot(t, d["i_ref"], "--", label="i_ref")
    ax[1].plot(t, d["i"], label="i")
    ax[1].set_ylabel("current [A]")
    ax[2].plot(t, d["sigma"], label="sigma")
    ax[2].set_ylabel("sigma [m/s]")
    ax[3].plot(t, d["q_z"], label="q_z")
    ax[3].set_ylabel("q_z [m/s^2]")
    ax[3].set_xlabel("t [s]")
    for a in ax:
        a.legend(loc="upper right")
        a.grid(True, alpha=0.3)
    fig_state.tight_layout()

    v_gen = virtual_input(params, d["z"], d["i"]) if len(t) else d["z"]
    fig_input, bx = plt.subplots(3, 1, sharex=True, figsize=(7, 6))
    bx[0].plot(t, d["v_star"], "--", label="v*")
    bx[0].plot(t, v_gen, label="v(z, i)")
    bx[0].set_ylabel("scaled force [A^2/m^2]")
    bx[1].plot(t, d["v_tilde"], label="v_tilde")
    bx[1].set_ylabel("force error [A^2/m^2]")
    bx[2].plot(t, d["u"], label="u")
    bx[2].set_ylabel("voltage [V]")
    bx[2].set_xlabel("t [s]")
    for b in bx:
        b.legend(loc="upper right")
        b.grid(True, alpha=0.3)
    fig_input.tight_layout()
    return fig_state, fig_input


def emit_plots(records, metrics, output_dir, run_name: str = "run", ext: str = "png",
               params: PlantParams = PlantParams()):
    """Write ``<run>_state.<ext>`` and ``<run>_input.<ext>``; returns both paths."""
    if not len(records):
        raise ValueError("cannot plot an empty log")
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    fig_state, fig_input = build_figures(records, params)
    if metrics is not None and metrics.sigma_ss_radius is not None:
        fig_state.suptitle(f"steady-state |sigma| <= {metrics.sigma_ss_radius:.3g}", fontsize=9)
    paths = []
    for fig, suffix in ((fig_state, "state"), (fig_input, "input")):
        path = output_dir / f"{run_name}_{suffix}.{ext}"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        paths.append(path)
    return paths
