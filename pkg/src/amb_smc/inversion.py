"""Adaptive estimator that inverts the force map ``v(z, i)`` for the current.

Instead of solving the quadratic ``v(z, i) = v*`` at every instant (which has
two roots, and picking between them produces jumps), the current reference is
an integrated state driven by

    di_ref/dt = gamma * S(v* - v(z, i_ref)) / (dv/di)(z, i_ref)

The law can only act where ``dv/di`` is nonzero.  It vanishes on the curve
``z^2 + (2 s0 / i0) i z + s0^2 = 0``, so every evaluation first runs a margin
guard.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .control import switching
from .plant import PlantParams, dv_di, dv_dz, virtual_input


class SingularGradient(ArithmeticError):
    """``|dv/di|`` fell to or below the guard threshold."""

    def __init__(self, z, i_ref, margin, epsilon_grad):
        self.z = z
        self.i_ref = i_ref
        self.margin = margin
        self.epsilon_grad = epsilon_grad
        super().__init__(
            f"|dv/di| = {margin:.6g} <= {epsilon_grad:.6g} at z = {z:.6g}, i_ref = {i_ref:.6g}"
        )


@dataclass
class InversionState:
    i_ref: float = 0.0
    v_tilde: float = 0.0
    grad_margin: float = float("nan")
    singularity_events: int = 0


@dataclass(frozen=True)
class SingularityCheck:
    ok: bool
    margin: float

    def __bool__(self):
        return self.ok


def default_epsilon_grad(params: PlantParams) -> float:
    """0.1 % of the centred gradient ``4 i0 / s0^2``."""
    return 1e-3 * 4.0 * params.i0 / params.s0**2


def check_singularity(params: PlantParams, z, i_ref, epsilon_grad=None) -> SingularityCheck:
    if epsilon_grad is None:
        epsilon_grad = default_epsilon_grad(params)
    margin = abs(dv_di(params, z, i_ref))
    return SingularityCheck(bool(margin > epsilon_grad), float(margin))


def singular_current(params: PlantParams, z):
    """The ``i_ref`` at which ``dv/di`` vanishes for a given nonzero ``z``."""
    return -params.i0 * (z**2 + params.s0**2) / (2.0 * params.s0 * z)


def adaptive_rate(params: PlantParams, z, i_ref, v_star, gamma, sgn_mode="approx", p=25.0,
                  epsilon_grad=None):
    """Rate of change of the current reference.

    Raises :class:`SingularGradient` instead of dividing by a gradient whose
    magnitude is at or below ``epsilon_grad``.  Accepts arrays; one bad
    element rejects the whole batch and the error reports the worst one.
    """
    if epsilon_grad is None:
        epsilon_grad = default_epsilon_grad(params)
    grad = dv_di(params, z, i_ref)
    if type(grad) is float:
        if abs(grad) <= epsilon_grad:
            raise SingularGradient(z, i_ref, abs(grad), epsilon_grad)
        v_tilde = v_star - virtual_input(params, z, i_ref)
        return gamma * switching(v_tilde, sgn_mode, p) / grad
    margin = np.abs(grad)
    if np.any(margin <= epsilon_grad):
        if np.ndim(margin):
            k = int(np.argmin(margin))
            z_k = np.broadcast_to(z, margin.shape).flat[k]
            i_k = np.broadcast_to(i_ref, margin.shape).flat[k]
            raise SingularGradient(float(z_k), float(i_k), float(margin.flat[k]), epsilon_grad)
        raise SingularGradient(z, i_ref, float(margin), epsilon_grad)
    v_tilde = v_star - virtual_input(params, z, i_ref)
    return gamma * switching(v_tilde, sgn_mode, p) / grad


def delta1_estimate(params: PlantParams, log) -> float:
    """Largest observed ``|dv*/dt - (dv/dz)(z, i_ref) z_dot|`` along a run log.

    ``log`` is a sequence of records with ``t, z, z_dot, i_ref, v_star``
    attributes.  ``dv*/dt`` is a backward difference, so the first sample only
    seeds it.
    """
    if len(log) < 2:
        raise ValueError("at least two samples are needed")
    t = np.array([rec.t for rec in log])
    z = np.array([rec.z for rec in log])
    z_dot = np.array([rec.z_dot for rec in log])
    i_ref = np.array([rec.i_ref for rec in log])
    v_star = np.array([rec.v_star for rec in log])
    v_star_rate = np.diff(v_star) / np.diff(t)
    d = v_star_rate - dv_dz(params, z[1:], i_ref[1:]) * z_dot[1:]
    return float(np.max(np.abs(d)))
