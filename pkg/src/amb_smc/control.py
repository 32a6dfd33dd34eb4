"""Sliding-mode laws for the position loop and the coil-current loop."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .plant import PlantParams, PlantState, check_gap

SGN_MODES = ("ideal", "approx")


class GainConditionError(ValueError):
    """A gain violates the condition that guarantees finite-time convergence."""


@dataclass(frozen=True)
class Gains:
    """Controller gains and the disturbance bounds they are designed against.

    Construction only checks that each value is admissible on its own.  The
    cross conditions ``k > Q_z`` and ``k_i > Q_i`` are checked separately by
    :meth:`check_conditions` so that deliberately under-tuned loops can still
    be simulated.
    """

    c: float = 17.0
    k: float = 25.0
    gamma: float = 1000.0
    k_i: float = 152.0
    p: float = 25.0
    Q_z: float = 1.0
    Q_i: float = 0.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c > 0 required")
        if not self.gamma > 0:
            raise ValueError("gamma > 0 required")
        if not self.p >= 1:
            raise ValueError("p >= 1 required")
        for name in ("k", "k_i", "Q_z", "Q_i"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} >= 0 required")

    def check_conditions(self):
        if not self.k > self.Q_z:
            raise GainConditionError("k > Q_z required")
        if not self.k_i > self.Q_i:
            raise GainConditionError("k_i > Q_i required")


class Reference(NamedTuple):
    r: float = 0.0
    r_dot: float = 0.0
    r_ddot: float = 0.0


def sgn(x):
    """Signum with ``sgn(0) = 0``."""
    if type(x) is float:
        return float((x > 0.0) - (x < 0.0))
    return np.sign(x)


def sgn_approx(x, p):
    """Continuous signum surrogate ``(2/pi) arctan(p x)``."""
    if isinstance(x, float):
        return (2.0 / math.pi) * math.atan(p * x)
    return (2.0 / np.pi) * np.arctan(p * x)


def switching(x, mode: str, p: float):
    """Evaluate the switching function selected by ``mode``."""
    if mode == "approx":
        return sgn_approx(x, p)
    if mode == "ideal":
        return sgn(x)
    raise ValueError(f"unknown sgn mode {mode!r}; expected one of {SGN_MODES}")


def sliding_variable(state: PlantState, ref: Reference, c: float):
    return (state.z_dot - ref.r_dot) + c * (state.z - ref.r)


def position_control(params: PlantParams, state: PlantState, ref: Reference, gains: Gains,
                     sgn_mode: str = "approx"):
    """Scaled magnetic force ``v*`` that puts the axial dynamics on ``sigma = 0``.

    Substituting ``v*`` for the virtual input turns the sliding-variable
    dynamics into ``sigma_dot = -k S(sigma) + q_z``.
    """
    check_gap(params, state.z)
    sigma = sliding_variable(state, ref, gains.c)
    bracket = (-(2.0 * params.k_z / params.m) * state.z
               - gains.c * (state.z_dot - ref.r_dot)
               + ref.r_ddot + params.g
               - gains.k * switching(sigma, sgn_mode, gains.p))
    return (4.0 * params.m / params.kappa) * bracket


def current_control(params: PlantParams, state: PlantState, i_ref, di_ref_dt, gains: Gains,
                    sgn_mode: str = "approx"):
    """Coil voltage that gives the current error ``e = i - i_ref`` the dynamics
    ``e_dot = -k_i S(e) + q_i``."""
    check_gap(params, state.z)
    z, z_dot, i = state
    gap_lower = params.s0 + z
    e = i - i_ref
    bracket = -(2.0 * z_dot / gap_lower) * i + di_ref_dt - gains.k_i * switching(e, sgn_mode, gains.p)
    return params.kappa / (2.0 * gap_lower) * bracket + params.R * i
