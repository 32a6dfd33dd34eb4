"""Vertical-axis dynamics of the active-magnetic-bearing rotor.

The rotor sits between an upper and a lower electromagnet driven with the
differential currents ``i0 + i`` and ``i0 - i``.  Everything here is a pure
function of immutable parameters, and every function accepts either floats or
numpy arrays of matching shape.

Units are SI throughout.  The scaled magnetic force returned by
:func:`virtual_input` is in A^2/m^2; multiply by ``kappa / (4 m)`` to get an
acceleration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class RotorContact(ValueError):
    """Raised when the axial displacement leaves the open gap ``(-s0, s0)``."""


@dataclass(frozen=True)
class PlantParams:
    """Physical constants of the bearing.  Defaults are the reference rig.

    ``k_z`` is the axial stiffness in N/m; it is negative for the reference
    rig, i.e. the passive bearings pull the rotor back towards ``z = 0``.
    """

    m: float = 0.588
    k_z: float = -754.0
    mu0: float = 1.25e-6
    n: float = 1480.0
    A: float = 0.121
    s0: float = 5e-3
    i0: float = 0.25
    R: float = 41.44
    g: float = 9.81
    kappa: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("m", "mu0", "n", "A", "s0", "i0", "R"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not (math.isfinite(self.g) and self.g >= 0):
            raise ValueError(f"g must be non-negative, got {self.g!r}")
        if not math.isfinite(self.k_z):
            raise ValueError("k_z must be finite")
        object.__setattr__(self, "kappa", self.mu0 * self.n**2 * self.A)


class PlantState(NamedTuple):
    z: float
    z_dot: float
    i: float


class Disturbances(NamedTuple):
    q_z: float = 0.0
    q_i: float = 0.0


def check_gap(params: PlantParams, z):
    s0 = params.s0
    if isinstance(z, float):
        if not -s0 < z < s0:
            raise RotorContact(f"|z| = {abs(z):.6g} m reached the air gap s0 = {s0:g} m")
    elif np.any(np.abs(z) >= s0) or np.any(np.isnan(z)):
        raise RotorContact(f"displacement outside the air gap s0 = {s0:g} m")


def virtual_input(params: PlantParams, z, i):
    """Scaled net magnetic force ``((i0+i)/(s0-z))^2 - ((i0-i)/(s0+z))^2``."""
    check_gap(params, z)
    i0, s0 = params.i0, params.s0
    return ((i0 + i) / (s0 - z)) ** 2 - ((i0 - i) / (s0 + z)) ** 2


def dv_di(params: PlantParams, z, i):
    """Partial derivative of :func:`virtual_input` with respect to ``i``."""
    check_gap(params, z)
    i0, s0 = params.i0, params.s0
    return 2.0 * (i0 + i) / (s0 - z) ** 2 + 2.0 * (i0 - i) / (s0 + z) ** 2


def dv_dz(params: PlantParams, z, i):
    """Partial derivative of :func:`virtual_input` with respect to ``z``."""
    check_gap(params, z)
    i0, s0 = params.i0, params.s0
    return 2.0 * (i0 + i) ** 2 / (s0 - z) ** 3 + 2.0 * (i0 - i) ** 2 / (s0 + z) ** 3


def axial_acceleration(params: PlantParams, z, v, q_z=0.0):
    """Rotor acceleration produced by the scaled magnetic force ``v``."""
    return (2.0 * params.k_z / params.m) * z + params.kappa / (4.0 * params.m) * v - params.g + q_z


def current_rate(params: PlantParams, z, z_dot, i, u, q_i=0.0):
    """Time derivative of the current deviation under coil voltage ``u``."""
    check_gap(params, z)
    s0, kappa = params.s0, params.kappa
    return (2.0 * z_dot / (s0 + z)) * i + (2.0 * (s0 + z) / kappa) * (u - params.R * i) + q_i


def plant_derivative(params: PlantParams, state: PlantState, u, dist: Disturbances = Disturbances()):
    """Return ``(z_dot, z_ddot, di/dt)`` for the given state, voltage and disturbances."""
    z, z_dot, i = state
    z_ddot = axial_acceleration(params, z, virtual_input(params, z, i), dist.q_z)
    return np.array([z_dot, z_ddot, current_rate(params, z, z_dot, i, u, dist.q_i)])


def hover_current(params: PlantParams) -> float:
    """Current deviation that holds the rotor still at ``z = 0``.

    At the centre ``v(0, i) = 4 i0 i / s0^2`` exactly, so the balance is linear in ``i``.
    """
    return params.m * params.g * params.s0**2 / (params.i0 * params.kappa)
