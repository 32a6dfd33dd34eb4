"""Fixed-step closed-loop simulation of the cascaded controller.

One control cycle per integration step: the controllers sample the (noisy)
position measurement, compute ``v*``, the current-reference rate and the coil
voltage, and those inputs are held constant while the four states
``(z, z_dot, i, i_ref)`` are advanced by ``dt``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterator, NamedTuple, Optional

import numpy as np

from .control import SGN_MODES, Gains, Reference, current_control, position_control, sliding_variable
from .inversion import InversionState, SingularGradient, adaptive_rate, default_epsilon_grad
from .plant import (Disturbances, PlantParams, PlantState, RotorContact, axial_acceleration,
                    current_rate, dv_di, hover_current, virtual_input)

log = logging.getLogger(__name__)

INTEGRATORS = ("euler", "rk4")
KINDS = ("regulation", "tracking")


class NumericalBlowup(ArithmeticError):
    """The integrator produced a non-finite state."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pulse:
    """Rectangular ``q_z`` pulse on ``[t_on, t_off)``.

    ``None`` fields resolve to 40 % / 60 % of the run and to ``gains.Q_z``.
    A zero amplitude disables the pulse; ``t_on = 0, t_off = duration`` gives a
    constant disturbance.
    """

    t_on: Optional[float] = None
    t_off: Optional[float] = None
    amplitude: Optional[float] = None


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything that determines a run.  Fields left as ``None`` are filled in
    by :meth:`resolved`.

    ``initial_state=None`` starts at the hover equilibrium and ``i_ref0=None``
    starts the estimator at the initial coil current.  ``noise_interpretation``
    selects whether ``noise_variance`` is a variance in m^2 (default) or a
    standard deviation in m.
    """

    kind: str = "regulation"
    A_r: float = 0.0025
    f_r: float = 2.0
    duration: Optional[float] = None
    dt: float = 1e-5
    seed: int = 0
    noise_variance: float = 1e-7
    noise_interpretation: str = "variance"
    pulse: Pulse = field(default_factory=Pulse)
    q_i: float = 0.0
    initial_state: Optional[PlantState] = None
    i_ref0: Optional[float] = None
    gains: Gains = field(default_factory=Gains)
    plant: PlantParams = field(default_factory=PlantParams)
    sgn_mode: str = "approx"
    position_sgn_mode: Optional[str] = None
    inversion_sgn_mode: Optional[str] = None
    current_sgn_mode: Optional[str] = None
    integrator: str = "rk4"
    epsilon_grad: Optional[float] = None
    on_singularity: str = "abort"
    u_max: Optional[float] = None
    convergence_tol: float = 1e-4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        for name in ("sgn_mode", "position_sgn_mode", "inversion_sgn_mode", "current_sgn_mode"):
            mode = getattr(self, name)
            if mode is not None and mode not in SGN_MODES:
                raise ValueError(f"{name} must be one of {SGN_MODES}")
        if self.noise_interpretation not in ("variance", "std"):
            raise ValueError("noise_interpretation must be 'variance' or 'std'")
        if self.on_singularity not in ("abort", "hold"):
            raise ValueError("on_singularity must be 'abort' or 'hold'")
        if not self.dt > 0:
            raise ValueError("dt > 0 required")
        if self.duration is not None and not self.duration >= self.dt:
            raise ValueError("duration >= dt required")
        if not self.noise_variance >= 0:
            raise ValueError("noise_variance >= 0 required")
        if not 0 <= self.A_r < self.plant.s0:
            raise ValueError("0 <= A_r < s0 required")
        if not self.f_r > 0:
            raise ValueError("f_r > 0 required")
        if self.epsilon_grad is not None and not self.epsilon_grad > 0:
            raise ValueError("epsilon_grad > 0 required")
        if self.u_max is not None and not self.u_max > 0:
            raise ValueError("u_max > 0 required")
        if self.initial_state is not None:
            object.__setattr__(self, "initial_state",
                               PlantState(*map(float, self.initial_state)))
            if not abs(self.initial_state.z) < self.plant.s0:
                raise ValueError("initial z must lie inside the air gap")
        t_on, t_off = self.pulse_window
        if not 0 <= t_on < t_off <= self.run_duration:
            raise ValueError("0 <= t_on < t_off <= duration required for the pulse")

    @property
    def run_duration(self) -> float:
        if self.duration is not None:
            return self.duration
        return 2.0 if self.kind == "regulation" else 2.5

    @property
    def pulse_window(self) -> tuple[float, float]:
        T = self.run_duration
        t_on = 0.4 * T if self.pulse.t_on is None else self.pulse.t_on
        t_off = 0.6 * T if self.pulse.t_off is None else self.pulse.t_off
        return t_on, t_off

    @property
    def pulse_amplitude(self) -> float:
        return self.gains.Q_z if self.pulse.amplitude is None else self.pulse.amplitude

    @property
    def noise_std(self) -> float:
        if self.noise_interpretation == "variance":
            return math.sqrt(self.noise_variance)
        return self.noise_variance

    @property
    def n_steps(self) -> int:
        return int(round(self.run_duration / self.dt))

    def resolved(self) -> "ScenarioConfig":
        """Copy with every default materialised."""
        t_on, t_off = self.pulse_window
        state = self.initial_state
        if state is None:
            ih = hover_current(self.plant)
            state = PlantState(0.0, 0.0, ih)
        return replace(
            self,
            duration=self.run_duration,
            pulse=Pulse(t_on, t_off, self.pulse_amplitude),
            initial_state=state,
            i_ref0=state.i if self.i_ref0 is None else self.i_ref0,
            position_sgn_mode=self.position_sgn_mode or self.sgn_mode,
            inversion_sgn_mode=self.inversion_sgn_mode or self.sgn_mode,
            current_sgn_mode=self.current_sgn_mode or self.sgn_mode,
            epsilon_grad=(default_epsilon_grad(self.plant) if self.epsilon_grad is None
                          else self.epsilon_grad),
        )


# ---------------------------------------------------------------------------
# signals
# ---------------------------------------------------------------------------

def reference_at(cfg: ScenarioConfig, t: float) -> Reference:
    if cfg.kind == "regulation":
        return Reference(0.0, 0.0, 0.0)
    w = 2.0 * math.pi * cfg.f_r
    s, c = math.sin(w * t), math.cos(w * t)
    return Reference(cfg.A_r * s, cfg.A_r * w * c, -cfg.A_r * w * w * s)


def disturbance_at(cfg: ScenarioConfig, t: float) -> Disturbances:
    t_on, t_off = cfg.pulse_window
    q_z = cfg.pulse_amplitude if t_on <= t < t_off else 0.0
    return Disturbances(q_z, cfg.q_i)


# ---------------------------------------------------------------------------
# integrators
# ---------------------------------------------------------------------------

def _finite(x):
    if not math.isfinite(float(sum(x) if isinstance(x, tuple) else np.sum(x))):
        raise NumericalBlowup(f"non-finite state {x!r}")
    return x


def _axpy(x, a, y):
    """``x + a * y`` for ndarrays or tuples of floats."""
    if isinstance(x, tuple):
        return tuple(xi + a * yi for xi, yi in zip(x, y))
    return x + a * y


def integrate_euler(f: Callable, x, dt: float):
    """One forward-Euler step.  ``x`` is an ndarray or a tuple of floats and ``f``
    must return the same kind."""
    return _finite(_axpy(x, dt, f(x)))


def integrate_rk4(f: Callable, x, dt: float):
    """One classical Runge-Kutta step; same conventions as :func:`integrate_euler`."""
    k1 = f(x)
    k2 = f(_axpy(x, 0.5 * dt, k1))
    k3 = f(_axpy(x, 0.5 * dt, k2))
    k4 = f(_axpy(x, dt, k3))
    if isinstance(x, tuple):
        h = dt / 6.0
        out = tuple(xi + h * (a + 2.0 * b + 2.0 * c + d) for xi, a, b, c, d in zip(x, k1, k2, k3, k4))
    else:
        out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _finite(out)


_INTEGRATE = {"euler": integrate_euler, "rk4": integrate_rk4}


# ---------------------------------------------------------------------------
# loop
# ---------------------------------------------------------------------------

class SimRecord(NamedTuple):
    """One logged control cycle: the state at ``t`` and the inputs applied on ``[t, t + dt)``.

    ``sigma`` is evaluated on the true state; the controllers act on the
    measured position ``z_measured``.
    """

    t: float
    z: float
    z_dot: float
    i: float
    i_ref: float
    u: float
    sigma: float
    v_star: float
    v_tilde: float
    q_z: float
    q_i: float
    r: float
    z_measured: float


FIELDS = SimRecord._fields


def step(cfg: ScenarioConfig, plant_state: PlantState, inversion_state: InversionState, t: float,
         noise: float = 0.0):
    """Advance one control-and-integrate cycle.

    ``cfg`` must be resolved.  ``noise`` is the position-sensor error for this
    sample.  Returns ``(plant_state, inversion_state, record)``.
    """
    params, gains = cfg.plant, cfg.gains
    z, z_dot, i = plant_state
    i_ref = inversion_state.i_ref
    events = inversion_state.singularity_events

    z_m = z + noise
    measured = PlantState(z_m, z_dot, i)
    ref = reference_at(cfg, t)
    v_star = position_control(params, measured, ref, gains, cfg.position_sgn_mode)
    v_tilde = v_star - virtual_input(params, z_m, i_ref)
    try:
        i_ref_rate = adaptive_rate(params, z_m, i_ref, v_star, gains.gamma, cfg.inversion_sgn_mode,
                                   gains.p, cfg.epsilon_grad)
    except SingularGradient as exc:
        if cfg.on_singularity == "abort":
            raise
        log.warning("singular gradient at t=%.6g s (margin %.3g); holding i_ref", t, exc.margin)
        i_ref_rate = 0.0
        events += 1
    u = current_control(params, measured, i_ref, i_ref_rate, gains, cfg.current_sgn_mode)
    if cfg.u_max is not None:
        u = min(max(u, -cfg.u_max), cfg.u_max)
    dist = disturbance_at(cfg, t)

    def f(x):
        zz, zz_dot, ii, _ = x
        return (
            zz_dot,
            axial_acceleration(params, zz, virtual_input(params, zz, ii), dist.q_z),
            current_rate(params, zz, zz_dot, ii, u, dist.q_i),
            i_ref_rate,
        )

    x = _INTEGRATE[cfg.integrator](f, (z, z_dot, i, i_ref), cfg.dt)
    if not abs(x[0]) < params.s0:
        raise RotorContact(f"rotor contact at t = {t + cfg.dt:.6g} s (z = {x[0]:.6g} m)")

    record = SimRecord(t, z, z_dot, i, i_ref, u, sliding_variable(plant_state, ref, gains.c),
                       v_star, v_tilde, dist.q_z, dist.q_i, ref.r, z_m)
    new_inv = InversionState(float(x[3]), v_tilde, abs(dv_di(params, z_m, i_ref)), events)
    return PlantState(float(x[0]), float(x[1]), float(x[2])), new_inv, record


@dataclass(frozen=True)
class Termination:
    reason: str
    t: float
    message: str


_REASONS = ((RotorContact, "rotor_contact"), (SingularGradient, "singular_gradient"),
            (NumericalBlowup, "numerical_blowup"))


class Simulation:
    """Pull-based run: iterating yields one :class:`SimRecord` per step.

    Iteration stops early on rotor contact, a singular gradient (in abort
    mode) or numerical blow-up; the cause is then in :attr:`termination`.
    """

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg.resolved()
        self.termination: Optional[Termination] = None
        self.plant_state = self.cfg.initial_state
        self.inversion_state = InversionState(self.cfg.i_ref0)

    def __iter__(self) -> Iterator[SimRecord]:
        cfg = self.cfg
        rng = np.random.default_rng(cfg.seed)
        std = cfg.noise_std
        for k in range(cfg.n_steps):
            t = k * cfg.dt
            noise = float(std * rng.standard_normal()) if std > 0 else 0.0
            try:
                self.plant_state, self.inversion_state, record = step(
                    cfg, self.plant_state, self.inversion_state, t, noise)
            except (RotorContact, SingularGradient, NumericalBlowup) as exc:
                reason = next(name for kind, name in _REASONS if isinstance(exc, kind))
                self.termination = Termination(reason, t, str(exc))
                log.info("run terminated: %s", exc)
                return
            yield record


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunMetrics:
    sigma_ss_radius: Optional[float]
    max_abs_tracking_error: Optional[float]
    vtilde_convergence_time: Optional[float]
    tol_v: Optional[float]
    singularity_events: int
    terminated_early: bool
    termination_reason: Optional[str]
    termination_time: Optional[float]
    converged: bool

    def to_dict(self) -> dict:
        return asdict(self)


def log_arrays(records) -> dict[str, np.ndarray]:
    """Column view of a record sequence."""
    data = np.array(records, dtype=float).reshape(-1, len(FIELDS))
    return {name: data[:, j] for j, name in enumerate(FIELDS)}


def compute_metrics(cfg: ScenarioConfig, records, termination: Optional[Termination] = None,
                    singularity_events: int = 0) -> RunMetrics:
    """Steady-state figures of merit.

    The sigma window is the final 20 % of the planned run with the pulse
    interval removed; tracking runs measure the error over the final two
    reference periods (also without the pulse).  When the run ended before
    its window, the last 20 % of the recorded samples stand in.
    ``tol_v`` is 1 % of the peak ``|v*|``.
    """
    cfg = cfg.resolved()
    logd = log_arrays(records)
    t = logd["t"]
    T = cfg.duration
    t_on, t_off = cfg.pulse_window
    outside_pulse = ~((t >= t_on) & (t < t_off)) if cfg.pulse_amplitude != 0 else np.ones_like(t, bool)

    def window(start):
        mask = (t >= start) & outside_pulse
        if not mask.any() and len(t):
            mask = np.zeros_like(t, bool)
            mask[int(0.8 * len(t)):] = True
        return mask

    sig_win = window(0.8 * T)
    err_win = window(T - 2.0 / cfg.f_r) if cfg.kind == "tracking" else sig_win
    sigma_radius = float(np.max(np.abs(logd["sigma"][sig_win]))) if sig_win.any() else None
    track_err = (float(np.max(np.abs(logd["z"] - logd["r"])[err_win])) if err_win.any() else None)

    tol_v = conv_time = None
    if len(t):
        tol_v = 0.01 * float(np.max(np.abs(logd["v_star"])))
        if termination is None:
            bad = np.abs(logd["v_tilde"]) >= tol_v
            if not bad.any():
                conv_time = float(t[0])
            elif not bad[-1]:
                conv_time = float(t[np.nonzero(bad)[0][-1] + 1])

    converged = (termination is None and sigma_radius is not None
                 and sigma_radius <= cfg.convergence_tol)
    return RunMetrics(
        sigma_ss_radius=sigma_radius,
        max_abs_tracking_error=track_err,
        vtilde_convergence_time=conv_time,
        tol_v=tol_v,
        singularity_events=singularity_events,
        terminated_early=termination is not None,
        termination_reason=termination.reason if termination else None,
        termination_time=termination.t if termination else None,
        converged=bool(converged),
    )


def run(cfg: ScenarioConfig):
    """Execute a full run.  Returns ``(records, metrics)``."""
    sim = Simulation(cfg)
    records = list(sim)
    metrics = compute_metrics(sim.cfg, records, sim.termination,
                              sim.inversion_state.singularity_events)
    return records, metrics
