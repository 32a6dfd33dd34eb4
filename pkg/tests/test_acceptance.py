"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; the terminal summary lists one
PASS/FAIL line per criterion.
"""
import math

import numpy as np
import pytest

from amb_smc.control import Gains
from amb_smc.inversion import (SingularGradient, adaptive_rate, check_singularity,
                               default_epsilon_grad, singular_current)
from amb_smc.plant import PlantParams, dv_di, dv_dz, virtual_input
from amb_smc.sim import Pulse, ScenarioConfig, run

from acceptance_report import report
from oracles import continuity_root, exact_inner_loop, open_loop_endpoint, reaching_time

P = PlantParams()
G = Gains()


def _fmt(x):
    return "n/a" if x is None else f"{x:.3g}"


def _status(metrics):
    if metrics.terminated_early:
        return f"{metrics.termination_reason} at t = {metrics.termination_time:.4g} s"
    return "ran to completion"


# ---------------------------------------------------------------------------
# closed-loop reproduction under the reference tuning
# ---------------------------------------------------------------------------

def test_01_regulation_radius():
    _, m = run(ScenarioConfig(kind="regulation"))
    ok = not m.terminated_early and m.sigma_ss_radius is not None and m.sigma_ss_radius <= 1.2e-5
    assert report(1, "regulation sigma radius <= 1.2e-5", ok,
                  f"radius {_fmt(m.sigma_ss_radius)}, {_status(m)}"), m


def test_02_tracking_error():
    _, m = run(ScenarioConfig(kind="tracking"))
    ok = (not m.terminated_early and m.max_abs_tracking_error is not None
          and m.max_abs_tracking_error <= 5e-5)
    assert report(2, "tracking max |z - r| <= 5e-5 over final 2 periods", ok,
                  f"error {_fmt(m.max_abs_tracking_error)} m, {_status(m)}"), m


def test_03_inversion_convergence():
    _, m = run(ScenarioConfig(kind="regulation"))
    t_conv = m.vtilde_convergence_time
    ok = not m.terminated_early and t_conv is not None and t_conv <= 0.02
    assert report(3, "|v_tilde| < tol_v within 0.02 s and stays", ok,
                  f"convergence time {_fmt(t_conv)} s, tol_v {_fmt(m.tol_v)}, {_status(m)}"), m


def test_04_disturbance_rejection():
    rec_p, with_pulse = run(ScenarioConfig(kind="regulation"))
    rec_0, without = run(ScenarioConfig(kind="regulation", pulse=Pulse(amplitude=0.0)))
    contact = any(mm.termination_reason == "rotor_contact" for mm in (with_pulse, without))
    radii = (with_pulse.sigma_ss_radius, without.sigma_ss_radius)
    ok = not with_pulse.terminated_early and not without.terminated_early
    rel = math.nan
    if ok and radii[1] > 0:
        rel = abs(radii[0] - radii[1]) / radii[1]
        ok = rel < 0.1
    ok = ok and not contact
    assert report(4, "pulse changes sigma radius by < 10%, no contact", ok,
                  f"relative change {rel:.3g}; pulse run {_status(with_pulse)}, "
                  f"pulse-free run {_status(without)}"), (with_pulse, without)


# ---------------------------------------------------------------------------
# sliding-surface properties on the exact-inner-loop model
# ---------------------------------------------------------------------------

def test_05_reaching_time_bound():
    rng = np.random.default_rng(5)
    worst = 0.0
    dt = 1e-6
    for _ in range(10):
        z0 = rng.uniform(-0.5, 0.5) * P.s0
        z_dot0 = rng.uniform(-0.05, 0.05)
        sigma0 = z_dot0 + G.c * z0
        bound = abs(sigma0) / (G.k - G.Q_z)
        q_z = G.Q_z * math.copysign(1.0, sigma0)    # pushes sigma away from zero
        t, _, _, sigma = exact_inner_loop(P, G, z0, z_dot0, q_z, dt, 1.5 * bound, "ideal")
        worst = max(worst, reaching_time(t, sigma) / bound)
    ok = worst <= 1.1
    assert report(5, "reaching time <= 1.1 |sigma0| / (k - Q_z)", ok,
                  f"worst ratio to bound {worst:.4f} over 10 initial conditions")


def test_06_surface_decay_rate():
    dt = 1e-6
    t, z, _, sigma = exact_inner_loop(P, G, 2e-3, 0.0, 0.0, dt, 0.3, "ideal")
    t_hit = reaching_time(t, sigma)
    window = (t > t_hit + 0.005) & (np.abs(z) > 1e-3 * 2e-3)
    slope = np.polyfit(t[window], np.log(np.abs(z[window])), 1)[0]
    rate = -slope
    ok = abs(rate - G.c) <= 0.05 * G.c
    assert report(6, "on-surface decay rate matches c = 17 within 5%", ok,
                  f"fitted rate {rate:.4f} 1/s")


def test_07_gain_condition_converse():
    weak = Gains(k=0.5 * G.Q_z)
    # exact inner loop: sigma_dot = -0.5 sgn(sigma) + 1 > 0
    t, _, _, sigma = exact_inner_loop(P, weak, 1e-4, 0.0, G.Q_z, 1e-6, 0.05, "ideal")
    stub_diverges = abs(sigma[-1]) > abs(sigma[0]) and abs(sigma[-1]) > 1e-4
    # full loop, ideal switching, constant worst-case disturbance for the whole run
    cfg = ScenarioConfig(duration=0.2, noise_variance=0.0, sgn_mode="ideal",
                         pulse=Pulse(0.0, 0.2, G.Q_z), gains=Gains(k=0.5 * G.Q_z, gamma=1e4))
    _, m = run(cfg)
    ok = stub_diverges and not m.converged
    assert report(7, "k = 0.5 Q_z under constant Q_z is flagged non-converged", ok,
                  f"exact-inner-loop sigma {sigma[0]:.3g} -> {sigma[-1]:.3g}; "
                  f"full loop converged={m.converged} ({_status(m)})")


# ---------------------------------------------------------------------------
# estimator
# ---------------------------------------------------------------------------

def test_08_inversion_matches_quadratic_root():
    rng = np.random.default_rng(8)
    eps = default_epsilon_grad(P)
    zs, targets = [], []
    while len(zs) < 100:
        z = rng.uniform(-0.6, 0.6) * P.s0
        i_star = rng.uniform(-0.75, 0.75) * P.i0
        # reachable from i_ref = 0 along a path whose gradient stays well above the guard
        if dv_di(P, z, i_star) * dv_di(P, z, 0.0) <= 0:
            continue
        if min(abs(dv_di(P, z, i_star)), abs(dv_di(P, z, 0.0))) < 10 * eps:
            continue
        zs.append(z)
        targets.append(i_star)
    z = np.array(zs)
    v_star = virtual_input(P, z, np.array(targets))

    gamma, dt = 1e5, 1e-6
    i_ref = np.zeros_like(z)
    v0 = np.max(np.abs(v_star - virtual_input(P, z, i_ref)))
    for _ in range(int(1.2 * v0 / (gamma * dt)) + 5000):
        i_ref = i_ref + dt * adaptive_rate(P, z, i_ref, v_star, gamma, "approx", G.p)

    oracle = np.array([continuity_root(P, zz, vv, 0.0) for zz, vv in zip(z, v_star)])
    worst = float(np.max(np.abs(i_ref - oracle)))
    ok = worst <= 1e-6
    assert report(8, "settled i_ref equals continuity-branch quadratic root (|di| <= 1e-6 A)", ok,
                  f"worst |di| {worst:.3g} A over 100 frozen pairs")


def test_09_singularity_guard():
    eps = default_epsilon_grad(P)
    try:
        adaptive_rate(P, -0.0025, 0.3125, 1.0, G.gamma)
        raised = False
    except SingularGradient:
        raised = True
    rng = np.random.default_rng(9)
    false_alarms = 0
    checked = 0
    for k in range(5000):
        z = rng.uniform(-0.99, 0.99) * P.s0
        if k % 2:
            i_ref = rng.uniform(-3.0, 3.0)
        else:
            # hug the curve: gradient is linear in i_ref with slope 2/(s0-z)^2 - 2/(s0+z)^2
            slope = 2 / (P.s0 - z) ** 2 - 2 / (P.s0 + z) ** 2
            i_ref = singular_current(P, z) + rng.uniform(-3, 3) * eps / abs(slope)
        if not check_singularity(P, z, i_ref, eps):
            continue
        checked += 1
        try:
            adaptive_rate(P, z, i_ref, rng.uniform(-1e4, 1e4), G.gamma)
        except SingularGradient:
            false_alarms += 1
    ok = raised and false_alarms == 0
    assert report(9, "curve point raises, points above the margin never do", ok,
                  f"curve point raised={raised}; {false_alarms} false alarms in {checked} points")


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------

def test_10_numerical_hygiene():
    zg, ig = np.meshgrid(np.linspace(-0.8 * P.s0, 0.8 * P.s0, 20),
                         np.linspace(-2 * P.i0, 2 * P.i0, 20))
    hz, hi = 1e-9, 1e-6
    fd_z = (virtual_input(P, zg + hz, ig) - virtual_input(P, zg - hz, ig)) / (2 * hz)
    fd_i = (virtual_input(P, zg, ig + hi) - virtual_input(P, zg, ig - hi)) / (2 * hi)
    err_z = float(np.max(np.abs(dv_dz(P, zg, ig) / fd_z - 1)))
    err_i = float(np.max(np.abs(dv_di(P, zg, ig) / fd_i - 1)))

    T = 1e-3
    ref = open_loop_endpoint(1e-8, T)
    ratio = abs(open_loop_endpoint(1e-4, T)[0] - ref[0]) / abs(open_loop_endpoint(5e-5, T)[0] - ref[0])

    cfg = ScenarioConfig(duration=0.01, seed=42)
    a, ma = run(cfg)
    b, mb = run(cfg)
    identical = np.array_equal(np.array(a), np.array(b)) and ma == mb

    ok = err_z <= 1e-6 and err_i <= 1e-6 and abs(ratio - 16) <= 0.3 * 16 and identical
    assert report(10, "gradients vs central differences, RK4 order, determinism", ok,
                  f"grad rel err {max(err_z, err_i):.2g}; RK4 ratio {ratio:.2f}; "
                  f"bit-identical={identical}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
