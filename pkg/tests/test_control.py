import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from amb_smc.control import (GainConditionError, Gains, Reference, current_control, position_control,
                             sgn, sgn_approx, sliding_variable, switching)
from amb_smc.plant import Disturbances, PlantParams, PlantState, RotorContact, plant_derivative

P = PlantParams()
G = Gains()


class TestGains:
    def test_defaults_are_reference_tuning(self):
        assert (G.c, G.k, G.gamma, G.k_i, G.p, G.Q_z) == (17, 25, 1000, 152, 25, 1)

    @pytest.mark.parametrize("bad", [dict(c=0), dict(gamma=0), dict(p=0.5), dict(k=-1), dict(Q_z=-1)])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            Gains(**bad)

    def test_conditions(self):
        G.check_conditions()
        with pytest.raises(GainConditionError, match="k > Q_z"):
            Gains(k=10, Q_z=25).check_conditions()
        with pytest.raises(GainConditionError, match="k_i > Q_i"):
            Gains(k_i=1, Q_i=2).check_conditions()


class TestSignum:
    def test_zero(self):
        assert sgn_approx(0.0, 25) == 0.0
        assert sgn(0.0) == 0.0

    def test_asymptote(self):
        assert sgn_approx(1e12, 25) == pytest.approx(1.0, abs=1e-12)
        assert sgn_approx(-1e12, 25) == pytest.approx(-1.0, abs=1e-12)

    @given(st.floats(-1e6, 1e6), st.floats(1, 1e4))
    def test_odd_and_bounded(self, x, p):
        assert sgn_approx(-x, p) == -sgn_approx(x, p)
        assert abs(sgn_approx(x, p)) <= 1.0

    def test_arrays(self):
        x = np.array([-2.0, 0.0, 3.0])
        np.testing.assert_array_equal(sgn(x), [-1, 0, 1])
        np.testing.assert_allclose(sgn_approx(x, 25), 2 / np.pi * np.arctan(25 * x))

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            switching(1.0, "tanh", 25)


class TestSlidingVariable:
    def test_on_reference(self):
        ref = Reference(1e-4, 2e-3, 0.0)
        assert sliding_variable(PlantState(1e-4, 2e-3, 0.0), ref, 17) == 0.0

    def test_position_error(self):
        assert sliding_variable(PlantState(1e-3, 0.0, 0.0), Reference(), 17) == pytest.approx(0.017)

    def test_velocity_error(self):
        assert sliding_variable(PlantState(0.0, 5e-3, 0.0), Reference(), 3.0) == 5e-3


class TestPositionControl:
    def test_hover_demand(self):
        v = position_control(P, PlantState(0.0, 0.0, 0.0), Reference(), G, "approx")
        assert v == pytest.approx(4 * 0.588 * 9.81 / 0.331298, rel=1e-9)

    def test_stiffness_term(self):
        plant = PlantParams(g=0.0)
        z = 4e-4
        v = position_control(plant, PlantState(z, 0.0, 0.0), Reference(), Gains(k=0.0), "ideal")
        assert v == pytest.approx(-8 * plant.k_z * z / plant.kappa, rel=1e-12)

    def test_ideal_and_approx_agree_far_from_surface(self):
        state = PlantState(0.0, 1e12, 0.0)
        ideal = position_control(P, state, Reference(), G, "ideal")
        approx = position_control(P, state, Reference(), G, "approx")
        assert approx == pytest.approx(ideal, rel=1e-12)

    @given(st.floats(-1e-3, 1e-3), st.floats(-1e-3, 1e-3), st.floats(-0.01, 0.01),
           st.floats(-0.01, 0.01))
    def test_decreasing_in_sigma(self, z, r1, r2, z_dot):
        # shifting r moves only sigma; the remaining bracket terms do not depend on r
        assume(abs(r1 - r2) > 1e-6)
        lo, hi = sorted((r1, r2))
        state = PlantState(z, z_dot, 0.0)
        v_sigma_high = position_control(P, state, Reference(lo, 0.0, 0.0), G, "approx")
        v_sigma_low = position_control(P, state, Reference(hi, 0.0, 0.0), G, "approx")
        assert v_sigma_high < v_sigma_low

    def test_contact(self):
        with pytest.raises(RotorContact):
            position_control(P, PlantState(P.s0, 0.0, 0.0), Reference(), G)

    def test_substitution_cancels_to_sliding_dynamics(self):
        # v = v* exactly: sigma_dot = z_ddot - r_ddot + c (z_dot - r_dot) = -k S(sigma) + q_z
        from amb_smc.plant import axial_acceleration

        rng = np.random.default_rng(3)
        for _ in range(50):
            state = PlantState(rng.uniform(-4e-3, 4e-3), rng.uniform(-0.1, 0.1), 0.0)
            ref = Reference(*rng.uniform(-1e-3, 1e-3, 3))
            q_z = rng.uniform(-1, 1)
            v = position_control(P, state, ref, G, "approx")
            sigma_dot = (axial_acceleration(P, state.z, v, q_z) - ref.r_ddot
                         + G.c * (state.z_dot - ref.r_dot))
            sigma = sliding_variable(state, ref, G.c)
            assert sigma_dot == pytest.approx(-G.k * sgn_approx(sigma, G.p) + q_z, abs=1e-9)


class TestCurrentControl:
    def test_on_reference_balances_resistance(self):
        i = 0.03
        u = current_control(P, PlantState(0.0, 0.0, i), i, 0.0, G, "approx")
        assert u == pytest.approx(P.R * i, rel=1e-12)

    def test_feedforward_only(self):
        d = 0.7
        u = current_control(P, PlantState(0.0, 0.0, 0.0), 0.0, d, G, "approx")
        assert u == pytest.approx(P.kappa / (2 * P.s0) * d, rel=1e-12)

    @pytest.mark.parametrize("mode", ["approx", "ideal"])
    def test_closed_loop_inverts_current_dynamics(self, mode):
        rng = np.random.default_rng(0)
        for _ in range(100):
            state = PlantState(rng.uniform(-0.9, 0.9) * P.s0, rng.uniform(-0.5, 0.5),
                               rng.uniform(-2, 2) * P.i0)
            i_ref = rng.uniform(-2, 2) * P.i0
            di_ref = rng.uniform(-50, 50)
            u = current_control(P, state, i_ref, di_ref, G, mode)
            di = plant_derivative(P, state, u, Disturbances())[2]
            expected = -G.k_i * switching(state.i - i_ref, mode, G.p)
            scale = max(abs(expected), abs(di_ref), abs(di), 1.0)
            assert abs((di - di_ref) - expected) <= 1e-9 * scale

    def test_contact(self):
        with pytest.raises(RotorContact):
            current_control(P, PlantState(-P.s0, 0.0, 0.0), 0.0, 0.0, G)
