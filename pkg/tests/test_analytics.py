import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeotto.analytics import (
    golden_section, ground_state_probability_ltim, ground_state_probability_tim, prepare_analytic_two_spin,
    return_probability, run_cycle_analytic_two_spin, tau_k_optimizer, two_spin_coefficients, two_spin_energy_A,
    two_spin_energy_A_adiabatic, two_spin_energy_Aprime, two_spin_stationary_points,
)
from freeotto.cycle import CycleParams, prepare_dense, run_cycle
from freeotto.linalg import DomainError
from freeotto.models import ModelSpec

TIM2 = ModelSpec("TIM", 2)
FIG3 = CycleParams(h1=10, h2=0.1, T_H=100, T_C=0.01, tau1=0.1, tau2=0.1)
ADIA = FIG3.with_(tau1=math.inf, tau2=math.inf)


class TestCoefficients:
    def test_zero_temperature_limit(self):
        R1 = math.hypot(10, 1)
        c0 = two_spin_coefficients(10, 0.1, 1, 0.0)
        assert c0 == (pytest.approx(10 / (2 * R1)), 0.0)
        c = two_spin_coefficients(10, 0.1, 1, 1e-5)
        assert c.alpha == pytest.approx(c0.alpha, rel=1e-12) and abs(c.delta) < 1e-12

    def test_zero_field_limit(self):
        R1 = math.hypot(10, 1)
        assert two_spin_coefficients(10, 0.0, 1, 0.0) == (pytest.approx(10 / (4 * R1)), -0.25)
        c = two_spin_coefficients(10, 0.0, 1, 1e-4)
        assert c.alpha == pytest.approx(10 / (4 * R1)) and c.delta == pytest.approx(-0.25)

    def test_direct_formula_where_it_fits_in_floats(self):
        h1, h2, J, T = 3.0, 0.4, 0.9, 0.7
        a, b = 2 * J / T, 2 * math.hypot(h2, J) / T
        d = math.cosh(a) + math.cosh(b)
        c = two_spin_coefficients(h1, h2, J, T)
        assert c.alpha == pytest.approx(h1 * math.sinh(b) / (2 * math.hypot(h1, J) * d))
        assert c.delta == pytest.approx(-math.sinh(a) / (2 * d))

    @settings(max_examples=60, deadline=None)
    @given(h1=st.floats(0.1, 50), frac=st.floats(0.0, 0.999), J=st.floats(0.1, 3), T=st.floats(1e-6, 1e3))
    def test_signs_and_finiteness(self, h1, frac, J, T):
        c = two_spin_coefficients(h1, h1 * frac, J, T)
        assert math.isfinite(c.alpha) and math.isfinite(c.delta)
        assert c.alpha > 0 and c.delta <= 0

    def test_negative_temperature(self):
        with pytest.raises(DomainError):
            two_spin_coefficients(10, 0.1, 1, -1)


class TestTwoSpinEnergies:
    def test_Aprime_matches_adiabatic_simulation(self):
        pc = prepare_dense(TIM2, ADIA)
        c = two_spin_coefficients(10, 0.1, 1, 0.01)
        assert two_spin_energy_Aprime(c, 10) == pytest.approx(pc.E_Aprime, abs=1e-10)

    def test_Aprime_against_long_ramp(self):
        # a linear ramp starts and stops abruptly, leaving an O(1/tau^2) excitation
        c = two_spin_coefficients(10, 0.1, 1, 0.01)
        ref = two_spin_energy_Aprime(c, 10)
        dev = {t: prepare_dense(TIM2, FIG3.with_(tau2=t, dt_max=1e-2)).E_Aprime - ref for t in (50, 100)}
        assert 0 < dev[50] < 2e-3 * abs(ref)
        assert dev[50] / dev[100] == pytest.approx(4, rel=0.05)

    def test_exact_adiabatic_curve(self):
        pc = prepare_dense(TIM2, ADIA)
        c = two_spin_coefficients(10, 0.1, 1, 0.01)
        t = np.linspace(0, math.pi / 2, 25)
        np.testing.assert_allclose([pc.energy_A(x) for x in t], two_spin_energy_A_adiabatic(t, c, 10), atol=1e-10)

    def test_published_form_at_zero(self):
        c = two_spin_coefficients(10, 0.1, 1, 0.01)
        expected = -40 * c.alpha - (4 * c.alpha / 10) * math.cos(40) + 4 * c.delta
        assert two_spin_energy_A(0.0, c, 10) == pytest.approx(expected)

    def test_published_stationary_points(self):
        c = two_spin_coefficients(10, 0.1, 1, 0.01)
        for t in two_spin_stationary_points(10):
            slope = (two_spin_energy_A(t + 1e-6, c, 10) - two_spin_energy_A(t - 1e-6, c, 10)) / 2e-6
            assert abs(slope) < 1e-4
            assert math.tan(4 * t) == pytest.approx(math.sin(40) / 10)

    def test_large_field_minima(self):
        c = two_spin_coefficients(1000, 0.1, 1, 0.01)
        roots = two_spin_stationary_points(1000, tau_max=math.pi)
        n = np.round(roots / (math.pi / 4))
        np.testing.assert_allclose(roots, n * math.pi / 4, atol=1e-3)
        E = two_spin_energy_A(roots, c, 1000)
        assert np.all(E[n % 2 == 0] < E[n % 2 == 1].min())


class TestAnalyticEngine:
    def test_matches_adiabatic_dense_cycle(self):
        a = prepare_analytic_two_spin(TIM2, ADIA, form="adiabatic").result(0.3)
        d = prepare_dense(TIM2, ADIA).result(0.3)
        for q in ("E_A", "E_Aprime", "E_B", "E_C", "E_D", "W"):
            assert getattr(a, q) == pytest.approx(getattr(d, q), abs=1e-9)

    def test_published_form_is_default(self):
        r = run_cycle_analytic_two_spin(TIM2, FIG3.with_(tau_k=0.2))
        c = two_spin_coefficients(10, 0.1, 1, 0.01)
        assert r.E_A == pytest.approx(float(two_spin_energy_A(0.2, c, 10)))

    def test_rejects_other_models(self):
        with pytest.raises(ValueError):
            prepare_analytic_two_spin(ModelSpec("TIM", 4), FIG3)

    def test_zero_cold_temperature(self):
        p = ADIA.with_(T_C=0.0)
        a = prepare_analytic_two_spin(TIM2, p, form="adiabatic").result(0.5)
        d = prepare_dense(TIM2, p).result(0.5)
        assert a.E_A == pytest.approx(d.E_A, abs=1e-9)


class TestOptimizer:
    def test_golden_section(self):
        x, fx = golden_section(lambda t: (t - 0.3) ** 2, 0.0, 1.0, 1e-6)
        assert x == pytest.approx(0.3, abs=1e-6) and fx < 1e-11

    def test_published_stationary_point_found(self):
        opt = tau_k_optimizer(TIM2, FIG3, engine="analytic2spin")
        assert opt.tau_k_opt == pytest.approx(two_spin_stationary_points(10)[0], abs=1e-3)

    def test_adiabatic_minimum_at_period_multiples(self):
        opt = tau_k_optimizer(TIM2, ADIA)
        assert opt.tau_k_opt == pytest.approx(0.0, abs=1e-3)
        assert opt.E_A_min <= prepare_dense(TIM2, ADIA).E_Aprime + 1e-12

    def test_tie_break_picks_smallest(self):
        # the window holds two periods; both minima are equal
        opt = tau_k_optimizer(TIM2, ADIA.with_(T_C=0.0), tau_k_max=math.pi, grid_points=65)
        assert opt.tau_k_opt == pytest.approx(0.0, abs=1e-12)

    def test_finite_time_minimum(self):
        opt = tau_k_optimizer(TIM2, FIG3)
        assert opt.tau_k_opt == pytest.approx(0.30, abs=0.05)
        assert len(opt.scan) == 64 and opt.scan[0][0] == 0.0
        assert opt.E_A_min <= min(e for _, e in opt.scan)

    def test_ltim_window(self):
        opt = tau_k_optimizer(ModelSpec("LTIM", 2, B_z=1.0), CycleParams())
        assert opt.scan[-1][0] == pytest.approx(2 * math.pi)

    @pytest.mark.parametrize("kw", [dict(grid_points=8), dict(tau_k_max=0.0)])
    def test_bad_arguments(self, kw):
        with pytest.raises(ValueError):
            tau_k_optimizer(TIM2, FIG3, **kw)

    def test_non_engine_regime_still_optimises(self):
        p = CycleParams(h1=1.0, h2=0.9, T_H=0.2, T_C=0.1)
        assert not run_cycle(TIM2, p).is_engine
        opt = tau_k_optimizer(TIM2, p)
        assert opt.E_A_min <= run_cycle(TIM2, p).E_A + 1e-12


class TestReturnProbability:
    t = np.linspace(0, 2 * math.pi, 101)

    def test_tim_small_sizes(self):
        np.testing.assert_allclose(ground_state_probability_tim(2, 1.0, self.t), np.cos(2 * self.t) ** 2, atol=1e-14)
        expected = (np.cos(self.t) ** 4 + np.sin(self.t) ** 4) ** 2
        np.testing.assert_allclose(ground_state_probability_tim(4, 1.0, self.t), expected, atol=1e-14)

    @pytest.mark.parametrize("L", [2, 4, 6, 8])
    def test_tim_brute_force(self, L):
        np.testing.assert_allclose(ground_state_probability_tim(L, 0.7, self.t),
                                   return_probability(ModelSpec("TIM", L, J=0.7), self.t), atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(L=st.sampled_from([2, 4, 6, 10]), J=st.floats(0.2, 3), t=st.floats(0, 20))
    def test_tim_range_and_period(self, L, J, t):
        p = ground_state_probability_tim(L, J, t)
        assert -1e-12 <= p <= 1 + 1e-12
        assert ground_state_probability_tim(L, J, t + math.pi / J) == pytest.approx(p, abs=1e-9)

    def test_tim_maxima_independent_of_size(self):
        for L in (2, 4, 6, 8):
            p = return_probability(ModelSpec("TIM", L), self.t)
            top = self.t[p > 1 - 1e-9]
            np.testing.assert_allclose(top, np.round(top / (math.pi / 2)) * math.pi / 2, atol=1e-12)

    def test_zero_time(self):
        for L in (2, 4, 6):
            assert ground_state_probability_tim(L, 1.0, 0.0) == 1.0
        for L in (2, 4):
            assert ground_state_probability_ltim(L, 1.0, 1.0, 0.0) == 1.0

    def test_ltim_two_spins_brute_force(self):
        np.testing.assert_allclose(ground_state_probability_ltim(2, 1.0, 0.6, self.t),
                                   return_probability(ModelSpec("LTIM", 2, B_z=0.6), self.t), atol=1e-12)

    def test_ltim_maxima(self):
        for L in (2, 4):
            assert np.allclose(ground_state_probability_ltim(L, 1.0, 1.0, np.arange(5) * math.pi), 1.0)

    def test_unsupported(self):
        with pytest.raises(ValueError):
            ground_state_probability_ltim(6, 1.0, 1.0, 0.3)
        with pytest.raises(ValueError):
            ground_state_probability_tim(3, 1.0, 0.3)
