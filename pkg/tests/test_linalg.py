import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeotto.linalg import (
    DomainError, ValidationError, check_density, conjugate, eigh, expectation, gibbs_state, gibbs_weights,
    propagator, unitarity_error,
)
from freeotto.models import ModelSpec, build_split


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (A + A.conj().T) / 2


def random_density(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


class TestEigh:
    def test_pauli_x(self):
        e, v = eigh(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(e, [-1, 1])

    def test_two_spin_at_zero_field(self):
        H = build_split(ModelSpec("TIM", 2)).at(0.0)
        np.testing.assert_allclose(eigh(H).energies, [-2, -2, 2, 2])

    def test_identity(self):
        e, v = eigh(np.eye(3))
        np.testing.assert_allclose(e, 1)
        np.testing.assert_allclose(np.abs(v), np.eye(3))

    @pytest.mark.parametrize("seed", range(5))
    def test_reconstruction_and_unitarity(self, seed):
        H = random_hermitian(8, seed)
        e, v = eigh(H)
        assert np.all(np.diff(e) >= 0)
        assert np.abs(v @ np.diag(e) @ v.conj().T - H).max() <= 1e-9 * np.abs(H).max()
        assert unitarity_error(v) <= 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestGibbs:
    def test_infinite_temperature_is_maximally_mixed(self):
        np.testing.assert_allclose(gibbs_state(random_hermitian(4, 1), np.inf), np.eye(4) / 4, atol=1e-14)

    def test_zero_temperature_non_degenerate_is_projector(self):
        H = random_hermitian(5, 2)
        e, v = np.linalg.eigh(H)
        rho = gibbs_state(H, 0.0)
        np.testing.assert_allclose(rho, np.outer(v[:, 0], v[:, 0].conj()), atol=1e-12)

    def test_zero_temperature_degenerate_is_uniform_mixture(self):
        rho = gibbs_state(np.diag([-1.0, -1.0, 3.0]), 0.0)
        np.testing.assert_allclose(np.diag(rho).real, [0.5, 0.5, 0.0])

    def test_two_spin_boltzmann_weights(self):
        H = build_split(ModelSpec("TIM", 2)).at(0.1)
        T = 0.01
        e, v = np.linalg.eigh(H)
        w = np.exp(-(e - e[0]) / T)
        w /= w.sum()
        rho = gibbs_state(H, T)
        np.testing.assert_allclose(np.einsum("ji,jk,ki->i", v.conj(), rho, v).real, w, atol=1e-12)

    def test_low_temperature_does_not_underflow(self):
        w = gibbs_weights(np.array([-40.0, -39.0, 40.0]), 0.001)
        assert np.isfinite(w).all() and w[0] == pytest.approx(1.0)

    def test_negative_temperature(self):
        with pytest.raises(DomainError):
            gibbs_state(np.eye(2), -1.0)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000), T=st.floats(0.01, 100), c=st.floats(-1e3, 1e3))
    def test_shift_invariance(self, seed, T, c):
        H = random_hermitian(4, seed)
        np.testing.assert_allclose(gibbs_state(H, T), gibbs_state(H + c * np.eye(4), T), atol=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000), T=st.floats(0.0, 1e3))
    def test_output_is_density_operator(self, seed, T):
        check_density(gibbs_state(random_hermitian(6, seed) * 10, T))


class TestPropagator:
    def test_zero_time(self):
        np.testing.assert_allclose(propagator(random_hermitian(4, 0), 0.0), np.eye(4), atol=1e-14)

    def test_diagonal(self):
        d = np.array([0.3, -1.2, 2.0])
        np.testing.assert_allclose(propagator(np.diag(d), 0.7), np.diag(np.exp(-0.7j * d)), atol=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000), t1=st.floats(-5, 5), t2=st.floats(-5, 5))
    def test_group_property(self, seed, t1, t2):
        H = random_hermitian(5, seed)
        U = propagator(H, t1) @ propagator(H, t2)
        np.testing.assert_allclose(U, propagator(H, t1 + t2), atol=1e-9)
        assert unitarity_error(U) <= 1e-10

    def test_stack(self):
        Hs = np.stack([random_hermitian(3, s) for s in range(4)])
        Us = propagator(Hs, 1.3)
        for H, U in zip(Hs, Us):
            np.testing.assert_allclose(U, propagator(H, 1.3), atol=1e-13)

    @pytest.mark.parametrize("seed", range(5))
    def test_conjugation_preserves_spectrum(self, seed):
        rho = random_density(6, seed)
        out = conjugate(propagator(random_hermitian(6, seed + 100), 2.5), rho)
        np.testing.assert_allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho), atol=1e-9)
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-9)


class TestExpectation:
    def test_identity(self):
        assert expectation(np.eye(4), random_density(4, 3)) == pytest.approx(1.0)

    def test_ground_projector(self):
        H = random_hermitian(4, 4)
        e, v = np.linalg.eigh(H)
        assert expectation(H, np.outer(v[:, 0], v[:, 0].conj())) == pytest.approx(e[0])

    def test_two_spin_thermal_average(self):
        H = build_split(ModelSpec("TIM", 2)).at(0.1)
        e = np.linalg.eigvalsh(H)
        w = np.exp(-(e - e[0]) / 0.5)
        assert expectation(H, gibbs_state(H, 0.5)) == pytest.approx(np.dot(w, e) / w.sum(), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            expectation(np.eye(2), np.eye(3) / 3)

    def test_imaginary_residue_rejected(self):
        with pytest.raises(ValidationError):
            expectation(np.array([[0, 1], [0, 0]], complex), np.array([[0, 0], [1j, 0]]))


class TestCheckDensity:
    def test_trace(self):
        with pytest.raises(ValidationError):
            check_density(np.eye(2))

    def test_positivity(self):
        with pytest.raises(ValidationError):
            check_density(np.diag([1.5, -0.5]))
