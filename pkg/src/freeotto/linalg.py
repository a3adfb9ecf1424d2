"""Dense Hermitian linear algebra shared by every engine.

Matrices are plain ``numpy`` arrays. Functions accept a single matrix of
shape ``(n, n)``; the propagator helpers also accept stacks ``(..., n, n)``
so that the momentum-space engine can treat all modes at once.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
UNITARY_TOL = 1e-10


class ValidationError(ValueError):
    """Raised when an operator violates its structural contract."""


class DomainError(ValueError):
    """Raised for physically meaningless arguments (e.g. negative temperature)."""


class Spectrum(NamedTuple):
    energies: np.ndarray
    vectors: np.ndarray


def _scale(a: np.ndarray) -> float:
    return max(1.0, float(np.abs(a).max(initial=0.0)))


def check_hermitian(H: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    H = np.asarray(H)
    if H.ndim < 2 or H.shape[-1] != H.shape[-2]:
        raise ValidationError(f"expected a square matrix, got shape {H.shape}")
    # tolerance is absolute for O(1) entries and relative beyond that
    err = np.abs(H - np.swapaxes(H, -1, -2).conj()).max(initial=0.0)
    if err > tol * _scale(H):
        raise ValidationError(f"matrix is not Hermitian (max asymmetry {err:.3e})")
    return H


def check_density(rho: np.ndarray) -> np.ndarray:
    """Raise ``ValidationError`` unless ``rho`` is a valid density operator."""
    rho = check_hermitian(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -POSITIVITY_TOL:
        raise ValidationError(f"negative eigenvalue {lo:.3e}")
    return rho


def eigh(H: np.ndarray) -> Spectrum:
    """Ascending eigen-decomposition ``H = V diag(e) V^dagger``."""
    H = check_hermitian(H)
    e, v = np.linalg.eigh(H)
    return Spectrum(e, v)


def gibbs_weights(energies: np.ndarray, T: float, degeneracy_tol: float = 1e-10) -> np.ndarray:
    """Normalised Boltzmann weights of ``energies`` at temperature ``T``.

    The spectrum is shifted by its minimum before exponentiation, so
    ``T = 0.001`` with energies of order 100 does not underflow. ``T = 0``
    returns the uniform distribution over the (numerically) degenerate
    ground level.
    """
    if T < 0 or np.isnan(T):
        raise DomainError(f"temperature must be non-negative, got {T}")
    e = np.asarray(energies, dtype=float)
    shifted = e - e.min()
    if T == 0:
        w = (shifted <= degeneracy_tol * max(1.0, np.abs(e).max())).astype(float)
    elif np.isinf(T):
        w = np.ones_like(shifted)
    else:
        w = np.exp(-shifted / T)
    return w / w.sum()


def gibbs_state(H: np.ndarray, T: float) -> np.ndarray:
    """Thermal state ``exp(-H/T)/Z`` (ground-space mixture at ``T = 0``)."""
    if T < 0:
        raise DomainError(f"temperature must be non-negative, got {T}")
    e, v = eigh(H)
    w = gibbs_weights(e, T)
    rho = (v * w) @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


def propagator(H: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` via eigen-decomposition; works on stacks of matrices."""
    H = check_hermitian(H)
    e, v = np.linalg.eigh(H)
    return (v * np.exp(-1j * t * e)[..., None, :]) @ np.swapaxes(v, -1, -2).conj()


def conjugate(U: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``U rho U^dagger`` (broadcasts over leading axes)."""
    return U @ rho @ np.swapaxes(U, -1, -2).conj()


def expectation(H: np.ndarray, rho: np.ndarray) -> float:
    """``Tr(H rho)`` as a real number."""
    H = np.asarray(H)
    rho = np.asarray(rho)
    if H.shape != rho.shape:
        raise ValidationError(f"dimension mismatch: {H.shape} vs {rho.shape}")
    val = np.einsum("ij,ji->", H, rho)
    if abs(val.imag) > 1e-10 * _scale(H):
        raise ValidationError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def unitarity_error(U: np.ndarray) -> float:
    n = U.shape[-1]
    return float(np.abs(np.swapaxes(U, -1, -2).conj() @ U - np.eye(n)).max())
