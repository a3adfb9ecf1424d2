"""Closed-form two-spin results, ground-state return probabilities and the
free-evolution time optimizer.

Two-spin conventions follow ``models``: ``H(h)`` has eigenvalues
``(-2R, -2J, 2J, 2R)`` with ``R = sqrt(h^2 + J^2)``. In the adiabatic limit
with the cold bath at ``T_C`` the state at A' is characterised by two
numbers ``alpha`` and ``delta``, see ``two_spin_coefficients``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .cycle import CycleParams, PreparedCycle
from .linalg import DomainError, gibbs_weights
from .models import Model, ModelSpec

GOLDEN_TOL = 1e-4
_INV_PHI = (math.sqrt(5) - 1) / 2


class TwoSpinAdiabaticCoefficients(NamedTuple):
    alpha: float
    delta: float


def two_spin_coefficients(h1: float, h2: float, J: float, T_C: float) -> TwoSpinAdiabaticCoefficients:
    """``alpha`` and ``delta`` of the adiabatic two-spin state at A'.

    With ``a = 2J/T_C`` and ``b = 2 sqrt(h2^2 + J^2)/T_C``::

        alpha = h1 sinh(b) / (2 sqrt(h1^2 + J^2) (cosh a + cosh b))
        delta = -sinh(a) / (2 (cosh a + cosh b))

    Every exponential is divided by ``exp(max(|a|, b))`` first, so tiny
    ``T_C`` does not overflow. ``T_C = 0`` returns the limit: ``alpha ->
    h1 / (2 R1)`` and ``delta -> 0`` for ``h2 != 0``; for ``h2 = 0`` both
    hyperbolic terms tie and ``alpha -> h1 / (4 R1)``, ``delta -> -sign(J)/4``.
    """
    if T_C < 0:
        raise DomainError(f"T_C must be non-negative, got {T_C}")
    R1 = math.hypot(h1, J)
    if T_C == 0:
        if h2 != 0:
            return TwoSpinAdiabaticCoefficients(h1 / (2 * R1), 0.0)
        return TwoSpinAdiabaticCoefficients(h1 / (4 * R1), -math.copysign(0.25, J))
    a = 2 * J / T_C
    b = 2 * math.hypot(h2, J) / T_C
    s = max(abs(a), b)
    ea_p, ea_m = math.exp(a - s), math.exp(-a - s)
    eb_p, eb_m = math.exp(b - s), math.exp(-b - s)
    denom = (ea_p + ea_m) + (eb_p + eb_m)  # 2 (cosh a + cosh b) e^{-s}
    alpha = h1 * (eb_p - eb_m) / (2 * R1 * denom)
    delta = -(ea_p - ea_m) / (2 * denom)
    return TwoSpinAdiabaticCoefficients(alpha, delta)


def two_spin_energy_Aprime(coeffs: TwoSpinAdiabaticCoefficients, h1: float, J: float = 1.0) -> float:
    """Adiabatic E_A' = -4 h1 alpha - 4 J^2 alpha / h1 + 4 J delta."""
    al, de = coeffs
    return -4 * h1 * al - 4 * J**2 * al / h1 + 4 * J * de


def two_spin_energy_A(tau_k, coeffs: TwoSpinAdiabaticCoefficients, h1: float, J: float = 1.0):
    """E_A(tau_k) in the published closed form, evaluated literally::

        -4 h1 a cos(4 J t) - (4 J^2 a / h1) cos(4 h1) + 4 J d - 4 J a sin(4 h1) sin(4 J t)

    This does not agree with direct simulation of the two-spin cycle; use
    ``two_spin_energy_A_adiabatic`` for the exact adiabatic result.
    """
    al, de = coeffs
    t = np.asarray(tau_k, dtype=float)
    return (-4 * h1 * al * np.cos(4 * J * t) - (4 * J**2 * al / h1) * np.cos(4 * h1) + 4 * J * de
            - 4 * J * al * np.sin(4 * h1) * np.sin(4 * J * t))


def two_spin_energy_A_adiabatic(tau_k, coeffs: TwoSpinAdiabaticCoefficients, h1: float, J: float = 1.0):
    """Exact adiabatic E_A(tau_k) = -4 h1 a cos(4 J t) - 4 J^2 a / h1 + 4 J d.

    Free evolution rotates only the coherence between the two
    field-polarised levels, so the constant terms are untouched.
    """
    al, de = coeffs
    t = np.asarray(tau_k, dtype=float)
    return -4 * h1 * al * np.cos(4 * J * t) - 4 * J**2 * al / h1 + 4 * J * de


def two_spin_stationary_points(h1: float, J: float = 1.0, tau_max: float | None = None) -> np.ndarray:
    """Roots of ``tan(4 J t) = (J / h1) sin(4 h1)`` in ``[0, tau_max]``.

    These are the stationary points of ``two_spin_energy_A``. The default
    window is one period, ``pi / (2|J|)``.
    """
    period = math.pi / (4 * abs(J))
    tau_max = 2 * period if tau_max is None else tau_max
    t0 = math.atan(J / h1 * math.sin(4 * h1)) / (4 * J)
    n = np.arange(math.floor(-t0 / period) - 1, math.ceil((tau_max - t0) / period) + 2)
    roots = t0 + n * period
    return np.sort(roots[(roots >= -1e-15) & (roots <= tau_max + 1e-15)].clip(0.0))


def _two_spin_levels(h: float, J: float) -> np.ndarray:
    R = math.hypot(h, J)
    return np.array([-2 * R, -2 * abs(J), 2 * abs(J), 2 * R])


def prepare_analytic_two_spin(spec: ModelSpec, params: CycleParams, *, form: str = "published") -> PreparedCycle:
    """Closed-form adiabatic two-spin TIM cycle.

    Both ramps are treated as adiabatic (the level order never changes for
    ``h != 0``); ``tau1`` and ``tau2`` only enter ``tau_total``. ``form``
    picks ``E_A(tau_k)``: ``"published"`` for ``two_spin_energy_A`` or
    ``"adiabatic"`` for the exact ``two_spin_energy_A_adiabatic``.
    """
    if spec.model is not Model.TIM or spec.L != 2:
        raise ValueError("the analytic engine covers the two-spin TIM only")
    if form not in ("published", "adiabatic"):
        raise ValueError(f"unknown form {form!r}")
    J, h1, h2 = spec.J, params.h1, params.h2
    e1, e2 = _two_spin_levels(h1, J), _two_spin_levels(h2, J)
    pB = gibbs_weights(e1, params.T_H)
    pD = gibbs_weights(e2, params.T_C)
    coeffs = two_spin_coefficients(h1, h2, J, params.T_C)
    fn = two_spin_energy_A if form == "published" else two_spin_energy_A_adiabatic

    def energy(tau_k):
        if tau_k < 0:
            raise ValueError("tau_k must be >= 0")
        return float(fn(tau_k, coeffs, h1, J))

    return PreparedCycle(
        params=params,
        E_B=math.fsum(pB * e1),
        E_C=math.fsum(pB * e2),
        E_D=math.fsum(pD * e2),
        E_Aprime=two_spin_energy_Aprime(coeffs, h1, J),
        _energy_A=energy,
    )


def run_cycle_analytic_two_spin(spec: ModelSpec, params: CycleParams, *, form: str = "published"):
    return prepare_analytic_two_spin(spec, params, form=form).result(params.tau_k)


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = GOLDEN_TOL):
    """Minimise a unimodal ``f`` on ``[a, b]`` until the bracket is shorter than ``tol``.

    Returns ``(x, f(x))`` for the best point evaluated.
    """
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def default_tau_k_window(spec: ModelSpec) -> float:
    """One period of the free evolution: ``pi/(2J)`` for TIM, ``2 pi`` for LTIM."""
    if spec.model is Model.TIM:
        return math.pi / (2 * abs(spec.J))
    return 2 * math.pi


@dataclass(frozen=True)
class TauKOptimum:
    tau_k_opt: float
    E_A_min: float
    scan: list  # [(tau_k, E_A), ...] on the uniform grid


def tau_k_optimizer(spec: ModelSpec, params: CycleParams, tau_k_max: float | None = None, grid_points: int = 64,
                    *, engine: str = "dense", prepared: PreparedCycle | None = None, tol: float = GOLDEN_TOL,
                    **engine_kw) -> TauKOptimum:
    """Free-evolution time that minimises E_A.

    The state at A' is computed once; E_A is scanned on ``grid_points``
    equally spaced times in ``[0, tau_k_max]`` and the best cell is refined
    by golden-section search. Among (numerically) equal minima the smallest
    ``tau_k`` wins, since a longer free stroke costs power.
    """
    from .engines import prepare

    if grid_points < 16:
        raise ValueError("grid_points must be >= 16")
    tau_k_max = default_tau_k_window(spec) if tau_k_max is None else tau_k_max
    if not tau_k_max > 0:
        raise ValueError("tau_k_max must be > 0")
    pc = prepared if prepared is not None else prepare(engine, spec, params, **engine_kw)
    grid = np.linspace(0.0, tau_k_max, grid_points)
    E = np.array([pc.energy_A(t) for t in grid])
    scale = max(1.0, float(np.abs(E).max()))
    i = int(np.flatnonzero(E <= E.min() + 1e-10 * scale)[0])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]
    t, e = golden_section(pc.energy_A, lo, hi, tol)
    if not e < E[i] - 1e-12 * scale:
        t, e = grid[i], E[i]
    return TauKOptimum(float(t), float(e), list(zip(grid.tolist(), E.tolist())))


def ground_state_probability_tim(L: int, J: float, tau_k):
    """``|cos(J t)^L + (i sin(J t))^L|^2`` for even ``L``.

    Probability of returning to the field-polarised state after free
    evolution under the Ising coupling.
    """
    if L < 2 or L % 2:
        raise ValueError(f"L must be even and >= 2, got {L}")
    t = np.asarray(tau_k, dtype=float)
    a = np.cos(J * t) ** L + (1j * np.sin(J * t)) ** L
    return np.abs(a) ** 2


def ground_state_probability_ltim(L: int, J: float, B_z: float, tau_k):
    """Return probability for the longitudinal-field chain, ``L`` in {2, 4}."""
    t = np.asarray(tau_k, dtype=float)
    cb, sb = np.cos(B_z * t), np.sin(B_z * t)
    if L == 2:
        return cb**4 * np.cos(2 * J * t) ** 2 + np.sin(2 * J * t) ** 2 * sb**4
    if L == 4:
        cj, sj = np.cos(J * t), np.sin(J * t)
        return (cb**4 * (cj**4 + sj**4) - 2 * sj**2 * cj**2 * sb**4) ** 2
    raise ValueError(f"closed form available for L in (2, 4) only, got {L}")


def return_probability(spec: ModelSpec, tau_k):
    """Exact ``|<+...+| exp(-i H0 tau_k) |+...+>|^2`` for any model and L.

    ``|+...+>`` is the ground state of ``H(h)`` for ``h -> infinity``, and
    ``H0`` is diagonal, so the amplitude is the mean of ``exp(-i E tau_k)``
    over all ``2^L`` configurations.
    """
    from .models import _diagonal_h0

    d = _diagonal_h0(spec)
    t = np.atleast_1d(np.asarray(tau_k, dtype=float))
    levels, counts = np.unique(d, return_counts=True)
    amp = (np.exp(-1j * np.outer(t, levels)) @ counts) / d.size
    p = np.abs(amp) ** 2
    return p if np.ndim(tau_k) else float(p[0])
