"""Four-stroke Otto cycle with an optional free-evolution segment.

Strokes (energies measured with ``E_X = Tr(H_X rho_X)``):

    A  -> B   thermalise with H(h1) at T_H
    B  -> C   ramp h1 -> h2 over tau1
    C  -> D   thermalise with H(h2) at T_C
    D  -> A'  ramp h2 -> h1 over tau2
    A' -> A   evolve with H0 alone for tau_k (h switched off)

Thermalisation is an instantaneous replacement by the Gibbs state; the bath
contact time ``tau_bath`` only enters the power. ``hbar = k_B = 1``.
An infinite ramp duration means the adiabatic limit.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import conjugate, gibbs_weights
from .models import DEFAULT_L_MAX, LinearRamp, ModelSpec, SectorSplit, SplitHamiltonian, sector_splits

SCHEMES = ("cf4", "midpoint")

# fourth-order commutator-free Magnus coefficients
_C1 = 0.5 - math.sqrt(3) / 6
_C2 = 0.5 + math.sqrt(3) / 6
_A1 = (3 - 2 * math.sqrt(3)) / 12
_A2 = (3 + 2 * math.sqrt(3)) / 12


@dataclass(frozen=True)
class CycleParams:
    h1: float = 10.0
    h2: float = 0.2
    T_H: float = 100.0
    T_C: float = 0.001
    tau1: float = 0.1
    tau2: float = 0.1
    tau_bath: float = 0.2
    tau_k: float = 0.0
    dt_max: float = 1e-3
    scheme: str = "cf4"

    def __post_init__(self):
        if not self.h1 > self.h2:
            raise ValueError(f"engine regime needs h1 > h2 (got {self.h1}, {self.h2})")
        if not self.T_H > self.T_C:
            raise ValueError(f"engine regime needs T_H > T_C (got {self.T_H}, {self.T_C})")
        if self.T_C < 0:
            raise ValueError("temperatures must be >= 0")
        for name in ("tau1", "tau2", "tau_bath", "tau_k"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be > 0")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")

    def with_(self, **kw) -> "CycleParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class CycleResult:
    E_A: float
    E_Aprime: float
    E_B: float
    E_C: float
    E_D: float
    Q_in: float
    Q_out: float
    W: float
    eta: float
    P: float
    is_engine: bool
    tau_k: float
    tau_total: float
    states: dict | None = field(default=None, repr=False, compare=False)

    @property
    def free_gain(self) -> float:
        """``E_A - E_A'``; negative when free evolution helps."""
        return self.E_A - self.E_Aprime

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("states")
        return d


def assemble_result(params: CycleParams, E_A, E_Aprime, E_B, E_C, E_D, tau_k, states=None) -> CycleResult:
    Q_in = E_B - E_A
    Q_out = E_D - E_C
    W = -(Q_in + Q_out)
    eta = -W / Q_in if Q_in != 0 else math.nan
    tau_total = params.tau1 + params.tau2 + params.tau_bath + tau_k
    P = W / tau_total if tau_total > 0 else math.nan
    is_engine = bool(Q_in > 0 and Q_out < 0 and W < 0)
    return CycleResult(
        E_A=float(E_A), E_Aprime=float(E_Aprime), E_B=float(E_B), E_C=float(E_C), E_D=float(E_D),
        Q_in=float(Q_in), Q_out=float(Q_out), W=float(W), eta=float(eta), P=float(P),
        is_engine=is_engine, tau_k=float(tau_k), tau_total=float(tau_total), states=states,
    )


# ---------------------------------------------------------------------------
# unitary strokes


def _expm_herm(M: np.ndarray, dt: float) -> np.ndarray:
    e, v = np.linalg.eigh(M)
    return (v * np.exp(-1j * dt * e)[..., None, :]) @ np.swapaxes(v, -1, -2).conj()


def ramp_propagator(H0, H1, protocol: LinearRamp, dt_max: float, scheme: str = "cf4") -> np.ndarray:
    """Time-ordered propagator of ``H0 + h(t) H1`` along a finite ramp.

    ``[0, duration]`` is cut into equal steps no longer than ``dt_max``. Each
    step is a product of exact exponentials of Hermitian matrices, so the
    result is unitary to rounding. ``H0``/``H1`` may be stacks ``(..., n, n)``.
    """
    H0 = np.asarray(H0)
    H1 = np.asarray(H1)
    n = H0.shape[-1]
    U = np.broadcast_to(np.eye(n, dtype=complex), np.broadcast_shapes(H0.shape, H1.shape)).copy()
    tau = protocol.duration
    if tau == 0:
        return U
    if not math.isfinite(tau):
        raise ValueError("infinite ramp: use adiabatic_transport")
    steps = max(1, math.ceil(tau / dt_max - 1e-9))
    dt = tau / steps
    ha, hb = protocol.h_start, protocol.h_end
    for s in range(steps):
        if scheme == "midpoint":
            h = ha + (hb - ha) * (s + 0.5) / steps
            step = _expm_herm(H0 + h * H1, dt)
        else:
            f1 = ha + (hb - ha) * (s + _C1) / steps
            f2 = ha + (hb - ha) * (s + _C2) / steps
            first = _expm_herm(0.5 * H0 + (_A2 * f1 + _A1 * f2) * H1, dt)
            second = _expm_herm(0.5 * H0 + (_A1 * f1 + _A2 * f2) * H1, dt)
            step = second @ first
        U = step @ U
    return U


def evolve_ramp(rho, split, protocol: LinearRamp, dt_max: float = 1e-3, scheme: str = "cf4") -> np.ndarray:
    """Solve ``d rho/dt = -i [H(h(t)), rho]`` across one ramp stroke."""
    H0 = np.asarray(split.H0.toarray() if hasattr(split.H0, "toarray") else split.H0)
    H1 = np.asarray(split.H1.toarray() if hasattr(split.H1, "toarray") else split.H1)
    if not math.isfinite(protocol.duration):
        return adiabatic_transport(rho, SplitHamiltonian(H0, H1), protocol.h_start, protocol.h_end)
    U = ramp_propagator(H0, H1, protocol, dt_max, scheme)
    return conjugate(U, rho)


def free_evolve(rho, H0, tau_k: float) -> np.ndarray:
    """``rho -> U rho U^dagger`` with ``U = exp(-i H0 tau_k)``.

    ``H0`` may be passed as its diagonal (1-D array); a diagonal matrix is
    detected and handled with phases only.
    """
    if tau_k < 0:
        raise ValueError("tau_k must be >= 0")
    H0 = np.asarray(H0)
    if H0.ndim == 2 and not np.any(H0 - np.diag(np.diagonal(H0))):
        H0 = np.diagonal(H0).real
    if H0.ndim == 1:
        ph = np.exp(-1j * tau_k * H0)
        return ph[:, None] * rho * ph.conj()[None, :]
    return conjugate(_expm_herm(H0, tau_k), rho)


def _track_eigenvectors(split, h_start, h_end, steps):
    _, V = np.linalg.eigh(split.at(h_start))
    V0 = V
    for h in np.linspace(h_start, h_end, steps + 1)[1:]:
        _, Wv = np.linalg.eigh(split.at(h))
        overlap = np.abs(V.conj().T @ Wv) ** 2
        _, cols = linear_sum_assignment(-overlap)
        V = Wv[:, cols]
    return V0, V


def adiabatic_transport(rho, split, h_start: float, h_end: float, steps: int = 400) -> np.ndarray:
    """Adiabatic-limit image of a state diagonal in the ``H(h_start)`` eigenbasis.

    Eigenvectors are followed along ``h`` by maximum-overlap matching, so
    symmetry-protected level crossings are passed through while each level
    keeps its population. Coherences between eigenstates are dropped.
    """
    V0, V1 = _track_eigenvectors(split, h_start, h_end, steps)
    pops = np.einsum("ji,jk,ki->i", V0.conj(), rho, V0).real
    out = (V1 * pops) @ V1.conj().T
    return 0.5 * (out + out.conj().T)


# ---------------------------------------------------------------------------
# engines


@dataclass
class PreparedCycle:
    """Everything up to A'; ``energy_A(tau_k)`` and ``result(tau_k)`` finish it."""

    params: CycleParams
    E_B: float
    E_C: float
    E_D: float
    E_Aprime: float
    _energy_A: Callable[[float], float]
    _states: Callable[[float], dict] | None = None

    def energy_A(self, tau_k: float) -> float:
        return self._energy_A(tau_k)

    def result(self, tau_k: float | None = None, keep_states: bool = False) -> CycleResult:
        tk = self.params.tau_k if tau_k is None else tau_k
        states = self._states(tk) if keep_states and self._states is not None else None
        return assemble_result(
            self.params, self.energy_A(tk), self.E_Aprime, self.E_B, self.E_C, self.E_D, tk, states
        )


def _fsum_real(values) -> float:
    return math.fsum(float(v) for v in values)


def _trace_products(Hs, rhos, mults) -> float:
    return _fsum_real(m * np.einsum("ij,ji->", H, r).real for H, r, m in zip(Hs, rhos, mults))


def _block_gibbs(Hs, T, mults):
    spectra = [np.linalg.eigh(H) for H in Hs]
    energies = np.concatenate([e for e, _ in spectra])
    counts = np.concatenate([np.full(len(e), m) for (e, _), m in zip(spectra, mults)])
    g = gibbs_weights(energies, T)
    w = g / np.dot(counts, g)
    out, start = [], 0
    for e, v in spectra:
        wb = w[start:start + len(e)]
        start += len(e)
        r = (v * wb) @ v.conj().T
        out.append(0.5 * (r + r.conj().T))
    return out


def _ramp_blocks(rhos, sectors, h_start, h_end, tau, params):
    if math.isinf(tau):
        return [adiabatic_transport(r, s, h_start, h_end) for r, s in zip(rhos, sectors)]
    ramp = LinearRamp(h_start, h_end, tau)
    return [conjugate(ramp_propagator(s.H0, s.H1, ramp, params.dt_max, params.scheme), r)
            for r, s in zip(rhos, sectors)]


def _phase_energy(HA_blocks, rho_blocks, d_blocks, mults):
    # E(tau) = sum_ij H_ji rho_ij exp(-i (d_i - d_j) tau)
    parts = [(m * H.T * r, d[:, None] - d[None, :])
             for H, r, d, m in zip(HA_blocks, rho_blocks, d_blocks, mults)]

    def energy(tau_k: float) -> float:
        if tau_k < 0:
            raise ValueError("tau_k must be >= 0")
        return _fsum_real(np.sum(M * np.exp(-1j * tau_k * D)).real for M, D in parts)

    return energy


def prepare_dense(spec: ModelSpec, params: CycleParams, *, l_max: int = DEFAULT_L_MAX,
                  use_symmetry: bool = True, fold_mirror: bool = True) -> PreparedCycle:
    sectors = sector_splits(spec, l_max=l_max, use_symmetry=use_symmetry, fold_mirror=fold_mirror)
    mults = [s.multiplicity for s in sectors]
    HA = [s.at(params.h1) for s in sectors]
    HD = [s.at(params.h2) for s in sectors]

    rho_B = _block_gibbs(HA, params.T_H, mults)
    rho_C = _ramp_blocks(rho_B, sectors, params.h1, params.h2, params.tau1, params)
    rho_D = _block_gibbs(HD, params.T_C, mults)
    rho_Ap = _ramp_blocks(rho_D, sectors, params.h2, params.h1, params.tau2, params)
    d_blocks = [s.h0_diag for s in sectors]

    def states(tau_k):
        rho_A = [free_evolve(r, d, tau_k) for r, d in zip(rho_Ap, d_blocks)]
        full = lambda blocks: sum(s.embed(b) for s, b in zip(sectors, blocks))  # noqa: E731
        return {"B": full(rho_B), "C": full(rho_C), "D": full(rho_D), "Aprime": full(rho_Ap), "A": full(rho_A)}

    return PreparedCycle(
        params=params,
        E_B=_trace_products(HA, rho_B, mults),
        E_C=_trace_products(HD, rho_C, mults),
        E_D=_trace_products(HD, rho_D, mults),
        E_Aprime=_trace_products(HA, rho_Ap, mults),
        _energy_A=_phase_energy(HA, rho_Ap, d_blocks, mults),
        _states=None if fold_mirror and use_symmetry else states,
    )


def run_cycle(spec: ModelSpec, params: CycleParams, *, keep_states: bool = False,
              l_max: int = DEFAULT_L_MAX, use_symmetry: bool = True) -> CycleResult:
    """Run one cycle with density matrices in the real-space spin basis.

    The computation is done sector by sector in the lattice-momentum basis,
    which is exact and much cheaper than the full ``2^L`` space. With
    ``keep_states`` the five stroke-endpoint states are returned as full
    ``2^L x 2^L`` matrices under ``result.states``.
    """
    prep = prepare_dense(spec, params, l_max=l_max, use_symmetry=use_symmetry, fold_mirror=not keep_states)
    return prep.result(params.tau_k, keep_states=keep_states)


class DegenerateGroundState(RuntimeError):
    pass


def prepare_statevector(spec: ModelSpec, params: CycleParams, *, l_max: int = DEFAULT_L_MAX,
                        degeneracy_tol: float = 1e-10) -> PreparedCycle:
    """Like :func:`prepare_dense`, but D -> A -> A' carries a pure state.

    Requires ``T_C = 0``; raises :class:`DegenerateGroundState` when the
    ground level of ``H(h2)`` is degenerate.
    """
    if params.T_C != 0:
        raise ValueError("the state-vector engine needs T_C = 0")
    sectors = sector_splits(spec, l_max=l_max, fold_mirror=False)
    mults = [1] * len(sectors)
    HA = [s.at(params.h1) for s in sectors]
    HD = [s.at(params.h2) for s in sectors]
    rho_B = _block_gibbs(HA, params.T_H, mults)
    rho_C = _ramp_blocks(rho_B, sectors, params.h1, params.h2, params.tau1, params)

    spectra = [np.linalg.eigh(H) for H in HD]
    lows = np.array([e[0] for e, _ in spectra])
    e0 = lows.min()
    all_e = np.concatenate([e for e, _ in spectra])
    if np.sum(all_e - e0 <= degeneracy_tol * max(1.0, abs(e0))) > 1:
        raise DegenerateGroundState("ground level of H(h2) is degenerate")
    b = int(np.argmin(lows))
    sec = sectors[b]
    psi_D = spectra[b][1][:, 0]
    tau2 = params.tau2
    if math.isinf(tau2):
        V0, V1 = _track_eigenvectors(sec, params.h2, params.h1, 400)
        psi = V1[:, 0]
    else:
        U = ramp_propagator(sec.H0, sec.H1, LinearRamp(params.h2, params.h1, tau2), params.dt_max, params.scheme)
        psi = U @ psi_D
    H_A = HA[b]
    d = sec.h0_diag

    def energy(tau_k):
        phi = np.exp(-1j * tau_k * d) * psi
        return float(np.vdot(phi, H_A @ phi).real)

    def states(tau_k):
        embed = (lambda v: sec.basis @ v) if sec.basis is not None else (lambda v: v)
        phi = np.exp(-1j * tau_k * d) * psi
        return {"psi_D": embed(psi_D), "psi_Aprime": embed(psi), "psi_A": embed(phi)}

    return PreparedCycle(
        params=params,
        E_B=_trace_products(HA, rho_B, mults),
        E_C=_trace_products(HD, rho_C, mults),
        E_D=float(spectra[b][0][0]),
        E_Aprime=energy(0.0),
        _energy_A=energy,
        _states=states,
    )


def run_cycle_statevector(spec: ModelSpec, params: CycleParams, *, keep_states: bool = False,
                          l_max: int = DEFAULT_L_MAX) -> CycleResult:
    """Pure-state variant for ``T_C = 0``; falls back to :func:`run_cycle`."""
    try:
        prep = prepare_statevector(spec, params, l_max=l_max)
    except DegenerateGroundState:
        return run_cycle(spec, params, keep_states=keep_states, l_max=l_max)
    return prep.result(params.tau_k, keep_states=keep_states)


def convergence_check(spec: ModelSpec, params: CycleParams, **kw) -> float:
    """Largest change of any stroke energy when ``dt_max`` is halved."""
    a = run_cycle(spec, params, **kw)
    b = run_cycle(spec, params.with_(dt_max=params.dt_max / 2), **kw)
    keys = ("E_A", "E_Aprime", "E_B", "E_C", "E_D")
    return max(abs(getattr(a, k) - getattr(b, k)) for k in keys)
