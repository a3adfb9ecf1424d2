"""Momentum-space Otto cycle for the periodic transverse-field Ising chain.

After a Jordan-Wigner transformation the chain splits into independent
fermion modes. A pair ``(k, -k)`` with ``0 < k < pi`` lives in a
4-dimensional Fock space, ordered ``(|k,-k>, |k>, |-k>, |0>)``, with

    H_k(h) = [[2(h + J cos k), 0, 0, 2 J sin k],
              [0,              0, 0, 0         ],
              [0,              0, 0, 0         ],
              [2 J sin k,      0, 0, -2(h + J cos k)]]

The spin chain has two fermion-parity sectors with different momentum
grids:

* even parity: antiperiodic grid ``k = (2m + 1) pi / L`` (``L/2`` pairs);
* odd parity:  periodic grid ``k = 2 pi m / L``, whose ``k = 0`` and
  ``k = pi`` modes are unpaired two-level systems with energies
  ``+-(h + J cos k)``.

Within each sector the Gibbs state of the unconstrained Fock space is
projected onto the right total parity. Mode parities are conserved by every
stroke, so this is exact and still costs O(L). ``parity_projected=False``
keeps only the antiperiodic modes without any projection, i.e. the plain
sum over ``H_k`` of the per-mode 4x4 states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cycle import CycleParams, CycleResult, PreparedCycle, ramp_propagator
from .linalg import DomainError, conjugate
from .models import LinearRamp

L_MAX_KSPACE = 100_000

PAIR_PARITY = np.array([1, -1, -1, 1])
SINGLE_PARITY = np.array([-1, 1])  # (|1>, |0>)
_PAIR_BLOCKS = (np.array([0, 3]), np.array([1, 2]))
_SINGLE_BLOCKS = (np.array([0]), np.array([1]))


def build_mode_hamiltonian(k: float, h: float, J: float = 1.0) -> np.ndarray:
    if not 0 < k < np.pi:
        raise ValueError(f"k = {k} must lie strictly inside (0, pi)")
    H0, H1 = _pair_split(np.array([k]), J)
    return (H0 + h * H1)[0]


def mode_momenta(L: int) -> np.ndarray:
    """Antiperiodic grid ``(2m + 1) pi / L``, ``m = 0 .. L/2 - 1``."""
    _check_L(L)
    return (2 * np.arange(L // 2) + 1) * np.pi / L


def _check_L(L):
    if int(L) != L or L < 2 or L % 2:
        raise ValueError(f"the momentum-space engine needs an even L >= 2, got {L}")
    if L > L_MAX_KSPACE:
        raise ValueError(f"L = {L} exceeds {L_MAX_KSPACE}")


def _pair_split(k: np.ndarray, J: float):
    M = len(k)
    H0 = np.zeros((M, 4, 4))
    H0[:, 0, 0] = 2 * J * np.cos(k)
    H0[:, 3, 3] = -2 * J * np.cos(k)
    H0[:, 0, 3] = H0[:, 3, 0] = 2 * J * np.sin(k)
    H1 = np.diag([2.0, 0.0, 0.0, -2.0])
    return H0, np.broadcast_to(H1, (M, 4, 4))


def _single_split(k: np.ndarray, J: float):
    M = len(k)
    H0 = np.zeros((M, 2, 2))
    H0[:, 0, 0] = J * np.cos(k)
    H0[:, 1, 1] = -J * np.cos(k)
    return H0, np.broadcast_to(np.diag([1.0, -1.0]), (M, 2, 2))


@dataclass(frozen=True)
class ModeEnsemble:
    """Per-mode states on the antiperiodic grid (no parity projection)."""

    L: int
    k: np.ndarray
    rho: np.ndarray  # (L/2, 4, 4)


def thermal_ensemble(L: int, h: float, T: float, J: float = 1.0) -> ModeEnsemble:
    k = mode_momenta(L)
    H0, H1 = _pair_split(k, J)
    rho, _ = _gibbs_stack(H0 + h * H1, T)
    return ModeEnsemble(L, k, rho)


@dataclass(frozen=True)
class _Family:
    """A stack of identical-dimension modes."""

    k: np.ndarray
    H0: np.ndarray
    H1: np.ndarray
    parity: np.ndarray
    blocks: tuple

    def at(self, h):
        return self.H0 + h * self.H1


@dataclass(frozen=True)
class _Sector:
    target: int | None  # required total parity, None for no projection
    families: tuple


def _sectors(L: int, J: float, projected: bool) -> list[_Sector]:
    ap = mode_momenta(L)
    pair = lambda k: _Family(k, *_pair_split(k, J), PAIR_PARITY, _PAIR_BLOCKS)  # noqa: E731
    if not projected:
        return [_Sector(None, (pair(ap),))]
    pk = 2 * np.pi * np.arange(1, L // 2) / L
    single = np.array([0.0, np.pi])
    fams = (pair(pk), _Family(single, *_single_split(single, J), SINGLE_PARITY, _SINGLE_BLOCKS))
    if len(pk) == 0:
        fams = fams[1:]
    return [_Sector(1, (pair(ap),)), _Sector(-1, fams)]


def _gibbs_stack(H: np.ndarray, T: float):
    if T < 0:
        raise DomainError(f"temperature must be non-negative, got {T}")
    if T == 0:
        raise DomainError("the momentum-space engine needs T > 0")
    e, v = np.linalg.eigh(H)
    emin = e[:, :1]
    g = np.ones_like(e) if math.isinf(T) else np.exp(-(e - emin) / T)
    tr = g.sum(axis=1)
    rho = (v * (g / tr[:, None])[:, None, :]) @ np.swapaxes(v, -1, -2).conj()
    logtr = (0.0 if math.isinf(T) else -emin[:, 0] / T) + np.log(tr)
    return 0.5 * (rho + np.swapaxes(rho, -1, -2).conj()), logtr


def _adiabatic_stack(rho, H_start, H_end, blocks):
    out = np.zeros_like(rho, dtype=complex)
    for idx in blocks:
        ix = np.ix_(np.arange(rho.shape[0]), idx, idx)
        _, vs = np.linalg.eigh(H_start[ix])
        _, ve = np.linalg.eigh(H_end[ix])
        pops = np.einsum("mji,mjk,mki->mi", vs.conj(), rho[ix], vs).real
        out[ix] = (ve * pops[:, None, :]) @ np.swapaxes(ve, -1, -2).conj()
    return out


def _prefix(wp, wm):
    n = len(wp)
    e = np.empty(n + 1)
    o = np.empty(n + 1)
    e[0], o[0] = 1.0, 0.0
    for i in range(n):
        e[i + 1] = e[i] * wp[i] + o[i] * wm[i]
        o[i + 1] = e[i] * wm[i] + o[i] * wp[i]
    return e, o


def _project(wp, wm, xp, xm, target):
    """Probability of ``target`` parity and the conditional expectation.

    ``wp/wm`` are per-mode even/odd weights (summing to one), ``xp/xm`` the
    matching parts of the per-mode expectation value. A two-state parity
    recursion over the other modes keeps every term non-negative.
    """
    if target is None:
        return 1.0, math.fsum(xp) + math.fsum(xm)
    pe, po = _prefix(wp, wm)
    se, so = _prefix(wp[::-1], wm[::-1])
    se, so = se[::-1], so[::-1]
    others_even = pe[:-1] * se[1:] + po[:-1] * so[1:]
    others_odd = pe[:-1] * so[1:] + po[:-1] * se[1:]
    if target == 1:
        N = pe[-1]
        num = math.fsum(xp * others_even) + math.fsum(xm * others_odd)
    else:
        N = po[-1]
        num = math.fsum(xp * others_odd) + math.fsum(xm * others_even)
    if N <= 0:
        return 0.0, 0.0
    return N, num / N


def _split_traces(X, rho, parity):
    w = np.einsum("mii->mi", rho).real
    x = np.einsum("mij,mji->mi", X, rho).real
    pos = parity > 0
    return w[:, pos].sum(1), w[:, ~pos].sum(1), x[:, pos].sum(1), x[:, ~pos].sum(1)


@dataclass
class _KState:
    sectors: list
    log_z: list  # log trace of the unprojected Gibbs operator, per sector
    rhos: list  # per sector: list of per-family stacks

    def energy(self, h: float) -> float:
        logw, energies = [], []
        for sec, lz, rhos in zip(self.sectors, self.log_z, self.rhos):
            parts = [_split_traces(f.at(h), r, f.parity) for f, r in zip(sec.families, rhos)]
            wp, wm, xp, xm = (np.concatenate(c) for c in zip(*parts))
            N, E = _project(wp, wm, xp, xm, sec.target)
            logw.append(lz + math.log(N) if N > 0 else -math.inf)
            energies.append(E)
        logw = np.array(logw)
        p = np.exp(logw - logw.max())
        p /= p.sum()
        return math.fsum(pi * Ei for pi, Ei in zip(p, energies) if pi > 0)

    def map(self, fn) -> "_KState":
        rhos = [[fn(f, r) for f, r in zip(sec.families, rs)] for sec, rs in zip(self.sectors, self.rhos)]
        return _KState(self.sectors, self.log_z, rhos)


def _thermal(sectors, h, T) -> _KState:
    log_z, rhos = [], []
    for sec in sectors:
        stacks, lz = [], 0.0
        for f in sec.families:
            r, lt = _gibbs_stack(f.at(h), T)
            stacks.append(r)
            lz += math.fsum(lt)
        log_z.append(lz)
        rhos.append(stacks)
    return _KState(sectors, log_z, rhos)


def _ramp(state: _KState, h_start, h_end, tau, params: CycleParams) -> _KState:
    if math.isinf(tau):
        return state.map(lambda f, r: _adiabatic_stack(r, f.at(h_start), f.at(h_end), f.blocks))
    ramp = LinearRamp(h_start, h_end, tau)
    return state.map(lambda f, r: conjugate(ramp_propagator(f.H0, f.H1, ramp, params.dt_max, params.scheme), r))


def _free(state: _KState, tau_k: float) -> _KState:
    def step(f, r):
        e, v = np.linalg.eigh(f.H0)
        U = (v * np.exp(-1j * tau_k * e)[:, None, :]) @ np.swapaxes(v, -1, -2).conj()
        return conjugate(U, r)

    return state.map(step)


def prepare_kspace(L: int, params: CycleParams, *, J: float = 1.0, parity_projected: bool = True) -> PreparedCycle:
    _check_L(L)
    sectors = _sectors(L, J, parity_projected)
    B = _thermal(sectors, params.h1, params.T_H)
    C = _ramp(B, params.h1, params.h2, params.tau1, params)
    D = _thermal(sectors, params.h2, params.T_C)
    Ap = _ramp(D, params.h2, params.h1, params.tau2, params)

    def energy(tau_k):
        if tau_k < 0:
            raise ValueError("tau_k must be >= 0")
        return _free(Ap, tau_k).energy(params.h1)

    def states(tau_k):
        return {"B": B.rhos, "C": C.rhos, "D": D.rhos, "Aprime": Ap.rhos, "A": _free(Ap, tau_k).rhos}

    return PreparedCycle(
        params=params,
        E_B=B.energy(params.h1),
        E_C=C.energy(params.h2),
        E_D=D.energy(params.h2),
        E_Aprime=Ap.energy(params.h1),
        _energy_A=energy,
        _states=states,
    )


def run_cycle_kspace(L: int, params: CycleParams, *, J: float = 1.0, parity_projected: bool = True,
                     keep_states: bool = False) -> CycleResult:
    """Transverse-field Ising cycle for large even ``L`` via free fermions.

    ``keep_states`` returns, per stroke point, the per-sector lists of
    per-mode density-matrix stacks.
    """
    return prepare_kspace(L, params, J=J, parity_projected=parity_projected).result(
        params.tau_k, keep_states=keep_states
    )
