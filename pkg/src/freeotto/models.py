"""Spin-chain working media in the computational z basis.

Basis convention: spin ``n`` is bit ``n`` of the basis index (little endian),
bit value 0 is sigma^z = +1. Boundaries are periodic, so for ``L = 2`` the
single bond is counted twice, exactly like the textbook two-spin matrix
``diag(-2J, 2J, 2J, -2J)`` with ``-h`` off-diagonals.

Two Hamiltonians are supported, both split as ``H(h) = H0 + h * H1`` with
``H1 = -sum_n sigma^x_n``:

* ``TIM``:  ``H0 = -J sum_n sz_n sz_{n+1}``
* ``LTIM``: ``H0 = +J sum_n sz_n sz_{n+1} - B_z sum_n sz_n``
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

DEFAULT_L_MAX = 12


class Model(str, enum.Enum):
    TIM = "TIM"
    LTIM = "LTIM"


@dataclass(frozen=True)
class ModelSpec:
    model: Model = Model.TIM
    L: int = 2
    J: float = 1.0
    B_z: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if int(self.L) != self.L or self.L < 2:
            raise ValueError(f"L must be an integer >= 2, got {self.L}")
        object.__setattr__(self, "L", int(self.L))
        if self.J == 0:
            raise ValueError("J must be non-zero")


@dataclass(frozen=True)
class SplitHamiltonian:
    """``H(h) = H0 + h * H1``; arrays may be dense or scipy sparse."""

    H0: np.ndarray
    H1: np.ndarray

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    def at(self, h: float):
        return self.H0 + h * self.H1


@dataclass(frozen=True)
class LinearRamp:
    """Linear field protocol on a local stroke clock ``0 <= t <= duration``."""

    h_start: float
    h_end: float
    duration: float

    def __post_init__(self):
        if not self.duration >= 0:
            raise ValueError(f"ramp duration must be >= 0, got {self.duration}")


def field_at(protocol: LinearRamp, t: float) -> float:
    tau = protocol.duration
    slack = 1e-12 * max(1.0, tau)
    if t < -slack or t > tau + slack:
        raise ValueError(f"t = {t} outside the stroke [0, {tau}]")
    if tau == 0:
        return protocol.h_start
    return protocol.h_start + (protocol.h_end - protocol.h_start) * (t / tau)


def _spin_z(L: int) -> np.ndarray:
    """``s[x, n]`` = eigenvalue of sigma^z_n on basis state ``x``."""
    x = np.arange(2**L)[:, None]
    return 1 - 2 * ((x >> np.arange(L)) & 1)


def _diagonal_h0(spec: ModelSpec) -> np.ndarray:
    L = spec.L
    s = _spin_z(L)
    bonds = (s * np.roll(s, -1, axis=1)).sum(axis=1)
    if spec.model is Model.TIM:
        return -spec.J * bonds.astype(float)
    return spec.J * bonds - spec.B_z * s.sum(axis=1)


def _flip_field(L: int) -> sp.csr_matrix:
    """Sparse ``-sum_n sigma^x_n``."""
    dim = 2**L
    rows = np.repeat(np.arange(dim), L)
    cols = (rows.reshape(dim, L) ^ (1 << np.arange(L))).ravel()
    return sp.csr_matrix((-np.ones(dim * L), (rows, cols)), shape=(dim, dim))


def build_split(spec: ModelSpec, *, l_max: int = DEFAULT_L_MAX, sparse: bool = False) -> SplitHamiltonian:
    """Assemble ``H0`` and ``H1`` for ``spec`` (dense unless ``sparse``)."""
    if spec.L > l_max:
        raise ValueError(f"L = {spec.L} exceeds the dense cap l_max = {l_max}")
    d = _diagonal_h0(spec)
    H1 = _flip_field(spec.L)
    if sparse:
        return SplitHamiltonian(sp.diags(d).tocsr(), H1)
    return SplitHamiltonian(np.diag(d), H1.toarray())


def translation_orbits(L: int):
    """Representatives of cyclic-shift orbits and their periods."""
    dim = 2**L
    mask = dim - 1
    states = np.arange(dim)
    shifted = [states]
    for _ in range(L - 1):
        s = shifted[-1]
        shifted.append(((s << 1) | (s >> (L - 1))) & mask)
    orbit = np.stack(shifted)  # orbit[j, x] = T^j x
    rep = orbit.min(axis=0)
    period = np.argmax(orbit[1:] == states, axis=0) + 1
    period[(orbit[1:] != states).all(axis=0)] = L
    reps = np.flatnonzero(rep == states)
    return reps, period[reps], orbit


def momentum_isometries(L: int) -> list[tuple[int, sp.csc_matrix]]:
    """Isometries onto the translation eigenspaces ``k = 2 pi m / L``.

    Column ``|r, k> = R^{-1/2} sum_{j<R} e^{-ikj} T^j |r>`` exists when
    ``k R`` is a multiple of ``2 pi``. Returns ``(m, V_m)`` pairs whose
    blocks together form a unitary change of basis.
    """
    reps, periods, orbit = translation_orbits(L)
    dim = 2**L
    out = []
    for m in range(L):
        k = 2 * np.pi * m / L
        ok = (m * periods) % L == 0
        rows, cols, vals = [], [], []
        for c, (r, R) in enumerate(zip(reps[ok], periods[ok])):
            j = np.arange(R)
            rows.append(orbit[j, r])
            cols.append(np.full(R, c))
            vals.append(np.exp(-1j * k * j) / np.sqrt(R))
        n = int(ok.sum())
        if n == 0:
            continue
        V = sp.csc_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, n)
        )
        out.append((m, V))
    return out


@dataclass(frozen=True)
class SectorSplit:
    """One symmetry sector: ``H0`` is diagonal there, stored as a vector.

    ``multiplicity`` counts how many symmetry-equivalent sectors this block
    stands for (sector ``-k`` is the mirror image of sector ``k``).
    """

    basis: object  # isometry (sparse) from the sector into the full space, or None
    h0_diag: np.ndarray
    H1: np.ndarray
    multiplicity: int = 1

    @property
    def H0(self) -> np.ndarray:
        return np.diag(self.h0_diag)

    @property
    def dim(self) -> int:
        return self.h0_diag.shape[0]

    def at(self, h: float) -> np.ndarray:
        return self.H0 + h * self.H1

    def embed(self, block: np.ndarray) -> np.ndarray:
        if self.basis is None:
            return block
        V = self.basis
        return (V @ sp.csr_matrix(block) @ V.conj().T).toarray()


def _flip_parity_split(V: sp.csc_matrix, L: int):
    """Split a momentum isometry into spin-flip even and odd parts.

    Flipping all spins maps ``|r, k>`` onto a phase times another basis
    state with the same ``H0`` value, so the parity eigenvectors pair up at
    most two columns and ``H0`` stays diagonal.
    """
    dim = 2**L
    x = np.arange(dim)
    flip = sp.csc_matrix((np.ones(dim), (x ^ (dim - 1), x)), shape=(dim, dim))
    Pk = (V.conj().T @ flip @ V).toarray()
    n = Pk.shape[0]
    cols = {1: [], -1: []}
    seen = np.zeros(n, bool)
    for c in range(n):
        if seen[c]:
            continue
        r = int(np.argmax(np.abs(Pk[:, c])))
        phase = Pk[r, c]
        seen[c] = seen[r] = True
        if r == c:
            e = np.zeros(n, complex)
            e[c] = 1
            cols[int(round(phase.real))].append(e)
            continue
        for sign in (1, -1):
            e = np.zeros(n, complex)
            e[c] = 1 / np.sqrt(2)
            e[r] = sign * phase / np.sqrt(2)
            cols[sign].append(e)
    return [V @ sp.csc_matrix(np.array(cols[s]).T) for s in (1, -1) if cols[s]]


def sector_splits(spec: ModelSpec, *, l_max: int = DEFAULT_L_MAX, use_symmetry: bool = True,
                  fold_mirror: bool = True) -> list[SectorSplit]:
    """Block-diagonalise ``H0`` and ``H1`` by lattice momentum.

    Both models are translation invariant, so every stroke of the cycle acts
    block by block. ``H0`` is z-diagonal and constant on each orbit, hence
    stays diagonal in the momentum basis. TIM sectors are further split by
    global spin-flip parity. With ``fold_mirror`` only ``0 <= k <= pi`` is
    kept and ``0 < k < pi`` blocks get multiplicity 2 (reflection maps
    ``k`` to ``-k`` and commutes with ``H(h)``); the blocks then no longer
    span the full space, so do not embed states from a folded list.
    """
    split = build_split(spec, l_max=l_max, sparse=True)
    d = split.H0.diagonal().real
    if not use_symmetry:
        return [SectorSplit(None, d.copy(), split.H1.toarray())]
    L = spec.L
    sectors = []
    for m, V in momentum_isometries(L):
        mult = 1
        if fold_mirror:
            if 2 * m > L:
                continue
            mult = 1 if 2 * m in (0, L) else 2
        parts = _flip_parity_split(V, L) if spec.model is Model.TIM else [V]
        for W in parts:
            Wh = W.conj().T
            h1 = (Wh @ (split.H1 @ W)).toarray()
            h1 = 0.5 * (h1 + h1.conj().T)
            h0 = (Wh @ sp.diags(d) @ W).diagonal().real
            sectors.append(SectorSplit(W, h0, h1, mult))
    return sectors


def shift_operator(L: int) -> np.ndarray:
    """Permutation matrix of the one-site cyclic shift ``n -> n + 1``."""
    dim = 2**L
    x = np.arange(dim)
    y = ((x << 1) | (x >> (L - 1))) & (dim - 1)
    P = np.zeros((dim, dim))
    P[y, x] = 1.0
    return P


def spin_flip_operator(L: int) -> np.ndarray:
    dim = 2**L
    x = np.arange(dim)
    P = np.zeros((dim, dim))
    P[x ^ (dim - 1), x] = 1.0
    return P
