"""Finite-dimensional fermionic Fock space on occupation bitstrings.

A single-particle space with ``d`` orbitals is addressed by the index range
``0..d-1``, with orbital 0 at the least significant bit of an occupation
mask.  The N-particle sector is spanned by the popcount-N masks listed in
ascending integer order.  Creation and annihilation follow the Jordan-Wigner
convention: acting on orbital ``i`` picks up ``(-1)**(number of occupied
orbitals below i)``, which makes the canonical anticommutation relations
exact at the bit level.

Orbitals may optionally be grouped into pairs (k, up) / (k, down) through an
:class:`OrbitalBasis`; the standard layout puts the up member of pair ``k``
at orbital ``2k`` and the down member at ``2k + 1``.

All operations are pure functions; vectors are never mutated in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

DEFAULT_MAX_DIM = 24
DEFAULT_MAX_SECTOR = 3_000_000


class SectorSizeError(ValueError):
    """Requested basis exceeds the configured size caps."""


class SectorMismatchError(ValueError):
    """Operands belong to incompatible sectors or dimensions."""


@dataclass(frozen=True)
class OrbitalBasis:
    """``d`` spin-orbitals grouped into ``d/2`` pairs (k, up) / (k, down)."""

    d: int
    pair_map: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("need at least two orbitals")
        if self.d % 2:
            raise ValueError("a paired basis needs an even number of orbitals")
        flat = [o for pair in self.pair_map for o in pair]
        if sorted(flat) != list(range(self.d)):
            raise ValueError("pair_map must cover every orbital exactly once")

    @classmethod
    def with_pairs(cls, n_pairs: int) -> "OrbitalBasis":
        """Standard layout: pair ``k`` occupies orbitals ``(2k, 2k+1)``."""
        return cls(2 * n_pairs, tuple((2 * k, 2 * k + 1) for k in range(n_pairs)))

    @property
    def n_pairs(self) -> int:
        return self.d // 2

    def up(self, k: int) -> int:
        return self.pair_map[k][0]

    def down(self, k: int) -> int:
        return self.pair_map[k][1]


@lru_cache(maxsize=None)
def occupation_masks(d: int, n: int) -> np.ndarray:
    """All d-bit masks with popcount ``n``, ascending (Gosper's hack)."""
    if n == 0:
        masks = np.zeros(1, dtype=np.int64)
    else:
        out = []
        m = (1 << n) - 1
        limit = 1 << d
        while m < limit:
            out.append(m)
            c = m & (-m)
            r = m + c
            m = (((r ^ m) >> 2) // c) | r
        masks = np.asarray(out, dtype=np.int64)
    masks.setflags(write=False)
    return masks


class SectorBasis:
    """Ordered occupation basis of the N-particle sector on d orbitals."""

    def __init__(self, d: int, N: int, states: np.ndarray):
        self.d = d
        self.N = N
        self.states = states

    @property
    def dim(self) -> int:
        return len(self.states)

    def index_of(self, masks) -> np.ndarray:
        """Positions of the given masks in the sorted state list."""
        masks = np.asarray(masks, dtype=np.int64)
        idx = np.searchsorted(self.states, masks)
        if np.any(idx >= self.dim) or np.any(self.states[idx] != masks):
            raise SectorMismatchError("mask outside this sector")
        return idx

    def __repr__(self):
        return f"SectorBasis(d={self.d}, N={self.N}, dim={self.dim})"


@lru_cache(maxsize=None)
def _sector(d: int, N: int) -> SectorBasis:
    return SectorBasis(d, N, occupation_masks(d, N))


def enumerate_sector(d: int, N: int, *, max_dim: int | None = None,
                     max_states: int | None = None) -> SectorBasis:
    """Basis of the (d, N) sector, cached per (d, N).

    Rejects N < 0, N > d, d above the dimension cap, and sectors larger than
    the state-count cap.  Caps are soft configuration, not physics.
    """
    max_dim = DEFAULT_MAX_DIM if max_dim is None else max_dim
    max_states = DEFAULT_MAX_SECTOR if max_states is None else max_states
    if N < 0 or N > d:
        raise SectorSizeError(f"no (d={d}, N={N}) sector")
    if d < 1 or d > max_dim:
        raise SectorSizeError(f"d={d} outside the configured cap {max_dim}")
    if comb(d, N) > max_states:
        raise SectorSizeError(
            f"sector (d={d}, N={N}) has {comb(d, N)} states, cap is {max_states}")
    return _sector(d, N)


@dataclass
class SectorVector:
    """Complex amplitude vector over one sector's occupation basis."""

    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.basis.dim,):
            raise SectorMismatchError(
                f"amplitude length {amps.shape} does not match sector dim {self.basis.dim}")
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "SectorVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return SectorVector(self.basis, self.amplitudes / n)

    def inner(self, other: "SectorVector") -> complex:
        """Hermitian inner product <self, other> (conjugate on self)."""
        self._check_same_sector(other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def _check_same_sector(self, other: "SectorVector"):
        if (self.basis.d, self.basis.N) != (other.basis.d, other.basis.N):
            raise SectorMismatchError("vectors live in different sectors")

    def __add__(self, other):
        self._check_same_sector(other)
        return SectorVector(self.basis, self.amplitudes + other.amplitudes)

    def __sub__(self, other):
        self._check_same_sector(other)
        return SectorVector(self.basis, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar):
        return SectorVector(self.basis, self.amplitudes * scalar)

    __rmul__ = __mul__


def vacuum_state(d: int) -> SectorVector:
    """The single basis vector of the zero-particle sector."""
    return SectorVector(enumerate_sector(d, 0), np.ones(1, dtype=np.complex128))


def basis_state(d: int, mask: int) -> SectorVector:
    """Unit amplitude on one occupation mask."""
    N = int(mask).bit_count()
    sec = enumerate_sector(d, N)
    amps = np.zeros(sec.dim, dtype=np.complex128)
    amps[sec.index_of([mask])[0]] = 1.0
    return SectorVector(sec, amps)


def slater_state(d: int, orbitals) -> SectorVector:
    """Slater determinant occupying the given orbitals (amplitude +1)."""
    mask = 0
    for o in orbitals:
        if mask & (1 << o):
            raise ValueError(f"orbital {o} listed twice")
        mask |= 1 << o
    return basis_state(d, mask)


def _parity_signs(masks: np.ndarray, orbital: int) -> np.ndarray:
    """(-1)**(occupied orbitals below `orbital`) for each mask."""
    below = masks.astype(np.uint64) & np.uint64((1 << orbital) - 1)
    return 1.0 - 2.0 * (np.bitwise_count(below).astype(np.int64) & 1)


def apply_create(orbital: int, vec: SectorVector) -> SectorVector:
    """Creation operator on one orbital, (d, N) -> (d, N+1)."""
    basis = vec.basis
    if not 0 <= orbital < basis.d:
        raise SectorMismatchError(f"orbital {orbital} outside 0..{basis.d - 1}")
    if basis.N + 1 > basis.d:
        raise SectorMismatchError("sector is already full")
    target = enumerate_sector(basis.d, basis.N + 1)
    bit = 1 << orbital
    states = basis.states
    src = np.nonzero((states & bit) == 0)[0]
    out = np.zeros(target.dim, dtype=np.complex128)
    if len(src):
        signs = _parity_signs(states[src], orbital)
        out[target.index_of(states[src] | bit)] = signs * vec.amplitudes[src]
    return SectorVector(target, out)


def apply_annihilate(orbital: int, vec: SectorVector) -> SectorVector:
    """Annihilation operator on one orbital, (d, N) -> (d, N-1).

    Adjoint of :func:`apply_create`: <w, c_i v> = <c*_i w, v>.
    """
    basis = vec.basis
    if not 0 <= orbital < basis.d:
        raise SectorMismatchError(f"orbital {orbital} outside 0..{basis.d - 1}")
    if basis.N < 1:
        raise SectorMismatchError("cannot annihilate in the vacuum sector")
    target = enumerate_sector(basis.d, basis.N - 1)
    bit = 1 << orbital
    states = basis.states
    src = np.nonzero((states & bit) != 0)[0]
    out = np.zeros(target.dim, dtype=np.complex128)
    if len(src):
        signs = _parity_signs(states[src], orbital)
        out[target.index_of(states[src] & ~bit)] = signs * vec.amplitudes[src]
    return SectorVector(target, out)


def apply_create_vector(coeffs, vec: SectorVector) -> SectorVector:
    """Creation of the single-particle state sum_i coeffs[i] e_i (linear)."""
    basis = vec.basis
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape != (basis.d,):
        raise SectorMismatchError("coefficient vector has wrong length")
    if basis.N + 1 > basis.d:
        raise SectorMismatchError("sector is already full")
    target = enumerate_sector(basis.d, basis.N + 1)
    out = np.zeros(target.dim, dtype=np.complex128)
    states = basis.states
    for i in np.nonzero(np.abs(coeffs) > 0)[0]:
        bit = 1 << int(i)
        src = np.nonzero((states & bit) == 0)[0]
        if len(src):
            signs = _parity_signs(states[src], int(i))
            out[target.index_of(states[src] | bit)] += coeffs[i] * signs * vec.amplitudes[src]
    return SectorVector(target, out)


def apply_annihilate_vector(coeffs, vec: SectorVector) -> SectorVector:
    """Annihilation of sum_i coeffs[i] e_i; conjugate-linear in coeffs."""
    basis = vec.basis
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape != (basis.d,):
        raise SectorMismatchError("coefficient vector has wrong length")
    if basis.N < 1:
        raise SectorMismatchError("cannot annihilate in the vacuum sector")
    target = enumerate_sector(basis.d, basis.N - 1)
    out = np.zeros(target.dim, dtype=np.complex128)
    states = basis.states
    for i in np.nonzero(np.abs(coeffs) > 0)[0]:
        bit = 1 << int(i)
        src = np.nonzero((states & bit) != 0)[0]
        if len(src):
            signs = _parity_signs(states[src], int(i))
            out[target.index_of(states[src] & ~bit)] += (
                np.conj(coeffs[i]) * signs * vec.amplitudes[src])
    return SectorVector(target, out)


def occupation(vec: SectorVector, orbital: int) -> float:
    """Expected occupation <n_orbital> of a (nonzero) sector vector."""
    nsq = float(np.vdot(vec.amplitudes, vec.amplitudes).real)
    if nsq == 0.0:
        raise ValueError("zero vector has no occupation expectation")
    bit = 1 << orbital
    sel = (vec.basis.states & bit) != 0
    return float(np.sum(np.abs(vec.amplitudes[sel]) ** 2) / nsq)


def number_expectation(vec: SectorVector) -> float:
    """Total-number expectation of a nonzero sector vector.

    Every basis mask of the (d, N) sector has popcount N, so the sector is an
    eigenspace of the total number operator and the expectation is N exactly.
    """
    if vec.norm() == 0.0:
        raise ValueError("zero vector has no number expectation")
    return float(vec.basis.N)


def operator_matrix(op, src: SectorBasis, tgt: SectorBasis) -> np.ndarray:
    """Dense matrix of a sector-vector map, built column by column."""
    mat = np.zeros((tgt.dim, src.dim), dtype=np.complex128)
    for j in range(src.dim):
        e = np.zeros(src.dim, dtype=np.complex128)
        e[j] = 1.0
        mat[:, j] = op(SectorVector(src, e)).amplitudes
    return mat
