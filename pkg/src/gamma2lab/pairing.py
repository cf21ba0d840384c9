"""Pair operator B, pairing trial states, and their exact norms.

Given an orbital basis with pairs (k, up) / (k, down) and non-negative
coefficients lam_k with sum lam_k**2 = 1, the pair annihilator is

    B = sum_k lam_k c_{k,down} c_{k,up},

and the M-pair trial states are Psi_M = (B*)^M |vacuum>.  The pair creators
b*_k = c*_{k,up} c*_{k,down} commute and square to zero, which pins down the
norms exactly:

    ||Psi_M||^2 = (M!)^2 e_M(lam_1^2, ..., lam_K^2),

with e_M the elementary symmetric polynomial.  That identity is computed by
an independent recurrence here and cross-checked against the Fock-space
construction before the test suite trusts it as an oracle.

States Psi_M live in the seniority-zero subspace (every pair jointly
occupied or empty), so they are built on the K-bit pair-occupation basis of
dimension binomial(K, M) and only embedded into the full sector at the end.
In the operator-product basis |S>> = prod_{k in S} b*_k |vacuum> the pair
creators act without signs; fermionic signs enter only in the embedding.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .fock import (OrbitalBasis, SectorMismatchError, SectorSizeError,
                   SectorVector, apply_annihilate, apply_create,
                   enumerate_sector, occupation_masks, operator_matrix,
                   vacuum_state)

NORM_TOL = 1e-10

_TRANSITIONS: dict[tuple, list] = {}


@dataclass
class PairOperator:
    """B = sum_k lam_k c_{k,down} c_{k,up} on a paired orbital basis."""

    basis: OrbitalBasis
    lambdas: np.ndarray

    def __post_init__(self):
        lams = np.asarray(self.lambdas, dtype=np.float64)
        if lams.shape != (self.basis.n_pairs,):
            raise SectorMismatchError("need one coefficient per pair")
        if np.any(lams < 0):
            raise ValueError("pair coefficients must be non-negative")
        if abs(float(np.sum(lams ** 2)) - 1.0) > NORM_TOL:
            raise ValueError("pair coefficients must satisfy sum lam**2 = 1")
        self.lambdas = lams

    @classmethod
    def from_lambdas(cls, lambdas) -> "PairOperator":
        """Operator on the standard pair layout with d = 2 * len(lambdas)."""
        lams = np.asarray(lambdas, dtype=np.float64)
        return cls(OrbitalBasis.with_pairs(len(lams)), lams)

    @property
    def n_pairs(self) -> int:
        return self.basis.n_pairs


def _pair_sign_data(basis: OrbitalBasis, k: int) -> tuple[int, int, int]:
    """(pair bits, between-mask, base parity) for pair k.

    Annihilating c_down c_up on a mask with both bits set gives the sign
    (-1)**(occupied orbitals strictly between the two members + base), where
    base is 1 when the down orbital sits below the up orbital.  The creator
    c*_up c*_down carries the same sign on the stripped mask.
    """
    a, b = basis.pair_map[k]
    bits = (1 << a) | (1 << b)
    lo, hi = (a, b) if a < b else (b, a)
    between = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
    base = 1 if b < a else 0
    return bits, between, base


def _pair_transitions(basis: OrbitalBasis, N: int):
    """Per-pair scatter maps for B between the (d, N) and (d, N-2) sectors."""
    key = (basis.d, basis.pair_map, N)
    if key in _TRANSITIONS:
        return _TRANSITIONS[key]
    src = enumerate_sector(basis.d, N)
    tgt = enumerate_sector(basis.d, N - 2)
    maps = []
    for k in range(basis.n_pairs):
        bits, between, base = _pair_sign_data(basis, k)
        cols = np.nonzero((src.states & bits) == bits)[0]
        rows = tgt.index_of(src.states[cols] & ~bits)
        par = np.bitwise_count((src.states[cols] & between).astype(np.uint64))
        signs = 1.0 - 2.0 * ((par.astype(np.int64) + base) & 1)
        maps.append((rows, cols, signs))
    _TRANSITIONS[key] = maps
    return maps


def apply_B(op: PairOperator, vec: SectorVector) -> SectorVector:
    """Matrix-free pair annihilation, (d, N) -> (d, N-2)."""
    basis = vec.basis
    if basis.d != op.basis.d:
        raise SectorMismatchError("state dimension does not match the pair basis")
    if basis.N < 2:
        raise SectorMismatchError("pair annihilation needs at least two particles")
    maps = _pair_transitions(op.basis, basis.N)
    target = enumerate_sector(basis.d, basis.N - 2)
    out = np.zeros(target.dim, dtype=np.complex128)
    for k in range(op.n_pairs):
        lam = op.lambdas[k]
        if lam == 0.0:
            continue
        rows, cols, signs = maps[k]
        out[rows] += lam * signs * vec.amplitudes[cols]
    return SectorVector(target, out)


def apply_B_star(op: PairOperator, vec: SectorVector) -> SectorVector:
    """Adjoint of :func:`apply_B`, (d, N) -> (d, N+2)."""
    basis = vec.basis
    if basis.d != op.basis.d:
        raise SectorMismatchError("state dimension does not match the pair basis")
    if basis.N + 2 > basis.d:
        raise SectorSizeError("sector overflow")
    maps = _pair_transitions(op.basis, basis.N + 2)
    target = enumerate_sector(basis.d, basis.N + 2)
    out = np.zeros(target.dim, dtype=np.complex128)
    for k in range(op.n_pairs):
        lam = op.lambdas[k]
        if lam == 0.0:
            continue
        rows, cols, signs = maps[k]
        out[cols] += lam * signs * vec.amplitudes[rows]
    return SectorVector(target, out)


def dense_b_matrix(op: PairOperator, N: int) -> np.ndarray:
    """Dense matrix of B from the (d, N) sector to the (d, N-2) sector."""
    src = enumerate_sector(op.basis.d, N)
    tgt = enumerate_sector(op.basis.d, N - 2)
    mat = np.zeros((tgt.dim, src.dim), dtype=np.float64)
    for k, (rows, cols, signs) in enumerate(_pair_transitions(op.basis, N)):
        mat[rows, cols] = op.lambdas[k] * signs
    return mat


def pair_number_diagonal(op: PairOperator, sector) -> np.ndarray:
    """Diagonal of sum_k lam_k**2 (n_{k,up} + n_{k,down}) on a sector basis."""
    states = sector.states
    vals = np.zeros(sector.dim, dtype=np.float64)
    for k in range(op.n_pairs):
        a, b = op.basis.pair_map[k]
        occ = ((states >> a) & 1) + ((states >> b) & 1)
        vals += op.lambdas[k] ** 2 * occ
    return vals


@dataclass
class PairingState:
    """Psi_M = (B*)^M |vacuum> with its exact squared norm.

    ``pair_masks`` / ``pair_amplitudes`` hold the seniority-zero coefficients
    in the operator-product basis; ``vector`` is the full-sector embedding.
    A state whose coefficient support is smaller than M is flagged degenerate
    (it is exactly zero) rather than rejected.
    """

    M: int
    vector: SectorVector
    norm_sq: float
    degenerate: bool
    pair_masks: np.ndarray
    pair_amplitudes: np.ndarray


def _embedding_signs(basis: OrbitalBasis, masks: np.ndarray) -> np.ndarray:
    """Sign relating |S>> to the Fock basis state with all pairs of S filled."""
    signs = np.ones(len(masks), dtype=np.float64)
    data = [_pair_sign_data(basis, k) for k in range(basis.n_pairs)]
    for i, s in enumerate(masks):
        full = 0
        parity = 0
        for k in range(basis.n_pairs):
            if (int(s) >> k) & 1:
                bits, between, base = data[k]
                parity += int(full & between).bit_count() + base
                full |= bits
        signs[i] = -1.0 if parity & 1 else 1.0
    return signs


def _full_masks(basis: OrbitalBasis, masks: np.ndarray) -> np.ndarray:
    full = np.zeros(len(masks), dtype=np.int64)
    for k in range(basis.n_pairs):
        bits = (1 << basis.up(k)) | (1 << basis.down(k))
        full |= np.where((masks >> k) & 1, bits, 0)
    return full


def build_pairing_state(op: PairOperator, M: int) -> PairingState:
    """Apply B* to the vacuum M times, working on the pair-occupation basis."""
    if M < 0:
        raise ValueError("M must be non-negative")
    if 2 * M > op.basis.d:
        raise SectorSizeError("sector overflow: 2M exceeds the orbital count")
    K = op.n_pairs
    amps = np.ones(1, dtype=np.float64)
    for m in range(M):
        cur = occupation_masks(K, m)
        nxt = occupation_masks(K, m + 1)
        new = np.zeros(len(nxt), dtype=np.float64)
        for k in range(K):
            lam = op.lambdas[k]
            if lam == 0.0:
                continue
            bit = 1 << k
            src = np.nonzero((cur & bit) == 0)[0]
            tgt = np.searchsorted(nxt, cur[src] | bit)
            new[tgt] += lam * amps[src]
        amps = new
    masks = occupation_masks(K, M)
    norm_sq = float(np.sum(amps ** 2))
    sector = enumerate_sector(op.basis.d, 2 * M)
    full = np.zeros(sector.dim, dtype=np.complex128)
    support = np.nonzero(amps)[0]
    if len(support):
        signs = _embedding_signs(op.basis, masks[support])
        idx = sector.index_of(_full_masks(op.basis, masks[support]))
        full[idx] = signs * amps[support]
    return PairingState(M=M, vector=SectorVector(sector, full), norm_sq=norm_sq,
                        degenerate=norm_sq == 0.0, pair_masks=masks,
                        pair_amplitudes=amps)


def seniority_b_matrix(op: PairOperator, M: int) -> np.ndarray:
    """B restricted to the seniority-zero operator-product basis, M -> M-1 pairs.

    The product basis is orthonormal and the restriction is sign-free, so the
    adjoint of the returned (real) matrix represents B* on the same basis.
    """
    if M < 1:
        raise ValueError("need at least one pair")
    K = op.n_pairs
    src = occupation_masks(K, M)
    tgt = occupation_masks(K, M - 1)
    mat = np.zeros((len(tgt), len(src)), dtype=np.float64)
    for k in range(K):
        lam = op.lambdas[k]
        if lam == 0.0:
            continue
        bit = 1 << k
        cols = np.nonzero((src & bit) != 0)[0]
        rows = np.searchsorted(tgt, src[cols] & ~bit)
        mat[rows, cols] = lam
    return mat


def elementary_symmetric(values, order: int) -> float:
    """e_order of the given values via the stable ascending recurrence."""
    values = np.asarray(values, dtype=np.float64)
    if order < 0:
        raise ValueError("order must be non-negative")
    if order > len(values):
        return 0.0
    partial = np.zeros(order + 1, dtype=np.float64)
    partial[0] = 1.0
    for x in values:
        upper = min(order, len(partial) - 1)
        for j in range(upper, 0, -1):
            partial[j] += x * partial[j - 1]
    return float(partial[order])


def norm_sq_oracle(lambdas, M: int) -> float:
    """Exact ||Psi_M||^2 = (M!)^2 e_M(lam**2), independent of the Fock build.

    Returns 0 when M exceeds the number of nonzero coefficients.
    """
    lams = np.asarray(lambdas, dtype=np.float64)
    if M < 0:
        raise ValueError("M must be non-negative")
    if M > len(lams):
        return 0.0
    return factorial(M) ** 2 * elementary_symmetric(lams ** 2, M)


class IdentityResiduals(NamedTuple):
    annihilation: float
    rearranged: float


def annihilation_identity_check(op: PairOperator, M: int, k: int,
                                spin: str) -> IdentityResiduals:
    """Residuals of the two exact pairing-state identities.

    ``annihilation``:  || c_{k,s} Psi_M  -  (+/-)_s M lam_k c*_{k,sbar} Psi_{M-1} ||
    ``rearranged``:    || (lam_k c*_{k,s} (+/-)_s (M+1)^{-1} c_{k,sbar} B*) Psi_M ||

    with sign convention (+/-)_up = +1, (+/-)_down = -1 and sbar the opposite
    member of pair k.  Both vanish identically; only roundoff remains.
    """
    if spin not in ("up", "down"):
        raise ValueError("spin must be 'up' or 'down'")
    sign = 1.0 if spin == "up" else -1.0
    orb = op.basis.up(k) if spin == "up" else op.basis.down(k)
    orb_bar = op.basis.down(k) if spin == "up" else op.basis.up(k)
    lam = float(op.lambdas[k])
    psi_m = build_pairing_state(op, M).vector

    if M == 0:
        res1 = 0.0
    else:
        psi_prev = build_pairing_state(op, M - 1).vector
        lhs = apply_annihilate(orb, psi_m)
        rhs = (sign * M * lam) * apply_create(orb_bar, psi_prev)
        res1 = (lhs - rhs).norm()

    created = lam * apply_create(orb, psi_m)
    lowered = (sign / (M + 1)) * apply_annihilate(orb_bar, apply_B_star(op, psi_m))
    res2 = (created + lowered).norm()
    return IdentityResiduals(annihilation=float(res1), rearranged=float(res2))


def _apply_commutator(op: PairOperator, w: SectorVector) -> SectorVector:
    """[B, B*] w; a term whose intermediate sector does not exist is zero."""
    N, d = w.basis.N, op.basis.d
    first = apply_B(op, apply_B_star(op, w)) if N + 2 <= d else None
    second = apply_B_star(op, apply_B(op, w)) if N >= 2 else None
    if first is None:
        return -1.0 * second
    if second is None:
        return first
    return first - second


def commutator_defect(op: PairOperator, N: int) -> float:
    """Max deviation of [B, B*] from 1 - sum_k lam_k**2 (n_up + n_down).

    Both sides are built as dense matrices on the (d, N) sector; intended for
    d <= 8 where this is cheap.
    """
    sec = enumerate_sector(op.basis.d, N)
    commutator = operator_matrix(lambda w: _apply_commutator(op, w), sec, sec)
    expected = np.diag(1.0 - pair_number_diagonal(op, sec)).astype(np.complex128)
    return float(np.max(np.abs(commutator - expected)))


def write_state_text(path, state: SectorVector) -> None:
    """Text export: header ``d N``, then ``mask re im`` per nonzero amplitude."""
    lines = [f"{state.basis.d} {state.basis.N}"]
    for i in np.nonzero(state.amplitudes)[0]:
        a = state.amplitudes[i]
        lines.append(f"{int(state.basis.states[i])} {float(a.real)!r} {float(a.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
