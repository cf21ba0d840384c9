"""Verifiers for the eigenvalue bounds, operator inequalities, and trial states.

Every check produces a :class:`TheoremReport` whose margin is oriented so
that pass means margin >= -tolerance:

* ``thm1``            eigenvalue ceiling; margin = ceiling - eigenvalue.
* ``thm2``            trial-state floor; margin = observed - floor.
* ``prop_BB``         operator positivity; margin = smallest eigenvalue of the
                      gap operator D = N/2 - (N-2)/4 sum lam^2 (n_up + n_down) - B*B.
* ``prop_occupation`` mode-occupation floor; margin = worst occupation excess.
* ``norm_recursion``  two-sided norm inequality; margin = worst one-sided slack.
* ``counterexample``  pairing-state overlap floor; margin = observed - floor.
* ``conjecture``      reporting only, never pass/fail.

Default tolerances: 1e-8 for bound margins, 1e-10 for structural identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import NamedTuple

import numpy as np
import scipy.sparse.linalg

from .canonical import (CanonicalForm, canonical_from_lambdas,
                        correlation_measures, youla_decompose)
from .fock import (DEFAULT_MAX_SECTOR, SectorSizeError, SectorVector,
                   apply_annihilate_vector, enumerate_sector)
from .pairing import (PairOperator, apply_B, apply_B_star, build_pairing_state,
                      dense_b_matrix, norm_sq_oracle, pair_number_diagonal,
                      seniority_b_matrix)
from .rdm import compute_gamma2, expectation_fast, spectral_decompose

BOUND_TOL = 1e-8
STRUCTURE_TOL = 1e-10
DENSE_CAP = 5000


@dataclass
class TheoremReport:
    """One verified (or reported) inequality with its margin."""

    kind: str
    params: dict
    observed: float | None = None
    bound: float | None = None
    margin: float | None = None
    passed: bool | None = None
    details: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "observed": self.observed,
            "bound": self.bound,
            "margin": self.margin,
            "pass": self.passed,
            "details": self.details,
            "note": self.note,
        }


def _as_lambdas(phi) -> np.ndarray:
    if isinstance(phi, CanonicalForm):
        return np.asarray(phi.lambdas, dtype=np.float64)
    return np.asarray(phi, dtype=np.float64)


def theorem1_rhs(N: int, sum_lambda4: float) -> float:
    """Eigenvalue ceiling N / (1 + (N-2)/2 * sum lam**4)."""
    if N < 2:
        raise ValueError("the ceiling is defined for N >= 2")
    if not 0.0 < sum_lambda4 <= 1.0 + 1e-12:
        raise ValueError("sum_lambda4 must lie in (0, 1]")
    return N / (1.0 + 0.5 * (N - 2) * sum_lambda4)


def verify_theorem1(psi: SectorVector, tol: float = BOUND_TOL,
                    tag: dict | None = None, spectral=None) -> list[TheoremReport]:
    """Check the correlational ceiling on every nonzero eigenpair of psi's
    two-body reduced operator.

    Eigenvalues below ``tol`` are excluded: their eigenvectors are arbitrary
    within the numerical kernel and the ceiling is trivial there anyway.
    """
    N = psi.basis.N
    if spectral is None:
        spectral = spectral_decompose(compute_gamma2(psi))
    reports = []
    for idx, (lam_eig, tensor) in enumerate(
            zip(spectral.eigenvalues, spectral.eigenvectors)):
        if lam_eig <= tol:
            continue
        measures = correlation_measures(youla_decompose(tensor))
        rhs = theorem1_rhs(N, measures.sum_lambda4)
        margin = rhs - float(lam_eig)
        params = {"d": psi.basis.d, "N": N, "eigen_index": idx}
        if tag:
            params.update(tag)
        reports.append(TheoremReport(
            kind="thm1", params=params, observed=float(lam_eig), bound=rhs,
            margin=margin, passed=margin >= -tol,
            details={"sum_lambda4": measures.sum_lambda4,
                     "lambda_max": measures.lambda_max}))
    return reports


def theorem2_floor(N: int, sum_lambda4: float, lambda_max_sq: float) -> float:
    """Trial-state floor N (1 - (N-2)/2 sum lam**4 - (N lam_max**2)**2 / 2)."""
    return N * (1.0 - 0.5 * (N - 2) * sum_lambda4 - 0.5 * (N * lambda_max_sq) ** 2)


def verify_theorem2(phi, N: int, tol: float = BOUND_TOL) -> TheoremReport:
    """Check that the normalized M = N/2 pairing state built from phi's
    coefficients pushes <phi, G phi> above the correlational floor.

    Preconditions (N even, N lam_max**2 <= 1, coefficient support >= N/2) are
    reported as skipped, not failed: outside them the floor is not asserted.
    """
    lams = _as_lambdas(phi)
    s4 = float(np.sum(lams ** 4))
    lmax_sq = float(np.max(lams) ** 2) if len(lams) else 0.0
    params = {"N": N, "K": len(lams), "sum_lambda4": s4, "lambda_max_sq": lmax_sq}

    def skipped(reason):
        return TheoremReport(kind="thm2", params=params, passed=None,
                             note=f"skipped: {reason}")

    if N < 2 or N % 2:
        return skipped("N must be a positive even integer")
    if 2 * len(lams) < N:
        return skipped("coefficient list too short for N/2 pairs")
    if N * lmax_sq > 1.0 + 1e-12:
        return skipped(f"outside the admissible regime: N*lambda_max^2 = {N * lmax_sq!r} > 1")
    op = PairOperator.from_lambdas(lams)
    state = build_pairing_state(op, N // 2)
    if state.degenerate:
        return skipped("pairing state vanishes: support smaller than N/2")
    psi_hat = state.vector.normalized()
    observed = expectation_fast(canonical_from_lambdas(lams), psi_hat)
    bound = theorem2_floor(N, s4, lmax_sq)
    margin = observed - bound
    return TheoremReport(kind="thm2", params=params, observed=observed,
                         bound=bound, margin=margin, passed=margin >= -tol,
                         details={"norm_sq": state.norm_sq})


class GapResult(NamedTuple):
    min_eigenvalue: float
    kernel_residual: float
    degenerate: bool


def proposition_gap(op: PairOperator, N: int) -> GapResult:
    """Positivity and optimality of the pair-operator inequality.

    Forms D = N/2 - (N-2)/4 sum lam^2 (n_up + n_down) - B*B densely on the
    (d, N) sector.  D is positive semidefinite, and the M = N/2 pairing state
    spans (part of) its kernel whenever that state is nonzero; the returned
    kernel residual is ||D Psi|| / ||Psi|| (NaN for a vanishing state).
    """
    if N < 2 or N % 2:
        raise ValueError("N must be a positive even integer")
    sec = enumerate_sector(op.basis.d, N)
    bmat = dense_b_matrix(op, N)
    gap = -(bmat.T @ bmat).astype(np.complex128)
    diag = 0.5 * N - 0.25 * (N - 2) * pair_number_diagonal(op, sec)
    gap[np.diag_indices_from(gap)] += diag
    min_eig = float(np.linalg.eigvalsh(gap).min())
    state = build_pairing_state(op, N // 2)
    if state.degenerate:
        return GapResult(min_eig, float("nan"), True)
    amps = state.vector.amplitudes
    residual = float(np.linalg.norm(gap @ amps) / np.linalg.norm(amps))
    return GapResult(min_eig, residual, False)


def proposition_report(op: PairOperator, N: int,
                       tol: float = STRUCTURE_TOL) -> TheoremReport:
    """Wrap :func:`proposition_gap` as a pass/fail report."""
    result = proposition_gap(op, N)
    ok = result.min_eigenvalue >= -tol
    if not result.degenerate:
        ok = ok and result.kernel_residual < tol
    return TheoremReport(
        kind="prop_BB",
        params={"N": N, "K": op.n_pairs, "lambdas": [float(x) for x in op.lambdas]},
        observed=result.min_eigenvalue, bound=0.0, margin=result.min_eigenvalue,
        passed=ok,
        details={"kernel_residual": result.kernel_residual,
                 "degenerate": result.degenerate},
        note="pairing state vanishes; only positivity checked" if result.degenerate else "")


def eigenvector_occupation_check(psi: SectorVector, spectral=None,
                                 tol: float = BOUND_TOL,
                                 tag: dict | None = None) -> list[TheoremReport]:
    """Occupation floor ||c_{k,s} psi||^2 >= (Lambda/2) lam_k**2 for each
    eigenpair, with lam_k, u_k, v_k from the eigenvector's canonical form.

    Occupations are measured directly through annihilation of the canonical
    single-particle vectors, which is the same as rotating psi into the
    canonical frame.
    """
    if spectral is None:
        spectral = spectral_decompose(compute_gamma2(psi))
    reports = []
    for idx, (lam_eig, tensor) in enumerate(
            zip(spectral.eigenvalues, spectral.eigenvectors)):
        if lam_eig <= tol:
            continue
        form = youla_decompose(tensor)
        worst = np.inf
        worst_at = None
        for k in range(form.n_pairs):
            need = 0.5 * float(lam_eig) * float(form.lambdas[k]) ** 2
            for label, vec in (("up", form.u(k)), ("down", form.v(k))):
                occ = apply_annihilate_vector(vec, psi).norm() ** 2
                if occ - need < worst:
                    worst = occ - need
                    worst_at = {"k": k, "spin": label, "occupation": occ,
                                "required": need}
        params = {"d": psi.basis.d, "N": psi.basis.N, "eigen_index": idx}
        if tag:
            params.update(tag)
        reports.append(TheoremReport(
            kind="prop_occupation", params=params,
            observed=worst_at["occupation"], bound=worst_at["required"],
            margin=float(worst), passed=worst >= -tol, details=worst_at))
    return reports


def norm_recursion_check(op: PairOperator, M_max: int,
                         tol: float = BOUND_TOL) -> list[TheoremReport]:
    """Two-sided norm inequality for the pairing states, M = 1 .. M_max:

        (1 - (M-1) lam_max**2) M ||Psi_{M-1}||^2 <= ||Psi_M||^2
                                                 <= M ||Psi_{M-1}||^2.

    Each report also carries the independent combinatorial norm, the relative
    agreement between construction and oracle, and the empirical second-order
    residual of the norm ratio (reported, never asserted: its coefficient is
    not pinned down).
    """
    if M_max > op.n_pairs:
        raise ValueError("M_max cannot exceed the number of pairs")
    lmax_sq = float(np.max(op.lambdas) ** 2)
    s4 = float(np.sum(op.lambdas ** 4))
    reports = []
    prev = build_pairing_state(op, 0).norm_sq
    for M in range(1, M_max + 1):
        built = build_pairing_state(op, M).norm_sq
        oracle = norm_sq_oracle(op.lambdas, M)
        agree = abs(built - oracle) / max(1.0, abs(oracle))
        lower = (1.0 - (M - 1) * lmax_sq) * M * prev
        upper = M * prev
        margin = min(built - lower, upper - built,
                     oracle - lower, upper - oracle)
        second_order = (built / (M * prev) - (1.0 - (M - 1) * s4)
                        if prev > 0 else float("nan"))
        reports.append(TheoremReport(
            kind="norm_recursion",
            params={"M": M, "K": op.n_pairs,
                    "lambdas": [float(x) for x in op.lambdas]},
            observed=built, bound=lower, margin=float(margin),
            passed=margin >= -tol and agree <= 1e-10,
            details={"lower": lower, "upper": upper, "oracle": oracle,
                     "oracle_agreement": agree,
                     "second_order_residual": second_order}))
        prev = built
    return reports


def sup_over_states(phi, N: int, method: str = "dense", *,
                    dense_cap: int = DENSE_CAP) -> float:
    """sup over normalized N-particle states of <phi, G_psi phi>.

    The supremum equals twice the largest eigenvalue of B*B on the N-particle
    sector, with B built from phi's coefficients; no search is involved.
    ``dense`` diagonalizes the assembled matrix, ``iterative`` runs a
    matrix-free Lanczos iteration; the two must agree to 1e-8 where both run.
    """
    lams = _as_lambdas(phi)
    op = PairOperator.from_lambdas(lams)
    d = op.basis.d
    if N < 2 or N > d:
        raise ValueError(f"no admissible sector (d={d}, N={N})")
    sec = enumerate_sector(d, N)
    if method == "dense":
        if sec.dim > dense_cap:
            raise SectorSizeError(
                f"sector dim {sec.dim} exceeds the dense cap {dense_cap}")
        bmat = dense_b_matrix(op, N)
        top = float(np.linalg.eigvalsh(bmat.T @ bmat).max())
        return 2.0 * top
    if method == "iterative":
        def matvec(x):
            vec = SectorVector(sec, x)
            return apply_B_star(op, apply_B(op, vec)).amplitudes

        lin = scipy.sparse.linalg.LinearOperator(
            (sec.dim, sec.dim), matvec=matvec, dtype=np.complex128)
        v0 = np.ones(sec.dim) / np.sqrt(sec.dim)
        vals = scipy.sparse.linalg.eigsh(
            lin, k=1, which="LA", v0=v0, ncv=min(sec.dim, 40), tol=0,
            return_eigenvectors=False)
        return 2.0 * float(vals[0])
    raise ValueError(f"unknown method {method!r}")


def seniority_sup(op: PairOperator, N: int) -> float:
    """Twice the largest eigenvalue of B*B restricted to seniority zero."""
    if N % 2:
        raise ValueError("the seniority-zero subspace holds even N only")
    M = N // 2
    if M == 0:
        return 0.0
    bsen = seniority_b_matrix(op, M)
    return 2.0 * float(np.linalg.eigvalsh(bsen.T @ bsen).max())


def explore_conjecture(phi, N_list, tol: float = BOUND_TOL, *,
                       dense_cap: int = DENSE_CAP,
                       sector_cap: int | None = None) -> list[TheoremReport]:
    """Empirical constant for the highly correlated regime, reporting only.

    For each admissible even N the supremum S = sup <phi, G phi> is computed
    and the constant C_emp = (S/N - 1 + (N-2)/2 sum lam^4) / (N lam_max^2)^2
    is reported, together with the trial-state floor and ceiling for context.
    The statement being probed is open, so no report here ever passes or
    fails.  The seniority-zero value is recorded alongside the full-sector
    one whenever the latter is feasible, so any discrepancy is visible.
    """
    lams = _as_lambdas(phi)
    s4 = float(np.sum(lams ** 4))
    lmax_sq = float(np.max(lams) ** 2)
    op = PairOperator.from_lambdas(lams)
    d = op.basis.d
    reports = []
    for N in N_list:
        params = {"N": int(N), "K": len(lams), "sum_lambda4": s4,
                  "lambda_max_sq": lmax_sq}
        if N < 2 or N % 2 or N > d:
            reports.append(TheoremReport(kind="conjecture", params=params,
                                         passed=None, note="skipped: N not admissible"))
            continue
        if N * lmax_sq > 1.0 + 1e-12:
            reports.append(TheoremReport(
                kind="conjecture", params=params, passed=None,
                note=f"skipped: N*lambda_max^2 = {N * lmax_sq!r} > 1"))
            continue
        dim = comb(d, N)
        sup_sen = seniority_sup(op, N)
        details = {"sup_seniority_zero": sup_sen, "sector_dim": dim}
        note = ""
        cap = DEFAULT_MAX_SECTOR if sector_cap is None else sector_cap
        if dim <= dense_cap:
            sup_full = sup_over_states(lams, N, "dense", dense_cap=dense_cap)
        elif dim <= cap:
            sup_full = sup_over_states(lams, N, "iterative")
        else:
            sup_full = None
            note = "full sector above cap; seniority-zero value used"
        if sup_full is not None:
            details["sup_full"] = sup_full
            details["seniority_gap"] = sup_full - sup_sen
            sup = sup_full
        else:
            sup = sup_sen
        c_emp = (sup / N - 1.0 + 0.5 * (N - 2) * s4) / (N * lmax_sq) ** 2
        details["c_emp"] = c_emp
        details["floor"] = theorem2_floor(N, s4, lmax_sq)
        details["ceiling"] = theorem1_rhs(N, s4)
        reports.append(TheoremReport(kind="conjecture", params=params,
                                     observed=sup, passed=None,
                                     details=details, note=note))
    return reports


def counterexample_driver(lambda_profile, N: int,
                          tol: float = BOUND_TOL) -> TheoremReport:
    """Pairing-state overlap floor for a fixed coefficient profile.

    Builds phi from the profile (K = len(profile) pairs) and the N-particle
    uniform pairing state on the first N pairs, then certifies

        <phi, G phi>  >=  (N/2 + 1) (sum_{k<=N} lam_k)^2 / N
                      >=  (1/2) (sum_{k<=N} lam_k)^2.

    Growing this left side in N while the delocalization ceiling stays fixed
    is what rules out an N-independent strong bound; the uniform ceiling
    2 / sum lam^4 is reported for that comparison.
    """
    lams = np.asarray(lambda_profile, dtype=np.float64)
    K = len(lams)
    if N < 2 or N % 2:
        raise ValueError("N must be a positive even integer")
    if K < N:
        raise ValueError(f"profile too short: need at least N={N} coefficients")
    uniform = np.zeros(K)
    uniform[:N] = 1.0 / np.sqrt(N)
    op = PairOperator.from_lambdas(uniform)
    psi_hat = build_pairing_state(op, N // 2).vector.normalized()
    observed = expectation_fast(canonical_from_lambdas(lams), psi_hat)
    head_sum = float(np.sum(lams[:N]))
    overlap_floor = (0.5 * N + 1.0) * head_sum ** 2 / N
    half_floor = 0.5 * head_sum ** 2
    margin = observed - overlap_floor
    return TheoremReport(
        kind="counterexample",
        params={"N": N, "K": K, "head_sum": head_sum},
        observed=observed, bound=overlap_floor, margin=margin,
        passed=margin >= -tol,
        details={"half_sum_floor": half_floor,
                 "uniform_ceiling": 2.0 / float(np.sum(lams ** 4))})


def counterexample_sweep(profiles, tol: float = BOUND_TOL) -> list[TheoremReport]:
    """Run the overlap floor over (N, profile) pairs and check growth in N."""
    reports = [counterexample_driver(lams, N, tol) for N, lams in profiles]
    if len(reports) > 1:
        values = [r.observed for r in reports]
        increasing = all(b > a for a, b in zip(values, values[1:]))
        reports.append(TheoremReport(
            kind="counterexample",
            params={"aspect": "growth",
                    "N_list": [r.params["N"] for r in reports]},
            observed=values[-1], bound=values[0],
            margin=min(b - a for a, b in zip(values, values[1:])),
            passed=increasing,
            details={"values": values}))
    return reports
