"""Pair operator, pairing states, exact norms, and the operator identities."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamma2lab.fock import (OrbitalBasis, SectorSizeError, apply_annihilate,
                            enumerate_sector, vacuum_state)
from gamma2lab.pairing import (PairOperator, annihilation_identity_check,
                               apply_B, apply_B_star, build_pairing_state,
                               commutator_defect, dense_b_matrix,
                               elementary_symmetric, norm_sq_oracle,
                               pair_number_diagonal, seniority_b_matrix,
                               write_state_text)

UNIFORM4 = np.full(4, 0.5)

PROFILES = {
    "uniform": lambda k: np.ones(k),
    "geometric": lambda k: 0.5 ** np.arange(1, k + 1),
    "power": lambda k: 1.0 / np.arange(1, k + 1),
}


def make_op(raw):
    raw = np.asarray(raw, dtype=float)
    return PairOperator.from_lambdas(raw / np.linalg.norm(raw))


def brute_esp(values, order):
    return math.fsum(math.prod(c) for c in itertools.combinations(values, order))


def pairing_state_by_fock_ops(op, m):
    """Independent construction: repeated full-space B* from the vacuum."""
    vec = vacuum_state(op.basis.d)
    for _ in range(m):
        vec = apply_B_star(op, vec)
    return vec


class TestPairOperatorValidation:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            PairOperator.from_lambdas([1.0, 1.0])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            PairOperator.from_lambdas(np.array([np.sqrt(2.0), -1.0]) / np.sqrt(3.0))


class TestApplyB:
    def test_single_pair(self):
        op = PairOperator.from_lambdas([1.0])
        psi = pairing_state_by_fock_ops(op, 1)
        out = apply_B(op, psi)
        assert out.basis.N == 0
        assert abs(out.amplitudes[0] - 1.0) < 1e-15

    def test_seniority_blocking(self):
        # two up-spins, no complete pair
        from gamma2lab.fock import basis_state
        op = make_op(UNIFORM4)
        out = apply_B(op, basis_state(8, 0b0101))
        assert np.all(out.amplitudes == 0)

    @pytest.mark.parametrize("profile", list(PROFILES))
    def test_adjointness(self, profile):
        op = make_op(PROFILES[profile](4))
        rng = np.random.default_rng(3)
        from gamma2lab.fock import SectorVector
        v = SectorVector(enumerate_sector(8, 4),
                         rng.standard_normal(70) + 1j * rng.standard_normal(70))
        w = SectorVector(enumerate_sector(8, 2),
                         rng.standard_normal(28) + 1j * rng.standard_normal(28))
        assert abs(w.inner(apply_B(op, v)) - apply_B_star(op, w).inner(v)) < 1e-12

    def test_commutator_formula_on_random_vector(self):
        op = make_op(UNIFORM4)
        rng = np.random.default_rng(8)
        from gamma2lab.fock import SectorVector
        sec = enumerate_sector(8, 4)
        v = SectorVector(sec, rng.standard_normal(sec.dim)
                         + 1j * rng.standard_normal(sec.dim))
        lhs = apply_B(op, apply_B_star(op, v)) - apply_B_star(op, apply_B(op, v))
        rhs = SectorVector(sec, (1.0 - pair_number_diagonal(op, sec)) * v.amplitudes)
        assert (lhs - rhs).norm() < 1e-12

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_commutator_dense(self, n):
        assert commutator_defect(make_op(PROFILES["power"](4)), n) < 1e-12

    def test_number_coupling_operator_bounds(self):
        op = make_op(PROFILES["geometric"](4))
        sec = enumerate_sector(8, 4)
        diag = pair_number_diagonal(op, sec)
        assert diag.min() >= -1e-12
        assert diag.max() <= 4 * float(np.max(op.lambdas) ** 2) + 1e-12


class TestBuildPairingState:
    def test_vacuum(self):
        st0 = build_pairing_state(make_op(UNIFORM4), 0)
        assert st0.norm_sq == 1.0
        assert abs(st0.vector.amplitudes[0] - 1.0) < 1e-15

    def test_single_application_matches_embedding(self):
        from gamma2lab.canonical import canonical_from_lambdas, embed_as_sector_vector
        op = make_op(PROFILES["power"](4))
        st1 = build_pairing_state(op, 1)
        ref = embed_as_sector_vector(canonical_from_lambdas(op.lambdas))
        assert (st1.vector - ref).norm() < 1e-14
        assert abs(st1.norm_sq - 1.0) < 1e-14

    def test_uniform_norm(self):
        assert abs(build_pairing_state(make_op(UNIFORM4), 2).norm_sq - 1.5) < 1e-14

    @pytest.mark.parametrize("profile", list(PROFILES))
    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    def test_matches_fock_space_construction(self, profile, m):
        op = make_op(PROFILES[profile](3))
        built = build_pairing_state(op, m)
        ref = pairing_state_by_fock_ops(op, m)
        assert (built.vector - ref).norm() < 1e-12

    def test_scrambled_pair_map_signs(self):
        # interleaved pairs exercise the nontrivial embedding parities
        basis = OrbitalBasis(6, ((0, 3), (4, 1), (2, 5)))
        lams = np.array([2.0, 1.0, 1.0]) / np.sqrt(6.0)
        op = PairOperator(basis, lams)
        for m in (1, 2, 3):
            built = build_pairing_state(op, m)
            ref = pairing_state_by_fock_ops(op, m)
            assert (built.vector - ref).norm() < 1e-12

    def test_seniority_support(self):
        op = make_op(PROFILES["geometric"](4))
        state = build_pairing_state(op, 2)
        sec = state.vector.basis
        for idx in np.nonzero(state.vector.amplitudes)[0]:
            mask = int(sec.states[idx])
            for k in range(4):
                pair = (mask >> (2 * k)) & 0b11
                assert pair in (0b00, 0b11)

    def test_degenerate_state_flagged(self):
        op = PairOperator.from_lambdas([np.sqrt(0.5), np.sqrt(0.5), 0.0, 0.0])
        state = build_pairing_state(op, 3)
        assert state.degenerate
        assert state.norm_sq == 0.0

    def test_sector_overflow(self):
        with pytest.raises(SectorSizeError):
            build_pairing_state(make_op(UNIFORM4), 5)


class TestNormOracle:
    def test_normalization_sum(self):
        assert abs(norm_sq_oracle(UNIFORM4, 1) - 1.0) < 1e-15

    def test_uniform_examples(self):
        assert abs(norm_sq_oracle(UNIFORM4, 2) - 1.5) < 1e-14
        lams6 = np.full(6, 1 / np.sqrt(6))
        assert abs(norm_sq_oracle(lams6, 3) - 10.0 / 3.0) < 1e-14

    def test_beyond_support_is_zero(self):
        assert norm_sq_oracle(UNIFORM4, 5) == 0.0

    @pytest.mark.parametrize("profile", list(PROFILES))
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_matches_construction_everywhere(self, profile, k):
        op = make_op(PROFILES[profile](k))
        for m in range(k + 1):
            oracle = norm_sq_oracle(op.lambdas, m)
            built = build_pairing_state(op, m).norm_sq
            assert abs(built - oracle) <= 1e-10 * max(1.0, oracle)

    @given(st.lists(st.floats(0.05, 2.0), min_size=1, max_size=6),
           st.integers(0, 6))
    @settings(max_examples=40, deadline=None)
    def test_esp_recurrence_vs_bruteforce(self, raw, order):
        vals = np.asarray(raw)
        assert abs(elementary_symmetric(vals, order)
                   - brute_esp(list(vals), order)) < 1e-10 * max(
                       1.0, brute_esp(list(vals), order))


class TestAnnihilationIdentities:
    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    @pytest.mark.parametrize("spin", ["up", "down"])
    def test_residuals_uniform(self, k, spin):
        res = annihilation_identity_check(make_op(UNIFORM4), 2, k, spin)
        assert res.annihilation < 1e-12
        assert res.rearranged < 1e-12

    def test_zero_coefficient_annihilates(self):
        op = PairOperator.from_lambdas([np.sqrt(0.5), np.sqrt(0.5), 0.0])
        state = build_pairing_state(op, 2)
        out = apply_annihilate(op.basis.up(2), state.vector)
        assert np.all(out.amplitudes == 0)
        res = annihilation_identity_check(op, 2, 2, "up")
        assert res.annihilation == 0.0 and res.rearranged == 0.0

    def test_vacuum_case(self):
        res = annihilation_identity_check(make_op(UNIFORM4), 0, 1, "down")
        assert res.annihilation == 0.0
        assert res.rearranged < 1e-15

    def test_rejects_unknown_spin(self):
        with pytest.raises(ValueError):
            annihilation_identity_check(make_op(UNIFORM4), 1, 0, "sideways")


class TestDenseHelpers:
    def test_dense_matrix_matches_matrix_free(self):
        op = make_op(PROFILES["power"](4))
        mat = dense_b_matrix(op, 4)
        src = enumerate_sector(8, 4)
        rng = np.random.default_rng(1)
        from gamma2lab.fock import SectorVector
        v = SectorVector(src, rng.standard_normal(src.dim) + 0j)
        assert np.allclose(mat @ v.amplitudes, apply_B(op, v).amplitudes,
                           atol=1e-13)

    def test_seniority_matrix_norms(self):
        # ||Psi_M||^2 through the seniority chain reproduces the oracle
        op = make_op(PROFILES["geometric"](5))
        amps = np.ones(1)
        for m in range(1, 4):
            amps = seniority_b_matrix(op, m).T @ amps
            assert abs(np.sum(amps ** 2) - norm_sq_oracle(op.lambdas, m)) < 1e-12


class TestStateExport:
    def test_written_file_lists_nonzero_amplitudes(self, tmp_path):
        op = make_op(UNIFORM4)
        state = build_pairing_state(op, 2)
        path = tmp_path / "state.txt"
        write_state_text(path, state.vector)
        rows = path.read_text().splitlines()
        assert rows[0] == "8 4"
        assert len(rows) - 1 == int(np.count_nonzero(state.vector.amplitudes))
        mask, re_s, im_s = rows[1].split()
        assert int(mask).bit_count() == 4
        assert float(im_s) == 0.0
