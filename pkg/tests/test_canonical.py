"""Canonical pair decomposition: round trips, covariance, measures, IO."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamma2lab.canonical import (AntisymmetricTensor, CanonicalForm,
                                 NotAntisymmetricError, NotNormalizedError,
                                 canonical_from_lambdas, correlation_measures,
                                 elementary_wedge, embed_as_sector_vector,
                                 random_tensor, read_tensor_text, reconstruct,
                                 tensor_from_wedge_amplitudes, tensor_inner,
                                 wedge_pairs, write_tensor_text,
                                 youla_decompose)
from gamma2lab.fock import SectorMismatchError


def seeded_tensor(d, seed):
    return random_tensor(d, np.random.default_rng(seed))


def two_pair_tensor():
    """(e1^e2 + e3^e4) / sqrt(2) in d = 4."""
    upper = np.zeros((4, 4), dtype=complex)
    upper[0, 1] = upper[2, 3] = 0.5
    return AntisymmetricTensor(4, upper - upper.T)


class TestTensorStorage:
    def test_exact_antisymmetry_enforced(self):
        t = AntisymmetricTensor.from_matrix(np.array([[0, 1], [-1, 0]]) / np.sqrt(2))
        assert np.array_equal(t.mat, -t.mat.T)

    def test_rejects_nonantisymmetric(self):
        with pytest.raises(NotAntisymmetricError):
            AntisymmetricTensor.from_matrix(np.eye(3))

    def test_wedge_amplitude_roundtrip(self):
        t = seeded_tensor(6, 0)
        back = tensor_from_wedge_amplitudes(6, t.wedge_amplitudes())
        assert np.max(np.abs(back.mat - t.mat)) < 1e-15

    def test_wedge_pair_order(self):
        assert wedge_pairs(4) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


class TestYoulaDecompose:
    def test_single_elementary_wedge(self):
        form = youla_decompose(elementary_wedge(2, 0, 1))
        assert np.allclose(form.lambdas, [1.0], atol=1e-12)
        # pair spans the plane of e1, e2 up to phases
        assert abs(abs(form.u(0)[0]) ** 2 + abs(form.u(0)[1]) ** 2 - 1) < 1e-12
        assert abs(tensor_inner(elementary_wedge(2, 0, 1),
                                reconstruct(form))) > 1 - 1e-12

    def test_block_two_pair_tensor(self):
        form = youla_decompose(two_pair_tensor())
        assert np.allclose(form.lambdas, [1 / np.sqrt(2)] * 2, atol=1e-12)

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_roundtrip_random(self, seed):
        t = seeded_tensor(8, seed)
        form = youla_decompose(t)
        assert np.linalg.norm(reconstruct(form).mat - t.mat) < 1e-8

    @given(st.integers(0, 2 ** 31), st.sampled_from([2, 4, 6, 8]))
    @settings(max_examples=30, deadline=None)
    def test_roundtrip_property(self, seed, d):
        t = seeded_tensor(d, seed)
        form = youla_decompose(t)
        assert np.linalg.norm(reconstruct(form).mat - t.mat) < 1e-8
        assert abs(np.sum(form.lambdas ** 2) - 1.0) < 1e-10

    def test_unitary_congruence_covariance(self):
        t = seeded_tensor(8, 42)
        rng = np.random.default_rng(43)
        q, _ = np.linalg.qr(rng.standard_normal((8, 8))
                            + 1j * rng.standard_normal((8, 8)))
        rotated = AntisymmetricTensor.from_matrix(q @ t.mat @ q.T, atol=1e-12)
        a = np.sort(youla_decompose(t).lambdas)
        b = np.sort(youla_decompose(rotated).lambdas)
        assert np.max(np.abs(a - b)) < 1e-8

    def test_degenerate_uniform_cluster(self):
        form = canonical_from_lambdas(np.full(4, 0.5))
        t = reconstruct(form)
        redone = youla_decompose(t)
        assert np.allclose(redone.lambdas, 0.5, atol=1e-10)
        assert np.linalg.norm(reconstruct(redone).mat - t.mat) < 1e-8

    def test_phase_normalization(self):
        form = youla_decompose(seeded_tensor(6, 9))
        assert form.lambdas.dtype == np.float64
        assert np.all(form.lambdas >= 0)
        assert np.all(np.diff(form.lambdas) <= 1e-12)

    def test_pair_overlap_recovers_coefficients(self):
        t = seeded_tensor(8, 17)
        form = youla_decompose(t)
        for k in range(form.n_pairs):
            pair = np.sqrt(0.5) * (np.outer(form.u(k), form.v(k))
                                   - np.outer(form.v(k), form.u(k)))
            overlap = np.vdot(pair, t.mat)
            assert abs(overlap - form.lambdas[k]) < 1e-10

    def test_rejects_unnormalized(self):
        t = seeded_tensor(4, 1)
        with pytest.raises(NotNormalizedError):
            youla_decompose(AntisymmetricTensor(4, 2.0 * t.mat))

    def test_orthonormal_columns(self):
        form = youla_decompose(seeded_tensor(8, 23))
        gram = form.vectors.conj().T @ form.vectors
        assert np.max(np.abs(gram - np.eye(gram.shape[0]))) < 1e-10


class TestReconstruct:
    def test_single_pair_matrix(self):
        form = canonical_from_lambdas([1.0])
        expected = np.array([[0, 1], [-1, 0]]) / np.sqrt(2)
        assert np.allclose(reconstruct(form).mat, expected, atol=1e-15)

    def test_uniform_entry_value(self):
        form = canonical_from_lambdas(np.full(4, 0.5))
        t = reconstruct(form)
        assert abs(t.mat[0, 1] - 0.5 / np.sqrt(2)) < 1e-15
        assert abs(t.norm() - 1.0) < 1e-14

    def test_dimension_mismatch(self):
        with pytest.raises(SectorMismatchError):
            reconstruct(canonical_from_lambdas([1.0]), d=6)


class TestCorrelationMeasures:
    def test_single_pair(self):
        assert correlation_measures(canonical_from_lambdas([1.0])) == (1.0, 1.0, 1.0)

    @pytest.mark.parametrize("k", [2, 4, 8])
    def test_uniform(self, k):
        m = correlation_measures(canonical_from_lambdas(np.full(k, 1 / np.sqrt(k))))
        assert abs(m.sum_lambda4 - 1 / k) < 1e-14
        assert abs(m.lambda_max - 1 / np.sqrt(k)) < 1e-14
        assert abs(m.participation - k) < 1e-10

    def test_geometric_profile_exact_arithmetic(self):
        # rational oracle: lam_k^2 = (1/4)^(k-1) / S with S = 85/64
        squares = [Fraction(1, 4) ** k for k in range(4)]
        total = sum(squares)
        exact = sum((q / total) ** 2 for q in squares)
        lams = np.sqrt(np.array([float(q / total) for q in squares]))
        m = correlation_measures(canonical_from_lambdas(lams))
        assert abs(m.sum_lambda4 - float(exact)) < 1e-14


class TestEmbedding:
    def test_single_wedge(self):
        vec = embed_as_sector_vector(elementary_wedge(2, 0, 1))
        assert np.allclose(vec.amplitudes, [1.0])

    def test_two_pair_amplitudes(self):
        vec = embed_as_sector_vector(two_pair_tensor())
        sec = vec.basis
        a = vec.amplitudes[sec.index_of([0b0011])[0]]
        b = vec.amplitudes[sec.index_of([0b1100])[0]]
        assert abs(a - 1 / np.sqrt(2)) < 1e-15
        assert abs(b - 1 / np.sqrt(2)) < 1e-15

    @given(st.integers(0, 2 ** 31))
    @settings(max_examples=25, deadline=None)
    def test_norm_preserved(self, seed):
        t = seeded_tensor(8, seed)
        assert abs(embed_as_sector_vector(t).norm() - 1.0) < 1e-12

    def test_canonical_form_input(self):
        form = canonical_from_lambdas(np.full(2, 1 / np.sqrt(2)))
        vec = embed_as_sector_vector(form)
        assert abs(vec.norm() - 1.0) < 1e-12


class TestTextFormat:
    def test_roundtrip(self, tmp_path):
        t = seeded_tensor(6, 77)
        path = tmp_path / "tensor.txt"
        write_tensor_text(path, t)
        back = read_tensor_text(path)
        assert back.d == 6
        assert np.max(np.abs(back.mat - t.mat)) < 1e-15

    def test_rejects_lower_triangle_entries(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("4\n2 1 0.5 0.0\n")
        with pytest.raises(ValueError):
            read_tensor_text(path)

    def test_header_only_is_zero_tensor(self, tmp_path):
        path = tmp_path / "zero.txt"
        path.write_text("3\n")
        t = read_tensor_text(path)
        assert t.norm() == 0.0


class TestCanonicalFormValidation:
    def test_rejects_nonorthonormal(self):
        vecs = np.ones((4, 2), dtype=complex)
        with pytest.raises(ValueError):
            CanonicalForm(np.array([1.0]), vecs)

    def test_rejects_ascending_lambdas(self):
        form = canonical_from_lambdas([0.8, 0.6])
        with pytest.raises(ValueError):
            CanonicalForm(form.lambdas[::-1].copy(), form.vectors)
