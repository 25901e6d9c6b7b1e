"""Tests for PCA/PLS reduction and their sparse variants."""

import numpy as np
import pytest

from wavelogit.exceptions import DataError, RankDeficiencyError, SparsityError
from wavelogit.reduce import (
    KIND_SPARSE_PCA,
    KIND_SPARSE_PLS,
    ReducedBasis,
    expand,
    pca_fit,
    pls_fit,
    reduce,
    sparse_component_fit,
)


def planted_labels(rng, n):
    labels = rng.integers(0, 2, size=n).astype(float)
    if labels.min() == labels.max():
        labels[0] = 1.0 - labels[0]
    return labels


class TestPcaFit:
    def test_two_point_instance(self):
        """Spread only along the first axis: loading e_1, eigenvalue 2."""
        theta = np.array([[1.0, 0.0], [-1.0, 0.0]])
        basis = pca_fit(theta, q=1)
        np.testing.assert_allclose(basis.loadings[:, 0], [1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(basis.scores_scale, [2.0], atol=1e-12)
        np.testing.assert_allclose(basis.center, [0.0, 0.0], atol=0)

    def test_isotropic_spectrum(self):
        d = 6
        basis = pca_fit(np.eye(d), q=d - 1)
        spread = basis.scores_scale.max() - basis.scores_scale.min()
        assert spread <= 1e-10
        gram = basis.loadings.T @ basis.loadings
        np.testing.assert_allclose(gram, np.eye(d - 1), atol=1e-10)

    def test_full_rank_reconstructs_covariance(self):
        rng = np.random.default_rng(0)
        theta = rng.standard_normal((50, 16))
        basis = pca_fit(theta, q=16)
        centered = theta - theta.mean(axis=0)
        cov = centered.T @ centered / 49
        rebuilt = basis.loadings @ np.diag(basis.scores_scale) @ basis.loadings.T
        assert np.linalg.norm(rebuilt - cov) <= 1e-8

    def test_eigenvalue_sum_is_total_variance(self):
        rng = np.random.default_rng(1)
        theta = rng.standard_normal((30, 8)) * rng.uniform(0.5, 3.0, size=8)
        basis = pca_fit(theta, q=8)
        centered = theta - theta.mean(axis=0)
        total = np.trace(centered.T @ centered / 29)
        assert abs(basis.scores_scale.sum() - total) / total <= 1e-8

    def test_projection_preserves_row_norms_at_full_q(self):
        rng = np.random.default_rng(2)
        theta = rng.standard_normal((20, 8))
        basis = pca_fit(theta, q=8)
        centered = theta - basis.center
        projected = reduce(basis, theta)
        np.testing.assert_allclose(
            np.linalg.norm(projected, axis=1), np.linalg.norm(centered, axis=1), rtol=1e-8
        )

    def test_sign_convention(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            theta = rng.standard_normal((15, 5))
            basis = pca_fit(theta, q=4)
            for k in range(4):
                v = basis.loadings[:, k]
                assert v[np.argmax(np.abs(v))] > 0

    def test_q_out_of_range(self):
        theta = np.zeros((5, 3))
        with pytest.raises(DataError):
            pca_fit(theta, q=0)
        with pytest.raises(DataError):
            pca_fit(theta, q=5)  # q > n-1

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        theta = rng.standard_normal((25, 10))
        b1 = pca_fit(theta, q=5)
        b2 = pca_fit(theta, q=5)
        assert np.array_equal(b1.loadings, b2.loadings)
        assert np.array_equal(b1.scores_scale, b2.scores_scale)


class TestPlsFit:
    def test_signal_in_first_coordinate(self):
        rng = np.random.default_rng(5)
        n = 200
        labels = np.array([0.0, 1.0] * (n // 2))
        y_c = labels - labels.mean()
        noise = rng.standard_normal(n)
        noise -= noise @ y_c / (y_c @ y_c) * y_c  # orthogonal to the label signal
        theta = np.column_stack([y_c, noise])
        basis = pls_fit(theta, labels, q=1)
        np.testing.assert_allclose(np.abs(basis.loadings[:, 0]), [1.0, 0.0], atol=1e-8)

    def test_first_component_closed_form(self):
        """Component 1 is the normalized covariance vector of centered data."""
        rng = np.random.default_rng(6)
        theta = rng.standard_normal((60, 8))
        labels = planted_labels(rng, 60)
        basis = pls_fit(theta, labels, q=2)
        centered = theta - theta.mean(axis=0)
        w = centered.T @ (labels - labels.mean())
        np.testing.assert_allclose(basis.loadings[:, 0], w / np.linalg.norm(w), atol=1e-10)

    def test_single_class_rejected(self):
        theta = np.zeros((4, 3))
        with pytest.raises(DataError):
            pls_fit(theta, np.ones(4), q=1)

    def test_scores_mutually_orthogonal(self):
        rng = np.random.default_rng(7)
        theta = rng.standard_normal((40, 10))
        labels = planted_labels(rng, 40)
        basis = pls_fit(theta, labels, q=4)
        centered = theta - basis.center
        residual = centered.copy()
        scores = []
        for k in range(4):
            t = residual @ basis.loadings[:, k]
            scores.append(t)
            residual = residual - np.outer(t, residual.T @ t / (t @ t))
        for a in range(4):
            for b in range(a + 1, 4):
                na, nb = np.linalg.norm(scores[a]), np.linalg.norm(scores[b])
                assert abs(scores[a] @ scores[b]) / (na * nb) <= 1e-8

    def test_rank_deficiency_reports_components(self):
        # rank-one design: one PLS direction exhausts the label covariance
        n = 20
        labels = np.array([0.0, 1.0] * (n // 2))
        theta = np.outer(labels - 0.5, np.array([1.0, 2.0, -1.0]))
        with pytest.raises(RankDeficiencyError) as info:
            pls_fit(theta, labels, q=3)
        assert info.value.components_achieved == 1


class TestSparseComponents:
    def test_tau_zero_matches_dense_pca(self):
        rng = np.random.default_rng(8)
        theta = rng.standard_normal((30, 12)) * rng.uniform(0.5, 2.5, size=12)
        dense = pca_fit(theta, q=4)
        sparse = sparse_component_fit(theta, None, q=4, sparsity=0.0, kind=KIND_SPARSE_PCA)
        np.testing.assert_allclose(sparse.loadings, dense.loadings, atol=1e-8)

    def test_tau_zero_matches_dense_pls(self):
        rng = np.random.default_rng(9)
        theta = rng.standard_normal((40, 10))
        labels = planted_labels(rng, 40)
        dense = pls_fit(theta, labels, q=3)
        sparse = sparse_component_fit(theta, labels, q=3, sparsity=0.0, kind=KIND_SPARSE_PLS)
        np.testing.assert_allclose(sparse.loadings, dense.loadings, atol=1e-8)

    def test_single_active_coordinate(self):
        rng = np.random.default_rng(10)
        n = 50
        theta = np.zeros((n, 6))
        theta[:, 2] = rng.standard_normal(n) * 5.0
        basis = sparse_component_fit(theta, None, q=1, sparsity=0.5, kind=KIND_SPARSE_PCA)
        np.testing.assert_allclose(np.abs(basis.loadings[:, 0]), np.eye(6)[2], atol=1e-10)

    def test_planted_support_recovered(self):
        """With tau sized to keep ~4 coordinates, most mass sits on the truth."""
        rng = np.random.default_rng(11)
        n, d = 40, 16
        support = np.array([1, 5, 9, 13])
        factor = np.zeros(d)
        factor[support] = np.array([1.0, -0.8, 0.9, 0.7])
        scores = rng.standard_normal(n) * 3.0
        theta = np.outer(scores, factor) + 0.3 * rng.standard_normal((n, d))
        basis = sparse_component_fit(theta, None, q=1, sparsity=0.2, kind=KIND_SPARSE_PCA)
        v = basis.loadings[:, 0]
        assert np.sum(v[support] ** 2) >= 0.7

    def test_too_much_sparsity_raises(self):
        rng = np.random.default_rng(12)
        theta = rng.standard_normal((20, 5))
        with pytest.raises(SparsityError) as info:
            sparse_component_fit(theta, None, q=1, sparsity=1e6, kind=KIND_SPARSE_PCA)
        assert info.value.component_index == 0

    def test_sparse_pls_thresholds_covariance_vector(self):
        """Component 1 soft-thresholds the unit-normalized covariance vector."""
        rng = np.random.default_rng(13)
        theta = rng.standard_normal((60, 8))
        labels = planted_labels(rng, 60)
        tau = 0.15
        basis = sparse_component_fit(theta, labels, q=1, sparsity=tau, kind=KIND_SPARSE_PLS)
        centered = theta - theta.mean(axis=0)
        w = centered.T @ (labels - labels.mean())
        w /= np.linalg.norm(w)
        expected = np.sign(w) * np.maximum(np.abs(w) - tau, 0.0)
        expected /= np.linalg.norm(expected)
        assert np.count_nonzero(expected) < 8  # the threshold actually bites
        np.testing.assert_allclose(basis.loadings[:, 0], expected, atol=1e-10)

    def test_bad_kind_rejected(self):
        with pytest.raises(DataError):
            sparse_component_fit(np.zeros((4, 3)), None, q=1, sparsity=0.0, kind="pca")


class TestReduceExpand:
    def test_expand_unit_gamma_gives_column(self):
        rng = np.random.default_rng(14)
        theta = rng.standard_normal((20, 6))
        basis = pca_fit(theta, q=3)
        gamma = np.eye(3)[0]
        np.testing.assert_allclose(expand(basis, gamma), basis.loadings[:, 0], atol=0)

    def test_pca_full_q_round_trip(self):
        rng = np.random.default_rng(15)
        theta = rng.standard_normal((20, 8))
        basis = pca_fit(theta, q=8)
        centered = theta - basis.center
        back = expand(basis, reduce(basis, theta))
        np.testing.assert_allclose(back, centered, atol=1e-8)

    def test_reduce_after_expand_is_identity(self):
        rng = np.random.default_rng(16)
        theta = rng.standard_normal((25, 10))
        basis = pca_fit(theta, q=4)
        for _ in range(20):
            gamma = rng.standard_normal(4)
            back = (expand(basis, gamma)) @ basis.loadings  # V^T V gamma
            np.testing.assert_allclose(back, gamma, atol=1e-10)

    def test_dimension_checks(self):
        basis = pca_fit(np.random.default_rng(17).standard_normal((10, 5)), q=2)
        with pytest.raises(Exception):
            reduce(basis, np.zeros(4))
        with pytest.raises(Exception):
            expand(basis, np.zeros(3))


class TestReducedBasisValidation:
    def test_rejects_non_unit_columns(self):
        with pytest.raises(DataError):
            ReducedBasis(
                loadings=np.array([[2.0], [0.0]]),
                scores_scale=np.array([1.0]),
                kind="pca",
                center=np.zeros(2),
            )

    def test_rejects_increasing_eigenvalues(self):
        with pytest.raises(DataError):
            ReducedBasis(
                loadings=np.eye(2),
                scores_scale=np.array([1.0, 2.0]),
                kind="pca",
                center=np.zeros(2),
            )
