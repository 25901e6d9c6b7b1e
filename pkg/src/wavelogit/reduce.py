"""Dimension reduction of the coefficient matrix: PCA, PLS, sparse variants.

Each fit returns a :class:`ReducedBasis` whose loadings form the constraint
matrix V_q used by the reduced estimators (omega = V_q @ gamma).  Sparse
variants run a soft-thresholded rank-one alternating iteration per
component, so a zero threshold reproduces the dense method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, DimensionError, RankDeficiencyError, SparsityError

KIND_PCA = "pca"
KIND_PLS = "pls"
KIND_SPARSE_PCA = "sparse_pca"
KIND_SPARSE_PLS = "sparse_pls"
KINDS = (KIND_PCA, KIND_PLS, KIND_SPARSE_PCA, KIND_SPARSE_PLS)


@dataclass(frozen=True)
class ReducedBasis:
    """Loadings V_q (d x q), per-component criterion values, and the center."""

    loadings: np.ndarray
    scores_scale: np.ndarray
    kind: str
    center: np.ndarray

    def __post_init__(self):
        loadings = np.asarray(self.loadings, dtype=float)
        scores_scale = np.asarray(self.scores_scale, dtype=float)
        center = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "loadings", loadings)
        object.__setattr__(self, "scores_scale", scores_scale)
        object.__setattr__(self, "center", center)
        if self.kind not in KINDS:
            raise DataError(f"unknown reduction kind {self.kind!r}")
        if loadings.ndim != 2:
            raise DimensionError("loadings must be a d x q matrix")
        d, q = loadings.shape
        if not 1 <= q <= d:
            raise DataError(f"need 1 <= q <= d, got q={q}, d={d}")
        if scores_scale.shape != (q,) or center.shape != (d,):
            raise DimensionError("scores_scale must have length q and center length d")
        norms = np.linalg.norm(loadings, axis=0)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise DataError("loadings columns must be unit-norm")
        if self.kind == KIND_PCA:
            gram = loadings.T @ loadings
            if np.max(np.abs(gram - np.eye(q))) > 1e-10:
                raise DataError("pca loadings must be orthonormal")
            if np.any(np.diff(scores_scale) > 1e-12) or np.any(scores_scale < -1e-12):
                raise DataError("pca eigenvalues must be non-increasing and non-negative")

    @property
    def q(self) -> int:
        return self.loadings.shape[1]

    @property
    def d(self) -> int:
        return self.loadings.shape[0]


def _check_q(theta: np.ndarray, q: int):
    n, d = theta.shape
    if n < 2:
        raise DataError(f"reduction needs n >= 2 rows, got n={n}")
    limit = min(n - 1, d)
    if not 1 <= q <= limit:
        raise DataError(f"q={q} outside valid range [1, {limit}] for n={n}, d={d}")


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # reproducible eigenvector orientation: largest-|entry| made positive
    if v[np.argmax(np.abs(v))] < 0:
        return -v
    return v


def _soft(z: np.ndarray, t: float) -> np.ndarray:
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def pca_fit(theta, q: int) -> ReducedBasis:
    """Leading q principal directions of the centered coefficient matrix."""
    theta = np.asarray(theta, dtype=float)
    _check_q(theta, q)
    n = theta.shape[0]
    center = theta.mean(axis=0)
    centered = theta - center
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    eigenvalues = svals**2 / (n - 1)
    loadings = np.column_stack([_fix_sign(vt[k]) for k in range(q)])
    return ReducedBasis(
        loadings=loadings, scores_scale=eigenvalues[:q], kind=KIND_PCA, center=center
    )


def _pls_direction(residual: np.ndarray, y_centered: np.ndarray, k: int) -> np.ndarray:
    w = residual.T @ y_centered
    norm = np.linalg.norm(w)
    if norm < 1e-12:
        raise RankDeficiencyError(
            f"label covariance vanished after {k} component(s)", components_achieved=k
        )
    return w / norm


def _deflate_by_scores(residual: np.ndarray, scores: np.ndarray) -> np.ndarray:
    # rank-one regression of every column on the score vector
    return residual - np.outer(scores, residual.T @ scores / (scores @ scores))


def pls_fit(theta, labels, q: int) -> ReducedBasis:
    """NIPALS partial least squares directions for a binary response."""
    theta = np.asarray(theta, dtype=float)
    labels = np.asarray(labels, dtype=float)
    _check_q(theta, q)
    if labels.shape != (theta.shape[0],):
        raise DimensionError("labels length must match theta rows")
    if labels.min() == labels.max():
        raise DataError("PLS reduction requires both classes present")
    n = theta.shape[0]
    center = theta.mean(axis=0)
    residual = theta - center
    y_c = labels - labels.mean()
    loadings = np.empty((theta.shape[1], q))
    criteria = np.empty(q)
    for k in range(q):
        v = _pls_direction(residual, y_c, k)
        scores = residual @ v
        criteria[k] = abs(scores @ y_c) / (n - 1)
        loadings[:, k] = v
        residual = _deflate_by_scores(residual, scores)
    return ReducedBasis(loadings=loadings, scores_scale=criteria, kind=KIND_PLS, center=center)


def _threshold_direction(raw: np.ndarray, tau: float, k: int) -> np.ndarray:
    # threshold the unit-normalized direction so tau lives on loading scale
    norm = np.linalg.norm(raw)
    if norm < 1e-300:
        raise SparsityError(
            f"component {k + 1} target direction is zero", component_index=k
        )
    target = _soft(raw / norm, tau)
    t_norm = np.linalg.norm(target)
    if t_norm == 0.0:
        raise SparsityError(
            f"threshold tau={tau} removed every coordinate of component {k + 1}",
            component_index=k,
        )
    return target / t_norm


def _sparse_pca_component(residual: np.ndarray, tau: float, k: int) -> np.ndarray:
    _, _, vt = np.linalg.svd(residual, full_matrices=False)
    v = _fix_sign(vt[0])
    for _ in range(500):
        scores = residual @ v
        new_v = _fix_sign(_threshold_direction(residual.T @ scores, tau, k))
        if np.linalg.norm(new_v - v) <= 1e-8:
            v = new_v
            break
        v = new_v
    return v


def _sparse_pls_component(residual: np.ndarray, y_c: np.ndarray, tau: float, k: int) -> np.ndarray:
    w = residual.T @ y_c
    if np.linalg.norm(w) < 1e-12:
        raise RankDeficiencyError(
            f"label covariance vanished after {k} component(s)", components_achieved=k
        )
    return _threshold_direction(w, tau, k)


def sparse_component_fit(theta, labels, q: int, sparsity: float, kind: str) -> ReducedBasis:
    """Sparse PCA/PLS loadings by soft-thresholded alternating iteration.

    ``sparsity`` is compared against entries of the unit-normalized target
    direction, so useful values sit between 0 (dense) and the largest
    absolute loading entry.
    """
    if kind not in (KIND_SPARSE_PCA, KIND_SPARSE_PLS):
        raise DataError(f"kind must be sparse_pca or sparse_pls, got {kind!r}")
    if sparsity < 0:
        raise DataError(f"sparsity threshold must be >= 0, got {sparsity}")
    theta = np.asarray(theta, dtype=float)
    _check_q(theta, q)
    n = theta.shape[0]
    center = theta.mean(axis=0)
    residual = theta - center
    if kind == KIND_SPARSE_PLS:
        labels = np.asarray(labels, dtype=float)
        if labels.shape != (n,):
            raise DimensionError("labels length must match theta rows")
        if labels.min() == labels.max():
            raise DataError("sparse PLS requires both classes present")
        y_c = labels - labels.mean()
    loadings = np.empty((theta.shape[1], q))
    criteria = np.empty(q)
    for k in range(q):
        if kind == KIND_SPARSE_PCA:
            v = _sparse_pca_component(residual, sparsity, k)
            scores = residual @ v
            criteria[k] = scores @ scores / (n - 1)
            loadings[:, k] = v
            # projection deflation keeps tau=0 equal to successive eigenvectors
            residual = residual - np.outer(residual @ v, v)
        else:
            v = _sparse_pls_component(residual, y_c, sparsity, k)
            scores = residual @ v
            criteria[k] = abs(scores @ y_c) / (n - 1)
            loadings[:, k] = v
            residual = _deflate_by_scores(residual, scores)
    return ReducedBasis(loadings=loadings, scores_scale=criteria, kind=kind, center=center)


def reduce(basis: ReducedBasis, theta_row) -> np.ndarray:
    """Project one row (or a stack of rows) onto the components: V_q^T (theta - center)."""
    theta_row = np.asarray(theta_row, dtype=float)
    if theta_row.shape[-1] != basis.d:
        raise DimensionError(f"expected vectors of length {basis.d}, got {theta_row.shape[-1]}")
    return (theta_row - basis.center) @ basis.loadings


def expand(basis: ReducedBasis, gamma) -> np.ndarray:
    """Map component coordinates back to coefficient space: V_q @ gamma (no center)."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape[-1] != basis.q:
        raise DimensionError(f"expected gamma of length {basis.q}, got {gamma.shape[-1]}")
    return gamma @ basis.loadings.T
