"""Logistic regression on wavelet coefficients.

The model is P(Y=1 | x) = sigmoid(intercept + theta @ omega) where theta
holds the wavelet coefficients of the observed curve.  This module owns the
likelihood, its gradient, and an unpenalized maximum-likelihood fitter used
as the zero-penalty reference by the penalized solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ConvergenceError,
    DataError,
    DimensionError,
    SeparationError,
    SingularityError,
)


@dataclass(frozen=True)
class LabeledCoefficients:
    """Coefficient matrix (n rows of length d) with binary labels."""

    theta: np.ndarray
    labels: np.ndarray
    j0: int
    d: int

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        labels = np.asarray(self.labels, dtype=float)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "labels", labels)
        if theta.ndim != 2:
            raise DimensionError(f"theta must be 2-D, got ndim={theta.ndim}")
        n, d = theta.shape
        if labels.shape != (n,):
            raise DimensionError(
                f"labels shape {labels.shape} does not match {n} rows of theta"
            )
        if d != self.d:
            raise DimensionError(f"theta has {d} columns, expected d={self.d}")
        if n < 2 or d < 2:
            raise DataError(f"need n >= 2 and d >= 2, got n={n}, d={d}")
        if not np.all((labels == 0.0) | (labels == 1.0)):
            raise DataError("labels must contain only 0 and 1")
        if self.j0 < 0 or (1 << self.j0) >= d:
            raise DataError(f"j0={self.j0} incompatible with d={d}")

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def n_scale(self) -> int:
        return 1 << self.j0

    def require_both_classes(self):
        if self.labels.min() == self.labels.max():
            raise DataError("fitting requires at least one observation of each class")


@dataclass(frozen=True)
class LinearModelState:
    """Wavelet-domain coefficient vector plus an unpenalized intercept."""

    omega: np.ndarray
    intercept: float

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.ndim != 1:
            raise DimensionError(f"omega must be 1-D, got ndim={omega.ndim}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "intercept", float(self.intercept))


def linear_predictor(state: LinearModelState, theta_row) -> np.ndarray | float:
    """intercept + theta @ omega for one row or a stack of rows."""
    theta_row = np.asarray(theta_row, dtype=float)
    if theta_row.shape[-1] != state.omega.shape[0]:
        raise DimensionError(
            f"theta has {theta_row.shape[-1]} columns, omega has {state.omega.shape[0]}"
        )
    eta = theta_row @ state.omega + state.intercept
    return float(eta) if eta.ndim == 0 else eta


def link_logistic(eta):
    """Numerically stable sigmoid 1/(1 + exp(-eta)).

    Output is clamped to [1e-15, 1 - 1e-15] so a probability is never
    exactly 0 or 1; the clamp only binds for |eta| > ~34.5.
    """
    eta = np.asarray(eta, dtype=float)
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ez = np.exp(eta[~pos])
    out[~pos] = ez / (1.0 + ez)
    out = np.clip(out, 1e-15, 1.0 - 1e-15)
    return float(out) if out.ndim == 0 else out


def _nll_from_eta(eta: np.ndarray, y: np.ndarray) -> float:
    # -[y log p + (1-y) log(1-p)] = log(1 + e^eta) - y*eta, stable via logaddexp
    return float(np.sum(np.logaddexp(0.0, eta) - y * eta))


def neg_log_likelihood(state: LinearModelState, data: LabeledCoefficients) -> float:
    """Bernoulli negative log-likelihood; finite for all finite inputs."""
    eta = linear_predictor(state, data.theta)
    return _nll_from_eta(np.asarray(eta), data.labels)


def nll_gradient(state: LinearModelState, data: LabeledCoefficients):
    """Gradient of the NLL: (theta^T (p - y), sum(p - y))."""
    eta = np.asarray(linear_predictor(state, data.theta))
    resid = link_logistic(eta) - data.labels
    return data.theta.T @ resid, float(resid.sum())


def _irls_core(
    design: np.ndarray,
    y: np.ndarray,
    max_iter: int,
    tol: float,
    separation_bound: float | None = None,
):
    """IRLS for logistic regression on ``design`` plus an intercept column.

    Returns (coef, intercept, iterations).  Raises ConvergenceError with the
    last iterate attached when max_iter is exhausted, SingularityError when
    the weighted normal equations stay singular after a ridge fallback, and
    SeparationError when coefficients pass ``separation_bound``.
    """
    n, k = design.shape
    aug = np.column_stack([np.ones(n), design])
    beta = np.zeros(k + 1)
    nll = _nll_from_eta(aug @ beta, y)
    for iteration in range(1, max_iter + 1):
        eta = aug @ beta
        p = link_logistic(eta)
        resid = p - y
        grad = aug.T @ resid
        if np.max(np.abs(grad)) <= tol:
            return beta[1:], float(beta[0]), iteration - 1
        w = p * (1.0 - p)
        sw = np.sqrt(w)
        # Newton step as a least-squares problem: min ||sw*aug @ step - (y-p)/sw||
        lhs = aug * sw[:, None]
        rhs = np.divide(y - p, sw, out=np.zeros_like(sw), where=sw > 0)
        step, _, rank, _ = np.linalg.lstsq(lhs, rhs, rcond=None)
        if rank < k + 1:
            gram = lhs.T @ lhs + 1e-10 * np.eye(k + 1)
            try:
                step = np.linalg.solve(gram, aug.T @ (y - p))
            except np.linalg.LinAlgError as exc:
                raise SingularityError(
                    "weighted normal equations are singular even with ridge fallback"
                ) from exc
        scale = 1.0
        for _ in range(40):
            candidate = beta + scale * step
            cand_nll = _nll_from_eta(aug @ candidate, y)
            if cand_nll <= nll + 1e-12:
                break
            scale *= 0.5
        else:
            raise ConvergenceError(
                "step halving failed to decrease the negative log-likelihood",
                last_solution=(beta[1:].copy(), float(beta[0])),
                residual=float(np.max(np.abs(grad))),
            )
        beta, nll = candidate, cand_nll
        if separation_bound is not None and np.max(np.abs(beta[1:])) > separation_bound:
            raise SeparationError(
                "coefficients diverged, which indicates separable classes; "
                "use fewer components (smaller q) or more sparsity (larger tau)"
            )
    eta = aug @ beta
    grad = aug.T @ (link_logistic(eta) - y)
    if np.max(np.abs(grad)) <= tol:
        return beta[1:], float(beta[0]), max_iter
    raise ConvergenceError(
        f"IRLS did not reach gradient tolerance {tol} in {max_iter} iterations",
        last_solution=(beta[1:].copy(), float(beta[0])),
        residual=float(np.max(np.abs(grad))),
    )


def irls_fit(
    data: LabeledCoefficients,
    max_iter: int = 100,
    tol: float = 1e-8,
    columns=None,
) -> LinearModelState:
    """Unpenalized maximum-likelihood fit.

    ``columns`` restricts the model to a subset of coefficient positions
    (an empty list fits the intercept alone); omitted positions stay 0.
    """
    data.require_both_classes()
    if columns is None:
        cols = np.arange(data.d)
    else:
        cols = np.asarray(columns, dtype=int)
    coef, intercept, _ = _irls_core(data.theta[:, cols], data.labels, max_iter, tol)
    omega = np.zeros(data.d)
    omega[cols] = coef
    return LinearModelState(omega=omega, intercept=intercept)
