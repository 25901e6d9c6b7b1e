"""Penalized logistic estimators in the wavelet domain.

Five estimators share one objective shape: the Bernoulli negative
log-likelihood plus an l1 penalty on the detail coefficients, optionally
restricted to a reduced subspace omega = V_q @ gamma.

- wnet: penalty only, solved by accelerated proximal gradient (monotone
  restart, backtracking step size).
- wpcr / wpls: penalty plus subspace constraint, a generalized lasso in
  gamma, solved by ADMM with Newton gamma-updates.
- wcr / wls: subspace constraint from a sparse reduction, no penalty,
  solved by IRLS on the reduced design.

Scale coefficients (the first 2**j0 positions) and the intercept are never
penalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DataError, DimensionError, NumericalError
from .glm import LabeledCoefficients, LinearModelState, _irls_core, _nll_from_eta, link_logistic
from .reduce import (
    KIND_PCA,
    KIND_SPARSE_PCA,
    KIND_SPARSE_PLS,
    ReducedBasis,
    pca_fit,
    pls_fit,
    sparse_component_fit,
)
from .wavelet import WaveletBasis, dwt_inverse

ESTIMATORS = ("wnet", "wcr", "wls", "wpcr", "wpls")


@dataclass(frozen=True)
class FitConfig:
    """Estimator choice plus its tuning parameters and solver tolerances."""

    estimator: str
    lam: float = 0.0
    q: int | None = None
    tau: float = 0.0
    tol: float = 1e-7
    max_iter: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise DataError(f"unknown estimator {self.estimator!r} (choose from {ESTIMATORS})")
        if self.lam < 0:
            raise DataError(f"penalty level must be >= 0, got {self.lam}")
        if self.estimator != "wnet" and (self.q is None or self.q < 1):
            raise DataError(f"estimator {self.estimator!r} needs a component count q >= 1")
        if self.tau < 0:
            raise DataError(f"sparse-reduction threshold must be >= 0, got {self.tau}")


@dataclass(frozen=True)
class PenalizedSolution:
    """Fitted coefficients with solver diagnostics."""

    omega: np.ndarray
    intercept: float
    gamma: np.ndarray | None
    objective_trace: np.ndarray
    kkt_residual: float
    nonzero_detail_count: int
    iterations: int

    def state(self) -> LinearModelState:
        return LinearModelState(omega=self.omega, intercept=self.intercept)


def soft_threshold(z, t):
    """sign(z) * max(|z| - t, 0); exact zeros inside the threshold."""
    if t < 0:
        raise DataError(f"threshold must be >= 0, got {t}")
    z = np.asarray(z, dtype=float)
    out = np.sign(z) * np.maximum(np.abs(z) - t, 0.0)
    return float(out) if out.ndim == 0 else out


def _detail_mask(data: LabeledCoefficients) -> np.ndarray:
    mask = np.ones(data.d, dtype=bool)
    mask[: data.n_scale] = False
    return mask


def _nll_grad(aug: np.ndarray, y: np.ndarray, beta: np.ndarray):
    eta = aug @ beta
    resid = link_logistic(eta) - y
    return _nll_from_eta(eta, y), aug.T @ resid


def lambda_max(data: LabeledCoefficients) -> float:
    """Smallest penalty that zeroes the whole detail block.

    Computed as the sup-norm of the detail-coordinate gradient at the
    scale-plus-intercept maximum-likelihood fit (the lasso null model).
    """
    data.require_both_classes()
    coef, intercept, _ = _irls_core(data.theta[:, : data.n_scale], data.labels, 200, 1e-10)
    beta = np.zeros(data.d + 1)
    beta[0] = intercept
    beta[1 : 1 + data.n_scale] = coef
    # evaluate through the same augmented design the solver uses, so the
    # solver started at this point sees bit-identical detail gradients
    aug = np.column_stack([np.ones(data.n), data.theta])
    _, grad = _nll_grad(aug, data.labels, beta)
    return float(np.max(np.abs(grad[1:][_detail_mask(data)])))


def _kkt_residual(grad: np.ndarray, beta: np.ndarray, lam: float, pen: np.ndarray) -> float:
    """Sup-norm violation of the l1 stationarity conditions.

    ``pen`` marks the penalized coordinates of the augmented vector; the
    rest must have zero gradient at an optimum.
    """
    res = 0.0
    free = ~pen
    if np.any(free):
        res = float(np.max(np.abs(grad[free])))
    zero = pen & (beta == 0.0)
    if np.any(zero):
        res = max(res, float(np.max(np.abs(grad[zero]) - lam, initial=0.0)))
    active = pen & (beta != 0.0)
    if np.any(active):
        res = max(res, float(np.max(np.abs(grad[active] + lam * np.sign(beta[active])))))
    return res


def fit_wnet(data: LabeledCoefficients, config: FitConfig) -> PenalizedSolution:
    """l1-penalized fit by accelerated proximal gradient with monotone restart."""
    if config.estimator != "wnet":
        raise DataError(f"fit_wnet called with estimator {config.estimator!r}")
    data.require_both_classes()
    lam = config.lam
    y = data.labels
    n = data.n
    # column 0 is the intercept; penalty applies to detail coordinates only
    aug = np.column_stack([np.ones(n), data.theta])
    pen = np.concatenate([[False], _detail_mask(data)])

    def objective(beta):
        return _nll_from_eta(aug @ beta, y) + lam * np.sum(np.abs(beta[pen]))

    def prox(beta, step):
        out = beta.copy()
        out[pen] = soft_threshold(beta[pen], step * lam)
        return out

    # optimistic curvature estimate; backtracking doubles it as needed
    lipschitz = max(np.sum(aug * aug) / (4.0 * n), 1e-12)

    def descend(point):
        """One backtracked proximal-gradient step from ``point``."""
        nonlocal lipschitz
        nll_p, grad_p = _nll_grad(aug, y, point)
        while True:
            step = 1.0 / lipschitz
            cand = prox(point - step * grad_p, step)
            diff = cand - point
            bound = nll_p + grad_p @ diff + (diff @ diff) / (2.0 * step)
            if _nll_from_eta(aug @ cand, y) <= bound + 1e-12:
                return cand
            lipschitz *= 2.0

    # warm start at the scale-plus-intercept maximum-likelihood fit: the
    # critical penalty is defined by the gradient at this point, so any
    # lam at or above it keeps the detail block exactly zero from step one
    beta = np.zeros(aug.shape[1])
    try:
        coef0, int0, _ = _irls_core(data.theta[:, : data.n_scale], y, 200, 1e-10)
        beta[0] = int0
        beta[1 : 1 + data.n_scale] = coef0
    except NumericalError:
        pass
    momentum = beta.copy()
    t_k = 1.0
    obj = objective(beta)
    trace = [obj]
    kkt = np.inf
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        cand = descend(momentum)
        cand_obj = objective(cand)
        if cand_obj > obj + 1e-12:
            # momentum overshot: restart acceleration from the accepted iterate
            t_k = 1.0
            cand = descend(beta)
            cand_obj = objective(cand)
            if cand_obj > obj + 1e-12:
                cand, cand_obj = beta, obj
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t_k * t_k)) / 2.0
        momentum = cand + ((t_k - 1.0) / t_next) * (cand - beta)
        t_k = t_next
        rel_change = abs(obj - cand_obj) / max(1.0, abs(obj))
        beta, obj = cand, cand_obj
        trace.append(obj)
        _, grad = _nll_grad(aug, y, beta)
        kkt = _kkt_residual(grad, beta, lam, pen)
        if kkt <= 1e-5 and rel_change <= config.tol:
            break
    else:
        raise ConvergenceError(
            f"proximal gradient did not converge in {config.max_iter} iterations "
            f"(KKT residual {kkt:.3e})",
            last_solution=(beta[1:].copy(), float(beta[0])),
            residual=kkt,
        )
    omega = beta[1:]
    return PenalizedSolution(
        omega=omega,
        intercept=float(beta[0]),
        gamma=None,
        objective_trace=np.asarray(trace),
        kkt_residual=kkt,
        nonzero_detail_count=int(np.count_nonzero(omega[_detail_mask(data)])),
        iterations=iterations,
    )


def _check_basis(data: LabeledCoefficients, basis: ReducedBasis):
    if basis.d != data.d:
        raise DimensionError(f"reduction built for d={basis.d}, data has d={data.d}")


def fit_reduced_penalized(
    data: LabeledCoefficients, basis: ReducedBasis, config: FitConfig
) -> PenalizedSolution:
    """Penalized fit constrained to omega = V_q @ gamma, solved by ADMM.

    The splitting variable is z = D V_q gamma (the detail block of omega),
    so the l1 prox stays separable while gamma carries the likelihood.
    """
    data.require_both_classes()
    _check_basis(data, basis)
    lam = config.lam
    y = data.labels
    n, q = data.n, basis.q
    detail = _detail_mask(data)
    # design in gamma space, with an intercept column
    design = np.column_stack([np.ones(n), data.theta @ basis.loadings])
    d_map = basis.loadings[detail]  # maps gamma to the penalized block
    rho = max(lam, 1.0)

    def objective(coef):
        pen_block = d_map @ coef[1:]
        return _nll_from_eta(design @ coef, y) + lam * np.sum(np.abs(pen_block))

    coef = np.zeros(q + 1)
    z = np.zeros(d_map.shape[0])
    dual = np.zeros_like(z)
    trace = [objective(coef)]
    best = trace[0]
    eps_primal = 1e-6 * np.sqrt(z.size)
    eps_dual = 1e-6 * np.sqrt(q + 1)
    iterations = 0
    converged = False
    for iterations in range(1, config.max_iter + 1):
        # gamma-update: smooth subproblem NLL + (rho/2)||D g - z + u||^2 by Newton
        for _ in range(50):
            eta = design @ coef
            p = link_logistic(eta)
            resid_vec = d_map @ coef[1:] - z + dual
            grad = design.T @ (p - y)
            grad[1:] += rho * (d_map.T @ resid_vec)
            if np.max(np.abs(grad)) <= 1e-9 * max(1.0, rho):
                break
            w = p * (1.0 - p)
            hess = (design * w[:, None]).T @ design
            hess[1:, 1:] += rho * (d_map.T @ d_map)
            hess[np.diag_indices_from(hess)] += 1e-10
            step = np.linalg.solve(hess, grad)
            # dampen so the inner objective never increases
            cur = _nll_from_eta(eta, y) + 0.5 * rho * (resid_vec @ resid_vec)
            scale = 1.0
            for _ in range(40):
                cand = coef - scale * step
                r2 = d_map @ cand[1:] - z + dual
                val = _nll_from_eta(design @ cand, y) + 0.5 * rho * (r2 @ r2)
                if val <= cur + 1e-12:
                    break
                scale *= 0.5
            coef = coef - scale * step
        pen_block = d_map @ coef[1:]
        z_new = soft_threshold(pen_block + dual, lam / rho)
        dual_res = rho * np.linalg.norm(d_map.T @ (z_new - z))
        z = z_new
        primal = pen_block - z
        dual = dual + primal
        primal_res = np.linalg.norm(primal)
        trace.append(min(best, objective(coef)))
        best = trace[-1]
        if primal_res <= eps_primal and dual_res <= eps_dual:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"ADMM did not converge in {config.max_iter} iterations "
            f"(primal residual {primal_res:.3e}, dual residual {dual_res:.3e})",
            last_solution=(coef[1:].copy(), float(coef[0])),
            residual=float(max(primal_res, dual_res)),
        )
    gamma = coef[1:]
    omega = basis.loadings @ gamma
    # sparsity is read off the prox variable: the detail block of omega is
    # only feasibility-close to z, never exactly zero
    return PenalizedSolution(
        omega=omega,
        intercept=float(coef[0]),
        gamma=gamma,
        objective_trace=np.asarray(trace),
        kkt_residual=float(max(primal_res, dual_res)),
        nonzero_detail_count=int(np.count_nonzero(z)),
        iterations=iterations,
    )


def fit_reduced_unpenalized(
    data: LabeledCoefficients, basis: ReducedBasis, config: FitConfig
) -> PenalizedSolution:
    """Maximum-likelihood fit of gamma on a sparse-reduced design by IRLS."""
    data.require_both_classes()
    _check_basis(data, basis)
    if basis.kind not in (KIND_SPARSE_PCA, KIND_SPARSE_PLS):
        raise DataError(
            f"unpenalized reduced fit expects a sparse reduction, got kind={basis.kind!r}"
        )
    design = data.theta @ basis.loadings
    nll_start = _nll_from_eta(np.zeros(data.n), data.labels)
    gamma, intercept, iterations = _irls_core(
        design, data.labels, max_iter=200, tol=1e-8, separation_bound=1e3
    )
    omega = basis.loadings @ gamma
    aug = np.column_stack([np.ones(data.n), design])
    nll_end, grad = _nll_grad(aug, data.labels, np.concatenate([[intercept], gamma]))
    detail = _detail_mask(data)
    return PenalizedSolution(
        omega=omega,
        intercept=intercept,
        gamma=gamma,
        objective_trace=np.asarray([nll_start, nll_end]),
        kkt_residual=float(np.max(np.abs(grad))),
        nonzero_detail_count=int(np.count_nonzero(omega[detail])),
        iterations=iterations,
    )


def beta_estimate(solution: PenalizedSolution, basis: WaveletBasis) -> np.ndarray:
    """The fitted discriminant function sampled on the time grid."""
    if solution.omega.shape[0] != basis.d:
        raise DimensionError(
            f"solution has {solution.omega.shape[0]} coefficients, basis expects d={basis.d}"
        )
    return dwt_inverse(solution.omega, basis)


def build_reduction(data: LabeledCoefficients, config: FitConfig) -> ReducedBasis | None:
    """The reduction an estimator needs, fit on the training data; None for wnet."""
    if config.estimator == "wnet":
        return None
    if config.estimator == "wpcr":
        return pca_fit(data.theta, config.q)
    if config.estimator == "wpls":
        return pls_fit(data.theta, data.labels, config.q)
    kind = KIND_SPARSE_PCA if config.estimator == "wcr" else KIND_SPARSE_PLS
    labels = None if kind == KIND_SPARSE_PCA else data.labels
    return sparse_component_fit(data.theta, labels, config.q, config.tau, kind)


def fit_estimator(
    data: LabeledCoefficients, config: FitConfig, basis: ReducedBasis | None = None
) -> PenalizedSolution:
    """Dispatch a config to its solver, building the reduction if needed."""
    if config.estimator == "wnet":
        return fit_wnet(data, config)
    if basis is None:
        basis = build_reduction(data, config)
    if config.estimator in ("wpcr", "wpls"):
        return fit_reduced_penalized(data, basis, config)
    return fit_reduced_unpenalized(data, basis, config)
