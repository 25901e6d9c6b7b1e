"""Fitted-model artifact: coefficients, provenance, and prediction.

A FittedModel bundles everything needed to score new curves: the wavelet
basis parameters, the coefficient vector omega with its intercept, the
tuning parameters that produced them, and, when a reduction was used, the
component loadings and centering vector for inspection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, DimensionError
from .glm import link_logistic
from .penalized import ESTIMATORS, FitConfig, PenalizedSolution
from .reduce import ReducedBasis
from .wavelet import FILTERS, WaveletBasis, dwt_forward, dwt_inverse, make_basis


@dataclass(frozen=True)
class FittedModel:
    """A fitted classifier plus the provenance needed to reproduce it."""

    estimator: str
    family: str
    j0: int
    d: int
    lam: float
    q: int | None
    tau: float
    intercept: float
    omega: np.ndarray
    center: np.ndarray | None
    loadings: np.ndarray | None
    kkt_residual: float
    iterations: int

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise DataError(f"unknown estimator {self.estimator!r} (choose from {ESTIMATORS})")
        if self.family not in FILTERS:
            raise DataError(f"unknown wavelet family {self.family!r}")
        omega = np.ascontiguousarray(np.asarray(self.omega, dtype=float))
        object.__setattr__(self, "omega", omega)
        if omega.shape != (self.d,):
            raise DimensionError(f"omega has shape {omega.shape}, expected ({self.d},)")
        if not np.all(np.isfinite(omega)) or not np.isfinite(self.intercept):
            raise DataError("model coefficients must be finite")
        if (self.center is None) != (self.loadings is None):
            raise DataError("center and loadings must be stored together or not at all")
        if self.loadings is not None:
            loadings = np.ascontiguousarray(np.asarray(self.loadings, dtype=float))
            center = np.ascontiguousarray(np.asarray(self.center, dtype=float))
            object.__setattr__(self, "loadings", loadings)
            object.__setattr__(self, "center", center)
            if self.q is None or loadings.shape != (self.d, self.q):
                raise DimensionError(
                    f"loadings have shape {loadings.shape}, expected ({self.d}, {self.q})"
                )
            if center.shape != (self.d,):
                raise DimensionError(f"center has shape {center.shape}, expected ({self.d},)")

    def wavelet_basis(self) -> WaveletBasis:
        return make_basis(self.family, self.j0, self.d)

    def predict_proba(self, curves) -> np.ndarray:
        """Class-1 probability for each time-domain curve (row)."""
        theta = dwt_forward(curves, self.wavelet_basis())
        return link_logistic(theta @ self.omega + self.intercept)

    def beta(self) -> np.ndarray:
        """The discriminant function sampled on the model's time grid."""
        return dwt_inverse(self.omega, self.wavelet_basis())


def model_from_fit(
    solution: PenalizedSolution,
    config: FitConfig,
    basis: WaveletBasis,
    reduction: ReducedBasis | None = None,
) -> FittedModel:
    """Package a solver result and its provenance into a FittedModel."""
    return FittedModel(
        estimator=config.estimator,
        family=basis.family,
        j0=basis.j0,
        d=basis.d,
        lam=config.lam,
        q=config.q,
        tau=config.tau,
        intercept=solution.intercept,
        omega=solution.omega,
        center=None if reduction is None else reduction.center,
        loadings=None if reduction is None else reduction.loadings,
        kkt_residual=solution.kkt_residual,
        iterations=solution.iterations,
    )
