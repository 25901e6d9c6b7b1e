"""ROC curves, AUC, and the discrimination verdict.

AUC is the Mann-Whitney statistic (ties count one half per pair), computed
in O(m log m) by sorting.  The ROC curve groups tied scores so a tied block
contributes a single diagonal segment, which makes the trapezoidal area
agree with the pairwise count exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, DimensionError

VERDICT_VALIDATED = "validated"
VERDICT_NOT_VALIDATED = "not_validated"
AUC_THRESHOLD = 0.7


@dataclass(frozen=True)
class RocCurve:
    """ROC points from (0,0) to (1,1) with the score cutoff of each point."""

    points: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        thresholds = np.asarray(self.thresholds, dtype=float)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "thresholds", thresholds)
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] != thresholds.size:
            raise DimensionError("ROC points must be (k, 2) with k matching thresholds")
        if np.any(np.diff(points, axis=0) < 0):
            raise DataError("ROC coordinates must be non-decreasing")
        if not (np.all(points[0] == 0.0) and np.all(points[-1] == 1.0)):
            raise DataError("ROC curve must run from (0,0) to (1,1)")

    def area(self) -> float:
        """Trapezoidal area under the curve."""
        fpr, tpr = self.points[:, 0], self.points[:, 1]
        return float(np.trapezoid(tpr, fpr))


def _check_scores_labels(scores, labels):
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if scores.ndim != 1 or scores.shape != labels.shape:
        raise DimensionError("scores and labels must be 1-D vectors of equal length")
    if not np.all((labels == 0.0) | (labels == 1.0)):
        raise DataError("labels must contain only 0 and 1")
    if labels.min() == labels.max():
        raise DataError("ROC evaluation requires both classes present")
    return scores, labels


def roc_curve(scores, labels) -> RocCurve:
    """ROC curve with one point per distinct score threshold."""
    scores, labels = _check_scores_labels(scores, labels)
    n1 = labels.sum()
    n0 = labels.size - n1
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    # group ties: keep only the last index of each run of equal scores
    boundary = np.nonzero(np.diff(s))[0]
    ends = np.append(boundary, s.size - 1)
    tp = np.cumsum(y)[ends]
    fp = np.cumsum(1.0 - y)[ends]
    points = np.column_stack([np.concatenate([[0.0], fp / n0]), np.concatenate([[0.0], tp / n1])])
    thresholds = np.concatenate([[np.inf], s[ends]])
    return RocCurve(points=points, thresholds=thresholds)


def auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie)."""
    scores, labels = _check_scores_labels(scores, labels)
    n1 = labels.sum()
    n0 = labels.size - n1
    order = np.argsort(scores, kind="stable")
    s = scores[order]
    # midranks: average rank within each tied group (1-based)
    boundary = np.nonzero(np.diff(s))[0]
    starts = np.concatenate([[0], boundary + 1])
    ends = np.append(boundary, s.size - 1)
    midrank = np.repeat((starts + ends) / 2.0 + 1.0, ends - starts + 1)
    rank_sum_pos = midrank[labels[order] == 1.0].sum()
    u = rank_sum_pos - n1 * (n1 + 1) / 2.0
    return float(u / (n1 * n0))


def discrimination_verdict(auc_value: float) -> str:
    """"validated" when AUC strictly exceeds 0.7, else "not_validated"."""
    if not 0.0 <= auc_value <= 1.0:
        raise DataError(f"AUC must lie in [0, 1], got {auc_value}")
    return VERDICT_VALIDATED if auc_value > AUC_THRESHOLD else VERDICT_NOT_VALIDATED
