"""Confusion metrics, ROC/AUC, and TPR at a capped FPR.

Undefined ratios (0/0) are reported as None, never silently 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValidationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def _ratio(num: int, den: int):
    return None if den == 0 else num / den


def metrics(counts: ConfusionCounts) -> dict:
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    fpr = _ratio(counts.fp, counts.fp + counts.tn)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return {"precision": precision, "recall": recall, "f1": f1,
            "tpr": recall, "fpr": fpr}


def _check_scores(scores_pos, scores_neg):
    pos = np.asarray(scores_pos, dtype=np.float64)
    neg = np.asarray(scores_neg, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValidationError("roc needs nonempty positive and negative score lists")
    return pos, neg


def roc_curve(scores_pos, scores_neg) -> list[tuple[float, float, float]]:
    """(fpr, tpr, threshold) points, thresholds descending from +inf to -inf.

    Equal scores collapse into a single step, which makes the
    trapezoidal area identical to the tie-aware Mann-Whitney statistic.
    """
    pos, neg = _check_scores(scores_pos, scores_neg)
    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    thresholds = np.unique(np.concatenate([pos, neg]))[::-1]
    points = [(0.0, 0.0, float("inf"))]
    npos, nneg = pos.size, neg.size
    for t in thresholds:
        tp = npos - np.searchsorted(pos_sorted, t, side="left")
        fp = nneg - np.searchsorted(neg_sorted, t, side="left")
        points.append((fp / nneg, tp / npos, float(t)))
    points.append((1.0, 1.0, float("-inf")))
    return points


def roc_auc(scores_pos, scores_neg) -> tuple[list[tuple[float, float, float]], float]:
    curve = roc_curve(scores_pos, scores_neg)
    fprs = np.array([p[0] for p in curve])
    tprs = np.array([p[1] for p in curve])
    return curve, float(np.trapezoid(tprs, fprs))


def tpr_at_fpr(scores_pos, scores_neg, fpr_cap: float) -> float:
    """Maximum TPR over thresholds whose FPR does not exceed the cap."""
    if not 0 <= fpr_cap <= 1:
        raise ValidationError(f"fpr_cap must be in [0,1], got {fpr_cap}")
    curve = roc_curve(scores_pos, scores_neg)
    return max(tpr for fpr, tpr, _ in curve if fpr <= fpr_cap)
