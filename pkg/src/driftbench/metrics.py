"""Evaluation primitives: confusion counts, P/R/F1, ROC/AUC, run aggregation.

All rates use the zero-denominator convention precision = recall = F1 = 0
when a class has no predicted (or true) samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "EvalReport",
    "RunAggregate",
    "evaluate",
    "macro_f1",
    "roc_auc_ovr",
    "aggregate_runs",
    "decision_grid",
]


@dataclass(frozen=True)
class EvalReport:
    classes: tuple[int, ...]
    confusion: np.ndarray          # (C, C), rows = true, cols = predicted
    precision: np.ndarray          # per class
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray            # true count per class
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float

    def to_rows(self) -> list[dict]:
        """One row per class plus macro/weighted/accuracy aggregate rows."""
        rows = []
        for i, c in enumerate(self.classes):
            rows.append(
                {
                    "class": str(c),
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                    "support": int(self.support[i]),
                }
            )
        total = int(self.support.sum())
        rows.append({"class": "macro", "precision": self.macro_precision,
                     "recall": self.macro_recall, "f1": self.macro_f1, "support": total})
        rows.append({"class": "weighted", "precision": self.weighted_precision,
                     "recall": self.weighted_recall, "f1": self.weighted_f1, "support": total})
        rows.append({"class": "accuracy", "precision": self.accuracy,
                     "recall": self.accuracy, "f1": self.accuracy, "support": total})
        return rows

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "confusion": self.confusion.tolist(),
            "per_class": {
                str(c): {
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                    "support": int(self.support[i]),
                }
                for i, c in enumerate(self.classes)
            },
            "accuracy": self.accuracy,
            "macro": {"precision": self.macro_precision, "recall": self.macro_recall,
                      "f1": self.macro_f1},
            "weighted": {"precision": self.weighted_precision, "recall": self.weighted_recall,
                         "f1": self.weighted_f1},
        }


@dataclass(frozen=True)
class RunAggregate:
    scores: tuple[float, ...]
    mean: float
    std: float                     # population
    std_sample: float              # ddof=1 (0 for single run)
    count: int


def _resolve_classes(y_true: np.ndarray, y_pred: np.ndarray,
                     classes: Sequence[int] | None) -> np.ndarray:
    if classes is not None:
        cls = np.asarray(sorted(classes), dtype=np.int64)
        observed = np.union1d(y_true, y_pred)
        if not np.isin(observed, cls).all():
            raise ValueError("labels outside the declared class set")
        return cls
    return np.union1d(y_true, y_pred).astype(np.int64)


def evaluate(y_true, y_pred, classes: Sequence[int] | None = None) -> EvalReport:
    """Confusion matrix and per-class / averaged precision, recall, F1."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be 1-D and of equal length")
    if y_true.size == 0:
        raise ValueError("empty label vectors")
    cls = _resolve_classes(y_true, y_pred, classes)
    index = {c: i for i, c in enumerate(cls.tolist())}
    C = cls.size
    confusion = np.zeros((C, C), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        confusion[index[int(t)], index[int(p)]] += 1

    tp = np.diag(confusion).astype(np.float64)
    pred_totals = confusion.sum(axis=0).astype(np.float64)
    true_totals = confusion.sum(axis=1).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(pred_totals > 0, tp / np.where(pred_totals > 0, pred_totals, 1), 0.0)
        recall = np.where(true_totals > 0, tp / np.where(true_totals > 0, true_totals, 1), 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / np.where(denom > 0, denom, 1), 0.0)

    support = true_totals
    total = float(support.sum())
    weights = support / total
    return EvalReport(
        classes=tuple(int(c) for c in cls),
        confusion=confusion,
        precision=precision,
        recall=recall,
        f1=f1,
        support=true_totals.astype(np.int64),
        accuracy=float(tp.sum() / total),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        weighted_precision=float((precision * weights).sum()),
        weighted_recall=float((recall * weights).sum()),
        weighted_f1=float((f1 * weights).sum()),
    )


def macro_f1(y_true, y_pred, classes: Sequence[int] | None = None) -> float:
    return evaluate(y_true, y_pred, classes=classes).macro_f1


def _binary_roc(y_bin: np.ndarray, scores: np.ndarray) -> tuple[np.ndarray, float]:
    """ROC points swept at distinct scores, AUC by trapezoid.

    Grouping tied scores into single sweep steps makes the trapezoid area
    algebraically equal to the Mann-Whitney statistic with ties counted 0.5.
    """
    order = np.argsort(-scores, kind="stable")
    y_sorted = y_bin[order]
    s_sorted = scores[order]
    distinct = np.flatnonzero(np.diff(s_sorted) != 0)
    cut = np.concatenate([distinct, [y_sorted.size - 1]])
    tps = np.cumsum(y_sorted)[cut].astype(np.float64)
    fps = (cut + 1) - tps
    tps = np.concatenate([[0.0], tps])
    fps = np.concatenate([[0.0], fps])
    P = tps[-1]
    N = fps[-1]
    tpr = tps / P
    fpr = fps / N
    auc = float(np.trapezoid(tpr, fpr))
    return np.column_stack([fpr, tpr]), auc


def roc_auc_ovr(y_true, proba: np.ndarray, classes: Sequence[int]) -> dict:
    """One-vs-rest ROC per class plus macro AUC.

    ``proba`` columns follow ``classes`` order. Classes absent from
    ``y_true`` (or covering all of it) have no defined AUC and are skipped.
    Returns ``{"per_class": {label: {"points": ..., "auc": ...}}, "macro_auc": ...}``.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    proba = np.asarray(proba, dtype=np.float64)
    cls = list(classes)
    if proba.shape != (y_true.size, len(cls)):
        raise ValueError("probability matrix shape mismatch")
    sums = proba.sum(axis=1)
    if not np.allclose(sums, 1.0, atol=1e-6):
        raise ValueError("probability rows must sum to 1")
    per_class: dict[int, dict] = {}
    aucs = []
    for j, c in enumerate(cls):
        y_bin = (y_true == c).astype(np.int64)
        pos = int(y_bin.sum())
        if pos == 0 or pos == y_bin.size:
            continue
        points, auc = _binary_roc(y_bin, proba[:, j])
        per_class[int(c)] = {"points": points, "auc": auc}
        aucs.append(auc)
    macro = float(np.mean(aucs)) if aucs else float("nan")
    return {"per_class": per_class, "macro_auc": macro}


def aggregate_runs(scores: Sequence[float]) -> RunAggregate:
    arr = np.asarray(list(scores), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("no scores to aggregate")
    return RunAggregate(
        scores=tuple(float(s) for s in arr),
        mean=float(arr.mean()),
        std=float(arr.std(ddof=0)),
        std_sample=float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
        count=int(arr.size),
    )


def decision_grid(model, feature_x: int, feature_y: int,
                  bounds: tuple[float, float, float, float], resolution: int,
                  fill_values: np.ndarray | None = None):
    """Predicted labels on a 2-D slice of feature space.

    Remaining features are held at the model's training means (or at
    explicit ``fill_values``). Returns ``(xs, ys, labels)`` with labels in
    row-major order (``labels[i, j]`` at ``ys[i]``, ``xs[j]``).
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if fill_values is None:
        fill_values = getattr(model, "feature_means", None)
        if fill_values is None:
            raise ValueError("model carries no feature means; pass fill_values")
    fill_values = np.asarray(fill_values, dtype=np.float64)
    d = fill_values.size
    if not (0 <= feature_x < d and 0 <= feature_y < d):
        raise ValueError("feature index out of range")
    x_lo, x_hi, y_lo, y_hi = bounds
    xs = np.linspace(x_lo, x_hi, resolution)
    ys = np.linspace(y_lo, y_hi, resolution)
    xx, yy = np.meshgrid(xs, ys)
    pts = np.tile(fill_values, (resolution * resolution, 1))
    pts[:, feature_x] = xx.ravel()
    pts[:, feature_y] = yy.ravel()
    labels = np.asarray(model.predict(pts)).reshape(resolution, resolution)
    return xs, ys, labels
