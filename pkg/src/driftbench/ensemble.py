"""Greedy ensemble selection with replacement over a model pool.

Selection repeatedly adds the candidate whose inclusion maximizes macro F1
of the weight-averaged validation probabilities; member weights are the
fraction of rounds in which each candidate was picked. The returned ensemble
is the best prefix seen, so it never scores below the best single candidate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import macro_f1

__all__ = ["EnsembleModel", "ensemble_select", "predict_ensemble", "predict_proba_ensemble"]

STALL_LIMIT = 5  # consecutive non-improving rounds before selection stops


@dataclass(frozen=True)
class EnsembleModel:
    members: tuple            # model-like objects exposing predict_proba
    weights: np.ndarray       # >= 0, sums to 1
    classes: np.ndarray
    selection_sequence: tuple[int, ...] = ()   # candidate indices, in pick order

    def __post_init__(self):
        if len(self.members) == 0:
            raise ValueError("ensemble needs at least one member")
        if len(self.members) != self.weights.size:
            raise ValueError("one weight per member required")
        if (self.weights < 0).any() or abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")

    @property
    def feature_means(self):
        return getattr(self.members[0], "feature_means", None)

    def predict(self, X) -> np.ndarray:
        return predict_ensemble(self, X)

    def predict_proba(self, X) -> np.ndarray:
        return predict_proba_ensemble(self, X)

    def composition(self) -> list[dict]:
        rows = []
        for member, weight in zip(self.members, self.weights):
            rows.append(
                {
                    "algorithm": getattr(member, "algorithm", type(member).__name__),
                    "params": dict(getattr(member, "params", {})),
                    "weight": float(weight),
                }
            )
        return rows


def _score_counts(counts: np.ndarray, probas: np.ndarray, val_labels, classes) -> float:
    mix = np.tensordot(counts / counts.sum(), probas, axes=1)
    pred = classes[np.argmax(mix, axis=1)]
    return macro_f1(val_labels, pred, classes=classes)


def ensemble_select(candidates, val_labels, max_rounds: int = 50,
                    classes=None) -> EnsembleModel:
    """Pick members from ``candidates`` = [(model, validation proba matrix), ...].

    All probability matrices must share one shape; columns follow ``classes``
    (defaults to the sorted labels observed in ``val_labels``). Equal-quality
    picks resolve to the lowest candidate index.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    val_labels = np.asarray(val_labels)
    if classes is None:
        classes = np.unique(val_labels)
    classes = np.asarray(classes)
    probas = np.stack([np.asarray(p, dtype=np.float64) for _, p in candidates])
    if probas.ndim != 3 or probas.shape[1] != val_labels.size or probas.shape[2] != classes.size:
        raise ValueError("probability matrices must be (n_val, n_classes) and aligned")
    for model, _ in candidates:
        member_classes = getattr(model, "classes", None)
        if member_classes is not None and not np.array_equal(member_classes, classes):
            raise ValueError("all members must share the ensemble's class list")

    n_candidates = probas.shape[0]
    counts = np.zeros(n_candidates)
    sequence: list[int] = []
    best_score = -np.inf
    best_counts = None
    best_sequence: tuple[int, ...] = ()
    stall = 0
    for _ in range(max_rounds):
        round_scores = np.empty(n_candidates)
        for j in range(n_candidates):
            counts[j] += 1
            round_scores[j] = _score_counts(counts, probas, val_labels, classes)
            counts[j] -= 1
        pick = int(np.argmax(round_scores))  # first max -> lowest index
        counts[pick] += 1
        sequence.append(pick)
        if round_scores[pick] > best_score + 1e-12:
            best_score = round_scores[pick]
            best_counts = counts.copy()
            best_sequence = tuple(sequence)
            stall = 0
        else:
            stall += 1
            if stall >= STALL_LIMIT:
                break
    assert best_counts is not None
    chosen = np.flatnonzero(best_counts)
    return EnsembleModel(
        members=tuple(candidates[int(j)][0] for j in chosen),
        weights=best_counts[chosen] / best_counts.sum(),
        classes=classes,
        selection_sequence=best_sequence,
    )


def predict_proba_ensemble(model: EnsembleModel, X) -> np.ndarray:
    total = None
    for member, weight in zip(model.members, model.weights):
        proba = np.asarray(member.predict_proba(X), dtype=np.float64)
        total = weight * proba if total is None else total + weight * proba
    return total / total.sum(axis=1, keepdims=True)


def predict_ensemble(model: EnsembleModel, X) -> np.ndarray:
    proba = predict_proba_ensemble(model, X)
    return model.classes[np.argmax(proba, axis=1)]
