"""Baseline classifier families behind one train/predict contract.

Every algorithm trains from (X, y, sample_weight, seed) into an immutable
``TrainedModel`` whose ``predict_proba`` rows are non-negative and sum to 1;
``predict`` is the argmax with ties resolved to the lowest class label.
"""

from __future__ import annotations

import hashlib
import pickle
from dataclasses import dataclass, is_dataclass, fields as dc_fields
from pathlib import Path

import numpy as np

from .boosting import AdaBoost, GradientBoosting
from .forests import Bagging, RandomForest
from .linear import LogisticRegression, PassiveAggressive, logreg_loss_grad, softmax
from .mlp import MLP, mlp_loss_grad
from .neighbors import KNN, GaussianNB
from .spaces import Categorical, FloatRange, HyperparamSpace, IntRange, default_space
from .svm import SVMLinear, SVMRBF
from .trees import ClassificationTree, RegressionTree

__all__ = [
    "ALGORITHM_IDS",
    "TrainedModel",
    "train",
    "predict",
    "predict_proba",
    "default_space",
    "save_model",
    "load_model",
    "state_hash",
    "HyperparamSpace",
    "IntRange",
    "FloatRange",
    "Categorical",
    "logreg_loss_grad",
    "mlp_loss_grad",
    "RegressionTree",
    "ClassificationTree",
]

SNAPSHOT_FORMAT = "driftbench-model"
SNAPSHOT_VERSION = 1


class ConstantPredictor:
    """Fallback for single-class training data."""

    def __init__(self):
        self.n_classes = 1

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        return self

    def predict_proba(self, X):
        out = np.zeros((np.asarray(X).shape[0], self.n_classes))
        out[:, 0] = 1.0
        return out


_REGISTRY: dict[str, type] = {
    "decision_tree": ClassificationTree,
    "random_forest": RandomForest,
    "knn": KNN,
    "logistic_regression": LogisticRegression,
    "gaussian_nb": GaussianNB,
    "mlp": MLP,
    "passive_aggressive": PassiveAggressive,
    "gradient_boosting": GradientBoosting,
    "adaboost": AdaBoost,
    "bagging": Bagging,
    "svm_linear": SVMLinear,
    "svm_rbf": SVMRBF,
}

ALGORITHM_IDS: tuple[str, ...] = tuple(_REGISTRY)


def _constructor_kwargs(algorithm: str, params: dict) -> dict:
    """Translate sampled-space params into estimator constructor kwargs."""
    out = dict(params)
    out.pop("kernel", None)  # fixed by the algorithm id
    mode = out.pop("max_depth_mode", None)
    if mode == "none":
        out.pop("max_depth", None)
        out["max_depth"] = None
    return out


@dataclass(frozen=True)
class TrainedModel:
    algorithm: str
    params: dict
    classes: np.ndarray
    estimator: object
    seed: int
    n_features: int
    feature_means: np.ndarray
    metadata: dict

    def predict(self, X) -> np.ndarray:
        return predict(self, X)

    def predict_proba(self, X) -> np.ndarray:
        return predict_proba(self, X)


def train(algorithm: str, params: dict, X, y, sample_weight=None, seed: int = 0) -> TrainedModel:
    if algorithm not in _REGISTRY:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size or y.size == 0:
        raise ValueError("X must be (n, d) and y of matching length")
    if sample_weight is None:
        w = np.ones(y.size)
    else:
        w = np.asarray(sample_weight, dtype=np.float64)
        if w.shape != y.shape:
            raise ValueError("sample_weight length mismatch")
        if (w <= 0).any():
            raise ValueError("sample weights must be positive")

    classes = np.unique(y)
    y01 = np.searchsorted(classes, y)
    rng = np.random.default_rng(seed)
    if classes.size == 1:
        estimator = ConstantPredictor()
        estimator.fit(X, y01, w, 1, rng)
    else:
        try:
            estimator = _REGISTRY[algorithm](**_constructor_kwargs(algorithm, params))
        except TypeError as exc:
            raise ValueError(f"bad hyperparameters for {algorithm}: {exc}") from None
        if isinstance(estimator, ClassificationTree):
            estimator.fit(X, y01, w, n_classes=classes.size)
        else:
            estimator.fit(X, y01, w, classes.size, rng)

    metadata = {}
    for key in ("iterations_used", "early_stopped"):
        if hasattr(estimator, key):
            metadata[key] = getattr(estimator, key)
    return TrainedModel(
        algorithm=algorithm,
        params=dict(params),
        classes=classes,
        estimator=estimator,
        seed=seed,
        n_features=X.shape[1],
        feature_means=X.mean(axis=0),
        metadata=metadata,
    )


def predict_proba(model: TrainedModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"expected width {model.n_features}, got {X.shape}")
    P = np.asarray(model.estimator.predict_proba(X), dtype=np.float64)
    P = np.clip(P, 0.0, None)
    return P / P.sum(axis=1, keepdims=True)


def predict(model: TrainedModel, X) -> np.ndarray:
    P = predict_proba(model, X)
    return model.classes[np.argmax(P, axis=1)]


def _walk_state(obj, update):
    if isinstance(obj, np.ndarray):
        update(b"ndarray")
        update(str(obj.dtype).encode())
        update(str(obj.shape).encode())
        update(np.ascontiguousarray(obj).tobytes())
    elif isinstance(obj, dict):
        update(b"dict")
        for key in sorted(obj):
            update(repr(key).encode())
            _walk_state(obj[key], update)
    elif isinstance(obj, (list, tuple)):
        update(b"seq")
        for item in obj:
            _walk_state(item, update)
    elif is_dataclass(obj) and not isinstance(obj, type):
        update(type(obj).__name__.encode())
        for f in dc_fields(obj):
            _walk_state(getattr(obj, f.name), update)
    elif hasattr(obj, "__dict__") and not isinstance(obj, (str, bytes)):
        update(type(obj).__name__.encode())
        _walk_state(vars(obj), update)
    else:
        update(repr(obj).encode())


def state_hash(model: TrainedModel) -> str:
    """Deterministic digest of the fitted state (same inputs, same hash)."""
    h = hashlib.sha256()
    _walk_state(
        {
            "algorithm": model.algorithm,
            "params": model.params,
            "classes": model.classes,
            "seed": model.seed,
            "state": model.estimator,
        },
        h.update,
    )
    return h.hexdigest()


def to_snapshot(model: TrainedModel) -> dict:
    return {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "algorithm": model.algorithm,
        "params": model.params,
        "classes": model.classes,
        "seed": model.seed,
        "n_features": model.n_features,
        "feature_means": model.feature_means,
        "metadata": model.metadata,
        "state": model.estimator,
    }


def from_snapshot(snap: dict) -> TrainedModel:
    if snap.get("format") != SNAPSHOT_FORMAT:
        raise ValueError("not a model snapshot")
    if snap.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {snap.get('version')}")
    return TrainedModel(
        algorithm=snap["algorithm"],
        params=snap["params"],
        classes=snap["classes"],
        estimator=snap["state"],
        seed=snap["seed"],
        n_features=snap["n_features"],
        feature_means=snap["feature_means"],
        metadata=snap["metadata"],
    )


def save_model(model: TrainedModel, path: str | Path) -> None:
    with Path(path).open("wb") as fh:
        pickle.dump(to_snapshot(model), fh)


def load_model(path: str | Path) -> TrainedModel:
    with Path(path).open("rb") as fh:
        return from_snapshot(pickle.load(fh))
