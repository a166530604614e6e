"""Joint algorithm/hyperparameter/preprocessing search with warm starts.

The engine scores candidate pipelines by macro F1 on a stratified hold-out
carved from the training data, seeds itself from a portfolio of
configurations matched by dataset meta-features, and switches from random
sampling to a random-forest surrogate with expected-improvement acquisition
once enough trials have completed.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from . import learners
from .data import MetaFeatures, SyntheticSpec, meta_features_from_arrays, synthesize_drift
from .ensemble import EnsembleModel, ensemble_select
from .learners import Categorical, FloatRange, HyperparamSpace, IntRange
from .learners.spaces import _is_active
from .metrics import macro_f1
from .preprocess import (
    FeatureStep,
    FittedPreprocessor,
    POLYNOMIAL_WIDTH_LIMIT,
    PreprocessConfig,
    balance_weights,
    fit_preprocessor,
    pinned_config,
)

__all__ = [
    "Configuration",
    "TrialResult",
    "SearchBudget",
    "SearchOptions",
    "SearchTrace",
    "SearchError",
    "Portfolio",
    "PipelineModel",
    "JointSpace",
    "build_joint_space",
    "sample_configuration",
    "warmstart",
    "suggest",
    "evaluate",
    "fit_pipeline",
    "run_search",
    "save_final_model",
    "load_final_model",
    "assert_index_hygiene",
    "expected_improvement",
    "default_portfolio",
    "stratified_holdout",
]

RANDOM_INTERLEAVE_PERIOD = 4  # 1 random draw per 3 surrogate suggestions


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class Configuration:
    preprocess: PreprocessConfig
    algorithm: str
    params: dict
    provenance: str = "random"

    def to_dict(self) -> dict:
        return {
            "preprocess": self.preprocess.to_dict(),
            "algorithm": self.algorithm,
            "params": dict(self.params),
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Configuration":
        return cls(
            preprocess=PreprocessConfig.from_dict(d["preprocess"]),
            algorithm=d["algorithm"],
            params=dict(d["params"]),
            provenance=d.get("provenance", "random"),
        )


@dataclass(frozen=True)
class PipelineModel:
    """A fitted preprocessor plus the model trained on its output."""

    preprocessor: FittedPreprocessor
    model: learners.TrainedModel
    feature_means: np.ndarray    # raw input space

    @property
    def classes(self) -> np.ndarray:
        return self.model.classes

    @property
    def algorithm(self) -> str:
        return self.model.algorithm

    @property
    def params(self) -> dict:
        return self.model.params

    def predict(self, X) -> np.ndarray:
        return learners.predict(self.model, self.preprocessor.apply(np.asarray(X, dtype=np.float64)))

    def predict_proba(self, X) -> np.ndarray:
        return learners.predict_proba(self.model, self.preprocessor.apply(np.asarray(X, dtype=np.float64)))


@dataclass
class TrialResult:
    configuration: Configuration
    status: str                      # "ok" | "timeout" | "failed"
    validation_score: float | None = None
    train_time: float = 0.0
    model: PipelineModel | None = None
    error: str | None = None

    def __post_init__(self):
        if (self.status == "ok") != (self.validation_score is not None):
            raise ValueError("validation_score present iff status ok")


@dataclass(frozen=True)
class SearchBudget:
    wall_clock_secs: float = 1200.0
    per_trial_secs: float = 60.0
    max_trials: int = 10_000
    ensemble_pool_size: int = 20

    def __post_init__(self):
        if self.wall_clock_secs <= 0 or self.max_trials <= 0 or self.ensemble_pool_size <= 0:
            raise ValueError("budget limits must be positive")
        if self.per_trial_secs < 0 or self.per_trial_secs > self.wall_clock_secs:
            raise ValueError("per-trial limit must lie in [0, wall_clock]")


@dataclass(frozen=True)
class Portfolio:
    entries: tuple[tuple[MetaFeatures, Configuration], ...]


@dataclass(frozen=True)
class SearchOptions:
    meta: bool = True
    search_preprocessing: bool = True
    ensembling: bool = True
    holdout_fraction: float = 0.2
    algorithms: tuple[str, ...] | None = None
    warmstart_count: int = 8
    ensemble_rounds: int = 50
    n_candidates: int = 500
    surrogate_min_points: int = 10
    portfolio: Portfolio | None = None

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "search_preprocessing": self.search_preprocessing,
            "ensembling": self.ensembling,
            "holdout_fraction": self.holdout_fraction,
            "algorithms": list(self.algorithms) if self.algorithms else None,
            "warmstart_count": self.warmstart_count,
        }


@dataclass
class SearchTrace:
    trials: list[TrialResult]
    incumbent_history: list[tuple[int, float]]
    options: SearchOptions
    budget: SearchBudget
    seed: int
    best_index: int | None = None
    final_model: object | None = None
    ensemble: EnsembleModel | None = None
    pool_indices: tuple[int, ...] = ()

    @property
    def best_trial(self) -> TrialResult | None:
        return None if self.best_index is None else self.trials[self.best_index]

    def trial_records(self) -> list[dict]:
        records = []
        for i, t in enumerate(self.trials):
            records.append(
                {
                    "index": i,
                    "status": t.status,
                    "score": t.validation_score,
                    "train_time": round(t.train_time, 6),
                    "error": t.error,
                    **t.configuration.to_dict(),
                }
            )
        return records

    def write_jsonl(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for record in self.trial_records():
                fh.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Joint space

_PREPROCESS_FIXED = ("imputation", "scaling", "feature_kind", "balancing")


def build_preprocess_space(input_dim: int) -> HyperparamSpace:
    kinds = ["none"]
    if input_dim + input_dim * (input_dim + 1) // 2 <= POLYNOMIAL_WIDTH_LIMIT:
        kinds.append("polynomial")
    if input_dim >= 2:
        kinds.extend(["agglomeration", "pca"])
    params: list = [
        Categorical("imputation", ("none", "mean", "median", "most_frequent")),
        Categorical("scaling", ("none", "standardize", "minmax")),
        Categorical("feature_kind", tuple(kinds)),
    ]
    if "polynomial" in kinds:
        params.append(Categorical("poly_interaction_only", (False, True),
                                  active_when=(("feature_kind", "polynomial"),)))
    if "agglomeration" in kinds:
        params.append(IntRange("agglom_clusters", 2, max(2, input_dim - 1), log=True,
                               active_when=(("feature_kind", "agglomeration"),)))
    if "pca" in kinds:
        params.append(FloatRange("pca_variance", 0.5, 0.999,
                                 active_when=(("feature_kind", "pca"),)))
    params.append(Categorical("balancing", ("none", "inverse_frequency_weights")))
    return HyperparamSpace(tuple(params))


def preprocess_to_flat(cfg: PreprocessConfig) -> dict:
    flat = {
        "imputation": cfg.imputation,
        "scaling": cfg.scaling,
        "feature_kind": cfg.feature_step.kind,
        "balancing": cfg.balancing,
    }
    step = cfg.feature_step
    if step.kind == "polynomial":
        flat["poly_interaction_only"] = step.interaction_only
    elif step.kind == "agglomeration":
        flat["agglom_clusters"] = step.cluster_count
    elif step.kind == "pca" and step.pca_variance is not None:
        flat["pca_variance"] = step.pca_variance
    return flat


def preprocess_from_flat(flat: dict) -> PreprocessConfig:
    kind = flat["feature_kind"]
    if kind == "polynomial":
        step = FeatureStep(kind="polynomial", interaction_only=bool(flat["poly_interaction_only"]))
    elif kind == "agglomeration":
        step = FeatureStep(kind="agglomeration", cluster_count=int(flat["agglom_clusters"]))
    elif kind == "pca":
        step = FeatureStep(kind="pca", pca_variance=float(flat["pca_variance"]))
    else:
        step = FeatureStep(kind="none")
    return PreprocessConfig(
        imputation=flat["imputation"],
        scaling=flat["scaling"],
        feature_step=step,
        balancing=flat["balancing"],
    )


@dataclass(frozen=True)
class JointSpace:
    algorithms: tuple[str, ...]
    preprocess_space: HyperparamSpace | None   # None when preprocessing is pinned
    pinned_preprocess: PreprocessConfig

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("joint space needs at least one algorithm")
        for a in self.algorithms:
            if a not in learners.ALGORITHM_IDS:
                raise ValueError(f"unknown algorithm {a!r}")

    def contains(self, cfg: Configuration) -> bool:
        if cfg.algorithm not in self.algorithms:
            return False
        if not learners.default_space(cfg.algorithm).contains(cfg.params):
            return False
        if self.preprocess_space is None:
            return cfg.preprocess == self.pinned_preprocess
        return self.preprocess_space.contains(preprocess_to_flat(cfg.preprocess))


def build_joint_space(input_dim: int, algorithms=None, search_preprocessing=True) -> JointSpace:
    algs = tuple(algorithms) if algorithms else learners.ALGORITHM_IDS
    return JointSpace(
        algorithms=algs,
        preprocess_space=build_preprocess_space(input_dim) if search_preprocessing else None,
        pinned_preprocess=pinned_config(),
    )


def sample_configuration(space: JointSpace, rng: np.random.Generator) -> Configuration:
    algorithm = space.algorithms[int(rng.integers(0, len(space.algorithms)))]
    params = learners.default_space(algorithm).sample(rng)
    if space.preprocess_space is None:
        pre = space.pinned_preprocess
    else:
        pre = preprocess_from_flat(space.preprocess_space.sample(rng))
    return Configuration(preprocess=pre, algorithm=algorithm, params=params,
                         provenance="random")


# ---------------------------------------------------------------------------
# Configuration encoding for the surrogate

def _scaled(value: float, low: float, high: float, log: bool) -> float:
    if log:
        return (math.log(value) - math.log(low)) / (math.log(high) - math.log(low))
    return (value - low) / (high - low)


class ConfigCodec:
    """Flattens configurations to vectors: one-hot categoricals, min-max
    numerics, -1 for inactive conditionals."""

    def __init__(self, space: JointSpace):
        self.space = space
        self.groups: list[tuple[str, HyperparamSpace]] = []
        if space.preprocess_space is not None:
            self.groups.append(("preprocess", space.preprocess_space))
        for a in space.algorithms:
            self.groups.append((a, learners.default_space(a)))
        self.width = len(space.algorithms)
        for _, sub in self.groups:
            for p in sub.params:
                self.width += len(p.choices) if isinstance(p, Categorical) else 1

    def encode(self, cfg: Configuration) -> np.ndarray:
        vec = np.full(self.width, -1.0)
        pos = 0
        for a in self.space.algorithms:
            vec[pos] = 1.0 if a == cfg.algorithm else 0.0
            pos += 1
        for group, sub in self.groups:
            if group == "preprocess":
                values = preprocess_to_flat(cfg.preprocess)
            elif group == cfg.algorithm:
                values = cfg.params
            else:
                values = {}
            for p in sub.params:
                if isinstance(p, Categorical):
                    if p.name in values:
                        for choice in p.choices:
                            vec[pos] = 1.0 if values[p.name] == choice else 0.0
                            pos += 1
                    else:
                        pos += len(p.choices)
                else:
                    if p.name in values:
                        vec[pos] = _scaled(float(values[p.name]), p.low, p.high, p.log)
                    pos += 1
        return vec

    def encode_many(self, cfgs) -> np.ndarray:
        return np.vstack([self.encode(c) for c in cfgs])


class _ExtraTreeRegressor:
    """Regression tree with uniformly randomized split thresholds.

    Randomized splits vary across the forest, so the ensemble's mean and
    spread change smoothly between observed points instead of forming flat
    plateaus between sample midpoints.
    """

    def __init__(self, min_samples_leaf: int = 1):
        self.min_samples_leaf = min_samples_leaf
        self.nodes: list[tuple] = []   # (feature, threshold, left, right, value)

    def fit(self, X, y, rng: np.random.Generator):
        self.nodes = []
        self._grow(X, y, np.arange(X.shape[0]), rng)
        return self

    def _grow(self, X, y, idx, rng) -> int:
        node_id = len(self.nodes)
        self.nodes.append(None)
        value = float(y[idx].mean())
        split = None
        if idx.size >= 2 * self.min_samples_leaf and np.ptp(y[idx]) > 0:
            split = self._random_split(X, y, idx, rng)
        if split is None:
            self.nodes[node_id] = (-1, 0.0, -1, -1, value)
            return node_id
        feat, thr = split
        mask = X[idx, feat] <= thr
        left = self._grow(X, y, idx[mask], rng)
        right = self._grow(X, y, idx[~mask], rng)
        self.nodes[node_id] = (feat, thr, left, right, value)
        return node_id

    def _random_split(self, X, y, idx, rng):
        best = None
        best_sse = np.inf
        for feat in range(X.shape[1]):
            col = X[idx, feat]
            lo, hi = col.min(), col.max()
            if hi <= lo:
                continue
            thr = rng.uniform(lo, hi)
            mask = col <= thr
            nl = int(mask.sum())
            if nl < self.min_samples_leaf or idx.size - nl < self.min_samples_leaf:
                continue
            yl, yr = y[idx[mask]], y[idx[~mask]]
            sse = ((yl - yl.mean()) ** 2).sum() + ((yr - yr.mean()) ** 2).sum()
            if sse < best_sse:
                best_sse = sse
                best = (feat, thr)
        return best

    def predict(self, X) -> np.ndarray:
        out = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            node = self.nodes[0]
            while node[0] >= 0:
                node = self.nodes[node[2] if X[i, node[0]] <= node[1] else node[3]]
            out[i] = node[4]
        return out


class _SurrogateForest:
    """Bootstrap forest of randomized regression trees; the spread across
    trees serves as the predictive uncertainty for expected improvement."""

    def __init__(self, n_trees: int = 30, min_samples_leaf: int = 1):
        self.n_trees = n_trees
        self.min_samples_leaf = min_samples_leaf
        self.trees: list[_ExtraTreeRegressor] = []

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator):
        self.trees = []
        n = X.shape[0]
        seeds = rng.integers(0, 2**63 - 1, size=self.n_trees)
        for s in seeds:
            tree_rng = np.random.default_rng(s)
            idx = tree_rng.integers(0, n, size=n)
            tree = _ExtraTreeRegressor(min_samples_leaf=self.min_samples_leaf)
            tree.fit(X[idx], y[idx], tree_rng)
            self.trees.append(tree)
        return self

    def predict_stats(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        preds = np.stack([t.predict(X) for t in self.trees])
        return preds.mean(axis=0), preds.std(axis=0)


def expected_improvement(mu: np.ndarray, sigma: np.ndarray, incumbent: float) -> np.ndarray:
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    improvement = mu - incumbent
    ei = np.maximum(improvement, 0.0)
    ok = sigma > 0
    if ok.any():
        z = improvement[ok] / sigma[ok]
        pdf = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        ei[ok] = improvement[ok] * ndtr(z) + sigma[ok] * pdf
    return ei


def suggest(history: SearchTrace, space: JointSpace, rng: np.random.Generator,
            n_candidates: int = 500, surrogate_min_points: int = 10) -> Configuration:
    """Surrogate-guided proposal; falls back to a random draw while the
    history is too short to fit a surrogate."""
    done = [t for t in history.trials if t.status == "ok"]
    if len(done) < surrogate_min_points:
        return sample_configuration(space, rng)
    codec = ConfigCodec(space)
    X = codec.encode_many([t.configuration for t in done])
    y = np.array([t.validation_score for t in done])
    forest = _SurrogateForest().fit(X, y, rng)
    candidates = [sample_configuration(space, rng) for _ in range(n_candidates)]
    mu, sigma = forest.predict_stats(codec.encode_many(candidates))
    ei = expected_improvement(mu, sigma, float(y.max()))
    best = int(np.argmax(ei))  # first max wins ties
    return replace(candidates[best], provenance="surrogate")


# ---------------------------------------------------------------------------
# Warm start

def warmstart(meta: MetaFeatures, portfolio: Portfolio, count: int) -> list[Configuration]:
    """The ``count`` portfolio entries nearest in z-scored meta-feature space."""
    if not portfolio.entries:
        raise ValueError("portfolio is empty")
    fingerprints = np.vstack([m.as_vector() for m, _ in portfolio.entries])
    mu = fingerprints.mean(axis=0)
    sd = fingerprints.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    query = (meta.as_vector() - mu) / sd
    dists = np.linalg.norm((fingerprints - mu) / sd - query, axis=1)
    order = np.argsort(dists, kind="stable")
    picks = order[: min(count, order.size)]
    return [replace(portfolio.entries[int(i)][1], provenance="warmstart") for i in picks]


def _portfolio_configs() -> list[Configuration]:
    std = PreprocessConfig(imputation="mean", scaling="standardize")
    std_bal = PreprocessConfig(imputation="mean", scaling="standardize",
                               balancing="inverse_frequency_weights")
    rf = lambda **kw: {"criterion": "gini", "max_depth_mode": "none",
                       "min_samples_split": 2, "min_samples_leaf": 1,
                       "bootstrap": True, "n_estimators": 128, **kw}
    return [
        Configuration(std, "random_forest", rf(bootstrap=False, n_estimators=256)),
        Configuration(std, "random_forest", rf(min_samples_leaf=2, criterion="entropy")),
        Configuration(std_bal, "random_forest", rf(min_samples_leaf=11, n_estimators=256)),
        Configuration(
            PreprocessConfig(imputation="mean", scaling="standardize",
                             feature_step=FeatureStep(kind="agglomeration", cluster_count=32)),
            "random_forest", rf(min_samples_leaf=19),
        ),
        Configuration(
            PreprocessConfig(imputation="mean", scaling="minmax"),
            "random_forest",
            rf(n_estimators=64, max_depth_mode="limit", max_depth=16),
        ),
        Configuration(std, "mlp", {"hidden_layers": 1, "width": 64, "activation": "tanh",
                                   "learning_rate": 1e-3, "early_stopping": True}),
        Configuration(std, "mlp", {"hidden_layers": 2, "width": 128, "activation": "tanh",
                                   "learning_rate": 3e-4, "early_stopping": True}),
        Configuration(std, "passive_aggressive", {"C": 1.0, "max_iter": 50}),
        Configuration(std, "gradient_boosting", {"n_estimators": 128, "learning_rate": 0.1,
                                                 "max_depth": 3}),
        Configuration(std, "knn", {"k": 5}),
        Configuration(std, "svm_rbf", {"kernel": "rbf", "C": 10.0, "gamma": 0.01}),
        Configuration(std_bal, "logistic_regression", {"C": 1.0, "max_iter": 500}),
    ]


@lru_cache(maxsize=1)
def default_portfolio() -> Portfolio:
    """Hand-assembled configurations fingerprinted on synthetic drift families.

    The fingerprints are regenerated deterministically; they stand in for
    recorded runs on real prior datasets.
    """
    families = [
        dict(class_count=6, feature_dim=32, batch_count=8, samples_per_batch=240,
             drift=0.25, noise=0.8),
        dict(class_count=6, feature_dim=32, batch_count=8, samples_per_batch=240,
             drift=0.6, noise=0.8),
        dict(class_count=6, feature_dim=64, batch_count=10, samples_per_batch=400,
             drift=0.4, noise=1.2),
        dict(class_count=4, feature_dim=64, batch_count=10, samples_per_batch=400,
             drift=0.8, noise=1.0),
        dict(class_count=6, feature_dim=128, batch_count=10, samples_per_batch=300,
             drift=0.5, noise=1.0),
        dict(class_count=3, feature_dim=16, batch_count=6, samples_per_batch=120,
             drift=0.3, noise=0.6),
        dict(class_count=3, feature_dim=16, batch_count=6, samples_per_batch=120,
             drift=1.0, noise=0.6),
        dict(class_count=2, feature_dim=8, batch_count=4, samples_per_batch=80,
             drift=0.2, noise=0.5),
        dict(class_count=5, feature_dim=48, batch_count=8, samples_per_batch=320,
             drift=0.45, noise=0.9),
        dict(class_count=6, feature_dim=96, batch_count=10, samples_per_batch=500,
             drift=0.7, noise=1.1),
        dict(class_count=4, feature_dim=24, batch_count=6, samples_per_batch=160,
             drift=0.15, noise=0.7),
        dict(class_count=2, feature_dim=8, batch_count=4, samples_per_batch=80,
             drift=0.9, noise=0.5),
    ]
    configs = _portfolio_configs()
    entries = []
    for i, (fam, cfg) in enumerate(zip(families, configs)):
        spec = SyntheticSpec(
            class_count=fam["class_count"],
            feature_dim=fam["feature_dim"],
            batch_count=fam["batch_count"],
            samples_per_batch=fam["samples_per_batch"],
            drift_per_batch=tuple(fam["drift"] * b for b in range(fam["batch_count"])),
            noise_std=fam["noise"],
        )
        ds = synthesize_drift(spec, seed=9000 + i)
        train = np.arange(ds.sample_count // 2)
        entries.append((meta_features_from_arrays(ds.X[train], ds.y[train]), cfg))
    return Portfolio(entries=tuple(entries))


# ---------------------------------------------------------------------------
# Trial evaluation and the main loop

def fit_pipeline(cfg: Configuration, X, y, seed: int = 0) -> PipelineModel:
    """Fit preprocessor and model for one configuration; raises on failure."""
    X = np.asarray(X, dtype=np.float64)
    prep = fit_preprocessor(cfg.preprocess, X, y)
    weights = balance_weights(y) if cfg.preprocess.balancing == "inverse_frequency_weights" else None
    model = learners.train(cfg.algorithm, cfg.params, prep.apply(X), y,
                           sample_weight=weights, seed=seed)
    return PipelineModel(preprocessor=prep, model=model, feature_means=X.mean(axis=0))


def evaluate(cfg: Configuration, train_data, validation_data, budget: SearchBudget,
             seed: int = 0) -> TrialResult:
    """Fit the full pipeline on train, score macro F1 on validation.

    Failures and per-trial timeouts are captured in the result status; this
    function never raises for a bad configuration.
    """
    X_train, y_train = train_data
    X_val, y_val = validation_data
    start = time.perf_counter()
    try:
        pipeline = fit_pipeline(cfg, X_train, y_train, seed=seed)
        elapsed = time.perf_counter() - start
        if elapsed > budget.per_trial_secs:
            return TrialResult(configuration=cfg, status="timeout", train_time=elapsed)
        classes = np.union1d(np.unique(y_train), np.unique(y_val))
        score = macro_f1(y_val, pipeline.predict(X_val), classes=classes)
        return TrialResult(configuration=cfg, status="ok", validation_score=float(score),
                           train_time=elapsed, model=pipeline)
    except Exception as exc:  # captured into the result, never propagated
        return TrialResult(configuration=cfg, status="failed",
                           train_time=time.perf_counter() - start, error=str(exc))


def stratified_holdout(y: np.ndarray, fraction: float, rng: np.random.Generator):
    """Per-class random split; classes with a single sample stay in train."""
    y = np.asarray(y)
    val_parts = []
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if idx.size < 2:
            continue
        k = min(max(1, int(round(fraction * idx.size))), idx.size - 1)
        pick = rng.permutation(idx.size)[:k]
        val_parts.append(idx[pick])
    if not val_parts:
        raise SearchError("cannot carve a hold-out: every class has one sample")
    val_idx = np.sort(np.concatenate(val_parts))
    mask = np.ones(y.size, dtype=bool)
    mask[val_idx] = False
    return np.flatnonzero(mask), val_idx


def _prune_pool(trials: list[TrialResult], pool_size: int) -> list[int]:
    """Keep model references only for the top ``pool_size`` ok trials."""
    ok = [(i, t) for i, t in enumerate(trials) if t.status == "ok"]
    ok.sort(key=lambda item: (-item[1].validation_score, item[0]))
    keep = {i for i, _ in ok[:pool_size]}
    for i, t in enumerate(trials):
        if t.status == "ok" and i not in keep:
            t.model = None
    return [i for i, _ in ok[:pool_size]]


def run_search(train_data, budget: SearchBudget, options: SearchOptions = SearchOptions(),
               seed: int = 0) -> SearchTrace:
    """Execute the full search loop on (X, y) training arrays.

    Trial order: warm-start configurations first (when meta-learning is on),
    then interleaved surrogate/random proposals until the budget runs out.
    The trace keeps the top-k models for ensemble selection and carries the
    final model (ensemble, or the incumbent when ensembling is off).
    """
    X, y = train_data
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if np.unique(y).size < 2:
        raise SearchError("training data must contain at least 2 classes")
    if not 0.0 < options.holdout_fraction <= 0.5:
        raise SearchError("holdout_fraction must lie in (0, 0.5]")

    rng = np.random.default_rng(seed)
    fit_idx, val_idx = stratified_holdout(y, options.holdout_fraction, rng)
    X_fit, y_fit = X[fit_idx], y[fit_idx]
    X_val, y_val = X[val_idx], y[val_idx]

    space = build_joint_space(X.shape[1], options.algorithms, options.search_preprocessing)

    queue: list[Configuration] = []
    if options.meta:
        portfolio = options.portfolio or default_portfolio()
        meta = meta_features_from_arrays(X, y)
        for cfg in warmstart(meta, portfolio, options.warmstart_count):
            if not options.search_preprocessing:
                cfg = replace(cfg, preprocess=space.pinned_preprocess)
            if space.contains(cfg):
                queue.append(cfg)

    trace = SearchTrace(trials=[], incumbent_history=[], options=options,
                        budget=budget, seed=seed)
    started = time.perf_counter()
    best_score = -np.inf
    proposals = 0
    while len(trace.trials) < budget.max_trials:
        if time.perf_counter() - started >= budget.wall_clock_secs:
            break
        if queue:
            cfg = queue.pop(0)
        else:
            if proposals % RANDOM_INTERLEAVE_PERIOD == RANDOM_INTERLEAVE_PERIOD - 1:
                cfg = sample_configuration(space, rng)
            else:
                cfg = suggest(trace, space, rng, n_candidates=options.n_candidates,
                              surrogate_min_points=options.surrogate_min_points)
            proposals += 1
        trial_seed = int(rng.integers(0, 2**63 - 1))
        result = evaluate(cfg, (X_fit, y_fit), (X_val, y_val), budget, seed=trial_seed)
        trace.trials.append(result)
        if result.status == "ok" and result.validation_score > best_score:
            best_score = result.validation_score
            trace.best_index = len(trace.trials) - 1
            trace.incumbent_history.append((trace.best_index, best_score))
        trace.pool_indices = tuple(_prune_pool(trace.trials, budget.ensemble_pool_size))

    if trace.best_index is None:
        raise SearchError("no viable configuration completed within the budget")

    if options.ensembling:
        classes = np.union1d(np.unique(y_fit), np.unique(y_val))
        candidates = [
            (trace.trials[i].model, trace.trials[i].model.predict_proba(X_val))
            for i in trace.pool_indices
        ]
        trace.ensemble = ensemble_select(candidates, y_val,
                                         max_rounds=options.ensemble_rounds,
                                         classes=classes)
        trace.final_model = trace.ensemble
    else:
        trace.final_model = trace.best_trial.model
    return trace


def assert_index_hygiene(train_indices, test_indices) -> None:
    """Raise unless the two global index sets are disjoint."""
    overlap = np.intersect1d(np.asarray(train_indices), np.asarray(test_indices))
    if overlap.size:
        raise SearchError(f"train/test index sets overlap at {overlap[:5]}...")


PIPELINE_SNAPSHOT_FORMAT = "driftbench-pipeline"
PIPELINE_SNAPSHOT_VERSION = 1


def save_final_model(model, path: str | Path) -> None:
    """Persist a PipelineModel or EnsembleModel with a self-describing header."""
    import pickle

    if isinstance(model, EnsembleModel):
        kind = "ensemble"
        composition = model.composition()
    elif isinstance(model, PipelineModel):
        kind = "pipeline"
        composition = [{"algorithm": model.algorithm, "params": dict(model.params),
                        "weight": 1.0}]
    else:
        raise TypeError(f"cannot snapshot {type(model).__name__}")
    snapshot = {
        "format": PIPELINE_SNAPSHOT_FORMAT,
        "version": PIPELINE_SNAPSHOT_VERSION,
        "kind": kind,
        "composition": composition,
        "model": model,
    }
    with Path(path).open("wb") as fh:
        pickle.dump(snapshot, fh)


def load_final_model(path: str | Path):
    import pickle

    with Path(path).open("rb") as fh:
        snapshot = pickle.load(fh)
    if snapshot.get("format") != PIPELINE_SNAPSHOT_FORMAT:
        raise ValueError("not a pipeline snapshot")
    if snapshot.get("version") != PIPELINE_SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {snapshot.get('version')}")
    return snapshot["model"]
