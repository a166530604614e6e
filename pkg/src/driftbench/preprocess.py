"""Train-fit preprocessing pipelines: imputation, scaling, feature steps, balancing.

Statistics are learned from training data only; ``apply`` never looks at the
data it transforms. Missing values are non-finite entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import pdist

__all__ = [
    "FeatureStep",
    "PreprocessConfig",
    "FittedPreprocessor",
    "POLYNOMIAL_WIDTH_LIMIT",
    "fit_preprocessor",
    "balance_weights",
]

IMPUTATIONS = ("none", "mean", "median", "most_frequent")
SCALINGS = ("none", "standardize", "minmax")
FEATURE_KINDS = ("none", "polynomial", "agglomeration", "pca")
BALANCINGS = ("none", "inverse_frequency_weights")

# Degree-2 expansion is refused beyond this output width to keep memory and
# trial time at desk scale.
POLYNOMIAL_WIDTH_LIMIT = 4000


@dataclass(frozen=True)
class FeatureStep:
    kind: str = "none"
    degree: int = 2
    interaction_only: bool = False
    cluster_count: int | None = None
    pca_dim: int | None = None
    pca_variance: float | None = None

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature step {self.kind!r}")
        if self.kind == "polynomial" and self.degree != 2:
            raise ValueError("polynomial step supports degree 2 only")
        if self.kind == "agglomeration" and (self.cluster_count is None or self.cluster_count < 1):
            raise ValueError("agglomeration needs cluster_count >= 1")
        if self.kind == "pca" and self.pca_dim is None and self.pca_variance is None:
            raise ValueError("pca needs a target dim or variance fraction")

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == "polynomial":
            d["interaction_only"] = self.interaction_only
        elif self.kind == "agglomeration":
            d["cluster_count"] = self.cluster_count
        elif self.kind == "pca":
            if self.pca_dim is not None:
                d["dim"] = self.pca_dim
            else:
                d["variance"] = self.pca_variance
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureStep":
        kind = d.get("kind", "none")
        return cls(
            kind=kind,
            interaction_only=bool(d.get("interaction_only", False)),
            cluster_count=d.get("cluster_count"),
            pca_dim=d.get("dim"),
            pca_variance=d.get("variance"),
        )


@dataclass(frozen=True)
class PreprocessConfig:
    imputation: str = "none"
    scaling: str = "none"
    feature_step: FeatureStep = field(default_factory=FeatureStep)
    balancing: str = "none"

    def __post_init__(self):
        if self.imputation not in IMPUTATIONS:
            raise ValueError(f"unknown imputation {self.imputation!r}")
        if self.scaling not in SCALINGS:
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if self.balancing not in BALANCINGS:
            raise ValueError(f"unknown balancing {self.balancing!r}")

    def to_dict(self) -> dict:
        return {
            "imputation": self.imputation,
            "scaling": self.scaling,
            "feature_step": self.feature_step.to_dict(),
            "balancing": self.balancing,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PreprocessConfig":
        return cls(
            imputation=d.get("imputation", "none"),
            scaling=d.get("scaling", "none"),
            feature_step=FeatureStep.from_dict(d.get("feature_step", {})),
            balancing=d.get("balancing", "none"),
        )


def identity_config() -> PreprocessConfig:
    return PreprocessConfig()


def pinned_config() -> PreprocessConfig:
    """The fixed pipeline used when preprocessing search is disabled."""
    return PreprocessConfig(imputation="mean", scaling="standardize",
                            feature_step=FeatureStep(kind="none"), balancing="none")


@dataclass
class FittedPreprocessor:
    config: PreprocessConfig
    input_dim: int
    output_dim: int
    fill_values: np.ndarray | None = None
    shift: np.ndarray | None = None        # scaling offset
    scale: np.ndarray | None = None        # scaling divisor (guarded > 0)
    clusters: np.ndarray | None = None     # feature -> cluster id (agglomeration)
    pca_mean: np.ndarray | None = None
    pca_axes: np.ndarray | None = None     # (output_dim, input-after-scaling dim)

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise ValueError(f"expected width {self.input_dim}, got {X.shape}")
        out = X.copy()
        if self.fill_values is not None:
            mask = ~np.isfinite(out)
            if mask.any():
                out[mask] = np.broadcast_to(self.fill_values, out.shape)[mask]
        if self.shift is not None:
            out = (out - self.shift) / self.scale
        step = self.config.feature_step
        if step.kind == "polynomial":
            out = _polynomial_expand(out, step.interaction_only)
        elif step.kind == "agglomeration":
            out = _pool_clusters(out, self.clusters)
        elif step.kind == "pca":
            out = (out - self.pca_mean) @ self.pca_axes.T
        if out.shape[1] != self.output_dim:
            raise AssertionError("output width drifted from fitted dimension")
        return out


def _polynomial_width(d: int, interaction_only: bool) -> int:
    return d + (d * (d - 1) // 2 if interaction_only else d * (d + 1) // 2)


def _polynomial_expand(X: np.ndarray, interaction_only: bool) -> np.ndarray:
    n, d = X.shape
    cols = [X]
    for i in range(d):
        j0 = i + 1 if interaction_only else i
        if j0 < d:
            cols.append(X[:, i: i + 1] * X[:, j0:])
    return np.hstack(cols)


def _pool_clusters(X: np.ndarray, clusters: np.ndarray) -> np.ndarray:
    ids = np.unique(clusters)
    out = np.empty((X.shape[0], ids.size))
    for k, cid in enumerate(ids):
        out[:, k] = X[:, clusters == cid].mean(axis=1)
    return out


def _fit_imputation(kind: str, X: np.ndarray) -> np.ndarray:
    fills = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        col = X[:, j]
        finite = col[np.isfinite(col)]
        if finite.size == 0:
            fills[j] = 0.0
        elif kind == "mean":
            fills[j] = finite.mean()
        elif kind == "median":
            fills[j] = np.median(finite)
        else:  # most_frequent; ties resolve to the smallest value
            values, counts = np.unique(finite, return_counts=True)
            fills[j] = values[np.argmax(counts)]
    return fills


def fit_preprocessor(cfg: PreprocessConfig, X: np.ndarray,
                     y: np.ndarray | None = None) -> FittedPreprocessor:
    """Learn all pipeline statistics from X (training data only)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("X must be a non-empty 2-D matrix")
    n, d = X.shape
    fitted = FittedPreprocessor(config=cfg, input_dim=d, output_dim=d)

    work = X
    if cfg.imputation != "none":
        fitted.fill_values = _fit_imputation(cfg.imputation, work)
        mask = ~np.isfinite(work)
        if mask.any():
            work = work.copy()
            work[mask] = np.broadcast_to(fitted.fill_values, work.shape)[mask]
    elif not np.isfinite(work).all():
        raise ValueError("non-finite entries present but imputation is 'none'")

    if cfg.scaling == "standardize":
        fitted.shift = work.mean(axis=0)
        std = work.std(axis=0)           # population
        fitted.scale = np.where(std > 0, std, 1.0)
    elif cfg.scaling == "minmax":
        lo = work.min(axis=0)
        span = work.max(axis=0) - lo
        fitted.shift = lo
        fitted.scale = np.where(span > 0, span, 1.0)
    if fitted.shift is not None:
        work = (work - fitted.shift) / fitted.scale

    step = cfg.feature_step
    if step.kind == "polynomial":
        width = _polynomial_width(d, step.interaction_only)
        if width > POLYNOMIAL_WIDTH_LIMIT:
            raise ValueError(
                f"polynomial expansion of {d} features would produce {width} "
                f"columns (limit {POLYNOMIAL_WIDTH_LIMIT})"
            )
        fitted.output_dim = width
    elif step.kind == "agglomeration":
        k = step.cluster_count
        if k > d:
            raise ValueError(f"agglomeration clusters {k} > input dim {d}")
        fitted.clusters = _fit_agglomeration(work, k)
        fitted.output_dim = int(np.unique(fitted.clusters).size)
    elif step.kind == "pca":
        fitted.pca_mean, fitted.pca_axes = _fit_pca(work, step)
        fitted.output_dim = fitted.pca_axes.shape[0]
    return fitted


def _fit_agglomeration(X: np.ndarray, clusters: int) -> np.ndarray:
    """Average-linkage clustering of features on correlation distance."""
    d = X.shape[1]
    if clusters >= d:
        return np.arange(1, d + 1)
    if clusters == 1:
        return np.ones(d, dtype=np.int64)
    dist = pdist(X.T, metric="correlation")
    # constant features yield NaN correlation; treat them as maximally distant
    dist = np.nan_to_num(dist, nan=1.0)
    tree = linkage(dist, method="average")
    return fcluster(tree, t=clusters, criterion="maxclust")


def _fit_pca(X: np.ndarray, step: FeatureStep) -> tuple[np.ndarray, np.ndarray]:
    n, d = X.shape
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / n
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    axes = eigvecs[:, order].T
    # eigh sign is arbitrary; pin the largest-magnitude entry positive
    for i in range(axes.shape[0]):
        j = np.argmax(np.abs(axes[i]))
        if axes[i, j] < 0:
            axes[i] = -axes[i]
    if step.pca_dim is not None:
        m = step.pca_dim
        if not 1 <= m <= d:
            raise ValueError(f"pca dim {m} outside 1..{d}")
    else:
        total = eigvals.sum()
        if total <= 0:
            m = 1
        else:
            ratio = np.cumsum(eigvals) / total
            m = int(np.searchsorted(ratio, step.pca_variance) + 1)
            m = min(max(m, 1), d)
    return mean, axes[:m]


def balance_weights(y: np.ndarray) -> np.ndarray:
    """Per-sample weights proportional to N / (C * N_c); mean is exactly 1."""
    y = np.asarray(y)
    if y.size == 0:
        raise ValueError("empty label vector")
    classes, inverse, counts = np.unique(y, return_inverse=True, return_counts=True)
    w = y.size / (classes.size * counts.astype(np.float64))
    return w[inverse]
