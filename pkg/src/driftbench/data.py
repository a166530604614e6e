"""Batch-ordered sensor datasets: file parsing, split plans, synthetic drift.

The on-disk format is the sparse ``<label>;<concentration> <idx>:<value> ...``
record layout used by the public gas-sensor batch files (one file per batch,
1-based feature indices, strictly increasing within a record).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Sample",
    "DriftDataset",
    "SplitPlan",
    "MetaFeatures",
    "SyntheticSpec",
    "ParseError",
    "parse_record",
    "load_batches",
    "chronological_split",
    "kfold_split",
    "incremental_schedule",
    "synthesize_drift",
    "meta_features",
    "meta_features_from_arrays",
]


class ParseError(ValueError):
    """Malformed record; carries the 1-based line and column of the offence."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    label: int
    concentration: float
    batch_id: int
    index_in_batch: int


@dataclass(frozen=True)
class DriftDataset:
    """Chronologically ordered batches, stored as flat arrays.

    ``X[i]`` belongs to batch ``batch_ids[i]``; rows are in file order, so
    concatenating batches 1..K reproduces the original record order.
    """

    X: np.ndarray                 # (N, d) float64
    y: np.ndarray                 # (N,) int, labels in 1..class_count
    concentration: np.ndarray     # (N,) float64
    batch_ids: np.ndarray         # (N,) int, 1..K
    batch_sizes: tuple[int, ...]
    class_count: int
    feature_dim: int

    @property
    def sample_count(self) -> int:
        return self.X.shape[0]

    @property
    def batch_count(self) -> int:
        return len(self.batch_sizes)

    def batch_indices(self, batch_id: int) -> np.ndarray:
        """Global indices of one batch (1-based batch id)."""
        if not 1 <= batch_id <= self.batch_count:
            raise ValueError(f"batch_id {batch_id} outside 1..{self.batch_count}")
        start = sum(self.batch_sizes[: batch_id - 1])
        return np.arange(start, start + self.batch_sizes[batch_id - 1])

    def batch_samples(self, batch_id: int) -> list[Sample]:
        idx = self.batch_indices(batch_id)
        return [
            Sample(
                features=self.X[i].copy(),
                label=int(self.y[i]),
                concentration=float(self.concentration[i]),
                batch_id=batch_id,
                index_in_batch=j,
            )
            for j, i in enumerate(idx)
        ]

    @property
    def batches(self) -> list[list[Sample]]:
        return [self.batch_samples(b) for b in range(1, self.batch_count + 1)]

    def validate(self) -> None:
        if sum(self.batch_sizes) != self.sample_count:
            raise ValueError("batch_sizes do not sum to sample count")
        if self.X.shape[1] != self.feature_dim:
            raise ValueError("feature_dim mismatch")
        labels = np.unique(self.y)
        if labels.size and (labels.min() < 1 or labels.max() > self.class_count):
            raise ValueError("labels outside 1..class_count")
        expected = np.repeat(np.arange(1, self.batch_count + 1), self.batch_sizes)
        if not np.array_equal(expected, self.batch_ids):
            raise ValueError("batch_ids inconsistent with batch_sizes")


@dataclass(frozen=True)
class SplitPlan:
    """Disjoint train/test index sets over a dataset's global sample indices."""

    kind: str                     # "chronological" | "kfold" | "incremental"
    train_indices: np.ndarray
    test_indices: np.ndarray
    k_train: int | None = None
    fold_count: int | None = None
    fold_index: int | None = None
    seed: int | None = None
    step: int | None = None

    def __post_init__(self):
        overlap = np.intersect1d(self.train_indices, self.test_indices)
        if overlap.size:
            raise ValueError("train and test index sets overlap")


def _parse_number(token: str, what: str, line_no: int, col: int, integer: bool = False):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{what} is not numeric: {token!r}", line_no, col) from None
    if integer:
        if not value.is_integer():
            raise ParseError(f"{what} is not an integer: {token!r}", line_no, col)
        return int(value)
    return value


def parse_record(line: str, declared_dim: int | None = None, line_no: int = 1) -> Sample:
    """Parse one ``<label>;<concentration> <idx>:<value> ...`` record.

    Feature indices must be strictly increasing and 1-based; gaps are filled
    with zeros (sparse-format semantics). When ``declared_dim`` is given the
    record must end exactly at that index: trailing omissions are treated as
    corruption rather than implicit zeros.

    ``batch_id`` and ``index_in_batch`` are left at 0; the loader rewrites them.
    """
    stripped = line.strip()
    if not stripped:
        raise ParseError("empty record", line_no, 1)
    fields = stripped.split()
    head = fields[0]
    if ";" not in head:
        raise ParseError("missing ';' between label and concentration", line_no, 1)
    label_tok, conc_tok = head.split(";", 1)
    label = _parse_number(label_tok, "label", line_no, 1, integer=True)
    conc = _parse_number(conc_tok, "concentration", line_no, len(label_tok) + 2)

    col = len(head) + 2
    pairs: list[tuple[int, float]] = []
    prev_idx = 0
    for tok in fields[1:]:
        if ":" not in tok:
            raise ParseError(f"feature token without ':': {tok!r}", line_no, col)
        idx_tok, val_tok = tok.split(":", 1)
        idx = _parse_number(idx_tok, "feature index", line_no, col, integer=True)
        if idx <= prev_idx:
            raise ParseError(
                f"feature index {idx} not strictly increasing after {prev_idx}",
                line_no,
                col,
            )
        value = _parse_number(val_tok, "feature value", line_no, col + len(idx_tok) + 1)
        pairs.append((idx, float(value)))
        prev_idx = idx
        col += len(tok) + 1

    max_idx = prev_idx
    if declared_dim is not None:
        if max_idx > declared_dim:
            raise ParseError(
                f"feature index {max_idx} exceeds declared dimension {declared_dim}",
                line_no,
                col,
            )
        if max_idx < declared_dim:
            raise ParseError(
                f"record ends at feature {max_idx}, expected {declared_dim}",
                line_no,
                col,
            )
        dim = declared_dim
    else:
        if max_idx == 0:
            raise ParseError("record has no features", line_no, col)
        dim = max_idx

    features = np.zeros(dim, dtype=np.float64)
    for idx, value in pairs:
        features[idx - 1] = value
    return Sample(features=features, label=label, concentration=float(conc),
                  batch_id=0, index_in_batch=0)


def load_batches(paths: Sequence[str | Path]) -> DriftDataset:
    """Read one file per batch, in the given (chronological) order."""
    if not paths:
        raise ValueError("no batch files given")
    feature_rows: list[np.ndarray] = []
    labels: list[int] = []
    concs: list[float] = []
    batch_sizes: list[int] = []
    dim: int | None = None
    for path in paths:
        path = Path(path)
        count = 0
        with path.open("r", encoding="utf-8", errors="strict") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                sample = parse_record(line, declared_dim=dim, line_no=line_no)
                if dim is None:
                    dim = sample.features.shape[0]
                feature_rows.append(sample.features)
                labels.append(sample.label)
                concs.append(sample.concentration)
                count += 1
        if count == 0:
            raise ValueError(f"empty batch file: {path}")
        batch_sizes.append(count)
    assert dim is not None
    X = np.vstack(feature_rows)
    y = np.asarray(labels, dtype=np.int64)
    ds = DriftDataset(
        X=X,
        y=y,
        concentration=np.asarray(concs, dtype=np.float64),
        batch_ids=np.repeat(np.arange(1, len(batch_sizes) + 1), batch_sizes),
        batch_sizes=tuple(batch_sizes),
        class_count=int(y.max()),
        feature_dim=dim,
    )
    ds.validate()
    return ds


def chronological_split(ds: DriftDataset, k_train: int) -> SplitPlan:
    """Train on batches 1..k_train, test on the rest; file order preserved."""
    if not 1 <= k_train < ds.batch_count:
        raise ValueError(f"k_train {k_train} outside 1..{ds.batch_count - 1}")
    cut = int(np.searchsorted(ds.batch_ids, k_train, side="right"))
    n = ds.sample_count
    return SplitPlan(
        kind="chronological",
        train_indices=np.arange(cut),
        test_indices=np.arange(cut, n),
        k_train=k_train,
    )


def kfold_split(ds: DriftDataset, folds: int, seed: int) -> list[SplitPlan]:
    """Unstratified random k-fold partition; fold sizes differ by at most 1."""
    n = ds.sample_count
    if not 2 <= folds <= n:
        raise ValueError(f"folds {folds} outside 2..{n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    plans = []
    for i, test_idx in enumerate(np.array_split(perm, folds)):
        test_sorted = np.sort(test_idx)
        mask = np.ones(n, dtype=bool)
        mask[test_sorted] = False
        plans.append(
            SplitPlan(
                kind="kfold",
                train_indices=np.flatnonzero(mask),
                test_indices=test_sorted,
                fold_count=folds,
                fold_index=i,
                seed=seed,
            )
        )
    return plans


def incremental_schedule(ds: DriftDataset) -> list[SplitPlan]:
    """K-1 plans: step i trains on batches 1..i and tests on batch i+1."""
    if ds.batch_count < 2:
        raise ValueError("incremental schedule needs at least 2 batches")
    plans = []
    offsets = np.cumsum((0,) + ds.batch_sizes)
    for i in range(1, ds.batch_count):
        plans.append(
            SplitPlan(
                kind="incremental",
                train_indices=np.arange(offsets[i]),
                test_indices=np.arange(offsets[i], offsets[i + 1]),
                step=i,
            )
        )
    return plans


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian class blobs whose centres translate batch by batch.

    ``drift_per_batch[i]`` shifts every class centre of batch i+1 along a
    fixed direction (the normalized all-ones vector); ``sensitivity_decay``
    optionally multiplies all features of a batch, imitating aging sensors.
    ``layout="shells"`` places classes on concentric shells instead of blobs
    (radially separable, defeats linear boundaries).
    """

    class_count: int
    feature_dim: int
    batch_count: int
    samples_per_batch: int
    drift_per_batch: tuple[float, ...]
    noise_std: float = 1.0
    class_separation: float = 1.0
    sensitivity_decay: tuple[float, ...] | None = None
    layout: str = "blobs"

    def __post_init__(self):
        if min(self.class_count, self.feature_dim, self.batch_count,
               self.samples_per_batch) < 1:
            raise ValueError("all synthetic counts must be >= 1")
        if len(self.drift_per_batch) != self.batch_count:
            raise ValueError("drift_per_batch length must equal batch_count")
        if self.sensitivity_decay is not None and len(self.sensitivity_decay) != self.batch_count:
            raise ValueError("sensitivity_decay length must equal batch_count")
        if self.layout not in ("blobs", "shells"):
            raise ValueError(f"unknown layout {self.layout!r}")


def _blob_centers(spec: SyntheticSpec) -> np.ndarray:
    """Deterministic centre layout: axis-aligned, alternating signs.

    Class c sits at ``sign * separation`` on axis ``(c-1)//2 mod d``, so two
    classes in one dimension land exactly at +/- separation.
    """
    centers = np.zeros((spec.class_count, spec.feature_dim))
    for c in range(spec.class_count):
        axis = (c // 2) % spec.feature_dim
        sign = 1.0 if c % 2 == 0 else -1.0
        scale = 1.0 + (c // (2 * spec.feature_dim))  # extra rings if classes > 2d
        centers[c, axis] = sign * spec.class_separation * scale
    return centers


def synthesize_drift(spec: SyntheticSpec, seed: int) -> DriftDataset:
    """Generate a drifting dataset; bitwise reproducible for (spec, seed).

    The noise stream is keyed by sample position within a batch and shared
    across batches: every batch is the same base measurement pattern, shifted
    by its drift magnitude (and scaled by its decay). With all-zero drift the
    batches come out identical.
    """
    drift_dir = np.ones(spec.feature_dim) / math.sqrt(spec.feature_dim)
    centers = _blob_centers(spec)
    per_class = np.full(spec.class_count, spec.samples_per_batch // spec.class_count)
    per_class[: spec.samples_per_batch % spec.class_count] += 1

    rng = np.random.default_rng(seed)
    base_rows, base_labels = [], []
    for c in range(spec.class_count):
        n_c = int(per_class[c])
        if spec.layout == "blobs":
            pts = centers[c] + rng.normal(0.0, spec.noise_std, size=(n_c, spec.feature_dim))
        else:
            radius = spec.class_separation * c
            raw = rng.normal(0.0, 1.0, size=(n_c, spec.feature_dim))
            norms = np.linalg.norm(raw, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            pts = raw / norms * radius + rng.normal(
                0.0, spec.noise_std, size=(n_c, spec.feature_dim)
            )
        base_rows.append(pts)
        base_labels.append(np.full(n_c, c + 1, dtype=np.int64))
    base = np.vstack(base_rows)
    base_y = np.concatenate(base_labels)

    rows, labels = [], []
    for b in range(spec.batch_count):
        pts = base + spec.drift_per_batch[b] * drift_dir
        if spec.sensitivity_decay is not None:
            pts = pts * spec.sensitivity_decay[b]
        rows.append(pts)
        labels.append(base_y)
    X = np.vstack(rows)
    y = np.concatenate(labels)
    sizes = tuple([spec.samples_per_batch] * spec.batch_count)
    ds = DriftDataset(
        X=X,
        y=y,
        concentration=np.zeros(X.shape[0]),
        batch_ids=np.repeat(np.arange(1, spec.batch_count + 1), sizes),
        batch_sizes=sizes,
        class_count=spec.class_count,
        feature_dim=spec.feature_dim,
    )
    ds.validate()
    return ds


@dataclass(frozen=True)
class MetaFeatures:
    """Cheap dataset descriptors used to match datasets for warm-starting."""

    sample_count: int
    feature_dim: int
    class_count: int
    class_imbalance_ratio: float
    log_sample_count: float
    log_feature_dim: float
    mean_of_feature_means: float
    std_of_feature_means: float
    mean_of_feature_stds: float
    mean_feature_skew: float

    def as_vector(self) -> np.ndarray:
        return np.array(
            [
                self.log_sample_count,
                self.log_feature_dim,
                float(self.class_count),
                self.class_imbalance_ratio,
                self.mean_of_feature_means,
                self.std_of_feature_means,
                self.mean_of_feature_stds,
                self.mean_feature_skew,
            ]
        )


def meta_features(ds: DriftDataset, indices: np.ndarray | Sequence[int]) -> MetaFeatures:
    """Summary statistics over the selected samples only (never test data)."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("empty index set")
    return meta_features_from_arrays(ds.X[idx], ds.y[idx])


def meta_features_from_arrays(X: np.ndarray, y: np.ndarray) -> MetaFeatures:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.shape[0] == 0:
        raise ValueError("empty index set")
    idx = np.arange(X.shape[0])
    _, counts = np.unique(y, return_counts=True)
    imbalance = float(counts.max() / counts.min())
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    centered = X - means
    with np.errstate(invalid="ignore", divide="ignore"):
        skew = np.where(stds > 0, (centered**3).mean(axis=0) / np.where(stds > 0, stds, 1.0) ** 3, 0.0)
    return MetaFeatures(
        sample_count=int(idx.size),
        feature_dim=int(X.shape[1]),
        class_count=int(counts.size),
        class_imbalance_ratio=imbalance,
        log_sample_count=float(np.log(idx.size)),
        log_feature_dim=float(np.log(X.shape[1])),
        mean_of_feature_means=float(means.mean()),
        std_of_feature_means=float(means.std()),
        mean_of_feature_stds=float(stds.mean()),
        mean_feature_skew=float(skew.mean()),
    )
