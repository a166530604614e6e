import os
from pathlib import Path

import numpy as np
import pytest

from driftbench.data import DriftDataset, SyntheticSpec, synthesize_drift


def make_dataset(X, y, batch_sizes, class_count=None) -> DriftDataset:
    """Assemble a DriftDataset from raw arrays for tests."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    sizes = tuple(batch_sizes)
    ds = DriftDataset(
        X=X,
        y=y,
        concentration=np.zeros(X.shape[0]),
        batch_ids=np.repeat(np.arange(1, len(sizes) + 1), sizes),
        batch_sizes=sizes,
        class_count=class_count or int(y.max()),
        feature_dim=X.shape[1],
    )
    ds.validate()
    return ds


def drifting_dataset(seed=100, classes=4, dim=8, batches=6, per_batch=80,
                     step=0.5, noise=1.2, separation=1.5) -> DriftDataset:
    spec = SyntheticSpec(
        class_count=classes,
        feature_dim=dim,
        batch_count=batches,
        samples_per_batch=per_batch,
        drift_per_batch=tuple(step * b for b in range(batches)),
        noise_std=noise,
        class_separation=separation,
    )
    return synthesize_drift(spec, seed=seed)


def dataset_dir() -> Path | None:
    """Directory holding batch1.dat..batch10.dat, if configured."""
    root = os.environ.get("DRIFTBENCH_DATA")
    if root:
        path = Path(root)
        if all((path / f"batch{i}.dat").exists() for i in range(1, 11)):
            return path
    return None


def batch_paths() -> list[str]:
    root = dataset_dir()
    assert root is not None
    return [str(root / f"batch{i}.dat") for i in range(1, 11)]


requires_dataset = pytest.mark.skipif(
    dataset_dir() is None,
    reason="gas-sensor batch files not found (set DRIFTBENCH_DATA to their directory)",
)
