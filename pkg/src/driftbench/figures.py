"""Matplotlib renderings of experiment outputs, saved next to the CSVs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "benchmark_bars",
    "stability_bars",
    "cv_compare_bars",
    "online_curves",
    "confusion_heatmap",
    "roc_curves",
    "linearity_bars",
    "composition_bars",
    "decision_grid_figure",
]

plt.rcParams.update({
    "figure.figsize": (8, 4.5),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
})


def _save(fig, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def benchmark_bars(rows: list[dict], path) -> None:
    """Grouped precision/recall/F1 bars, one group per model."""
    models = [r["model"] for r in rows]
    x = np.arange(len(models))
    width = 0.27
    fig, ax = plt.subplots()
    for i, key in enumerate(("precision", "recall", "f1")):
        ax.bar(x + (i - 1) * width, [r[key] for r in rows], width, label=key)
    ax.set_xticks(x, models, rotation=30, ha="right")
    ax.set_ylim(0, 1)
    ax.set_ylabel("macro score")
    ax.legend()
    _save(fig, path)


def stability_bars(rows: list[dict], path) -> None:
    """Mean accuracy with std error bars across repeated runs."""
    models = [r["model"] for r in rows]
    means = [r["accuracy"] for r in rows]
    stds = [r.get("accuracy_std", 0.0) for r in rows]
    fig, ax = plt.subplots()
    ax.bar(models, means, yerr=stds, capsize=3)
    ax.set_ylim(0, 1)
    ax.set_ylabel("accuracy")
    ax.tick_params(axis="x", rotation=30)
    _save(fig, path)


def cv_compare_bars(rows: list[dict], path) -> None:
    """Cross-validation F1 next to the chronological-paradigm F1."""
    models = [r["model"] for r in rows]
    x = np.arange(len(models))
    fig, ax = plt.subplots()
    ax.bar(x - 0.2, [r["cv_f1"] for r in rows], 0.4, label="10-fold CV")
    ax.bar(x + 0.2, [r["paradigm_f1"] for r in rows], 0.4, label="chronological")
    ax.set_xticks(x, models, rotation=30, ha="right")
    ax.set_ylim(0, 1)
    ax.set_ylabel("macro F1")
    ax.legend()
    _save(fig, path)


def online_curves(rows: list[dict], path) -> None:
    """Accuracy per incremental step, one line per model."""
    fig, ax = plt.subplots()
    models = sorted({r["model"] for r in rows})
    for model in models:
        pts = sorted((r["step"], r["accuracy"]) for r in rows if r["model"] == model)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=model)
    ax.set_xlabel("training batches")
    ax.set_ylabel("accuracy on next batch")
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    _save(fig, path)


def confusion_heatmap(matrix: np.ndarray, classes, path, title: str = "") -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(matrix, cmap="Blues")
    ax.set_xticks(range(len(classes)), classes)
    ax.set_yticks(range(len(classes)), classes)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    if title:
        ax.set_title(title)
    threshold = matrix.max() / 2 if matrix.size else 0
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            ax.text(j, i, f"{int(matrix[i, j])}", ha="center", va="center",
                    color="white" if matrix[i, j] > threshold else "black", fontsize=8)
    fig.colorbar(im, ax=ax)
    ax.grid(False)
    _save(fig, path)


def roc_curves(per_class: dict, path) -> None:
    """One-vs-rest ROC curves, one line per class."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    for label in sorted(per_class):
        entry = per_class[label]
        points = np.asarray(entry["points"])
        ax.plot(points[:, 0], points[:, 1],
                label=f"class {label} (AUC={entry['auc']:.3f})")
    ax.plot([0, 1], [0, 1], "k--", linewidth=0.8)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.legend(fontsize=8)
    _save(fig, path)


def linearity_bars(rows: list[dict], path) -> None:
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.bar([r["model"] for r in rows], [r["accuracy"] for r in rows],
           yerr=[r.get("accuracy_std", 0.0) for r in rows], capsize=3)
    ax.set_ylim(0, 1)
    ax.set_ylabel("10-fold CV accuracy")
    _save(fig, path)


def composition_bars(composition: list[dict], path) -> None:
    """Ensemble member weights by algorithm."""
    labels = [f"{i}: {m['algorithm']}" for i, m in enumerate(composition)]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.barh(labels, [m["weight"] for m in composition])
    ax.set_xlabel("ensemble weight")
    _save(fig, path)


def decision_grid_figure(xs, ys, labels, points, point_labels, path,
                         axis_names=("feature x", "feature y")) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.pcolormesh(xs, ys, labels, cmap="tab10", alpha=0.35, shading="auto",
                  vmin=labels.min(), vmax=max(labels.max(), labels.min() + 1))
    if points is not None:
        sc = ax.scatter(points[:, 0], points[:, 1], c=point_labels, cmap="tab10",
                        s=8, edgecolors="none")
        fig.colorbar(sc, ax=ax, label="class")
    ax.set_xlabel(axis_names[0])
    ax.set_ylabel(axis_names[1])
    ax.grid(False)
    _save(fig, path)
