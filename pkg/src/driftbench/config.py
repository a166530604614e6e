"""Run configuration: YAML schema, validation, CLI overrides."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import learners
from .data import SyntheticSpec
from .search import SearchBudget, SearchOptions

__all__ = ["RunConfig", "ConfigError", "load_config"]

EXPERIMENTS = ("benchmark", "cv_compare", "online", "ablation", "linearity", "automl", "grid")


class ConfigError(ValueError):
    pass


@dataclass
class GridSpec:
    model: str = "random_forest"
    params: dict = field(default_factory=dict)
    feature_x: int = 0
    feature_y: int = 1
    resolution: int = 100
    train_fraction: float = 0.5
    bounds: tuple[float, float, float, float] | None = None


@dataclass
class RunConfig:
    experiment: str
    dataset_files: list[str] | None
    synthetic: SyntheticSpec | None
    synthetic_seed: int
    models: list[str]
    seeds: list[int]
    output_dir: Path
    budget: SearchBudget
    automl_options: SearchOptions
    k_train: int = 5
    folds: int = 10
    tuning_trials: int = 25
    online_max_trials: int = 15
    training: str = "paradigm"          # automl experiment: paradigm | half
    figures: bool = True
    workers: int = 1
    grid: GridSpec = field(default_factory=GridSpec)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if (self.dataset_files is None) == (self.synthetic is None):
            raise ConfigError("exactly one of dataset.files / dataset.synthetic required")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if self.experiment in ("benchmark", "cv_compare", "online") and not self.models:
            raise ConfigError(f"{self.experiment} requires a non-empty model list")
        for m in self.models:
            if m != "automl" and m not in learners.ALGORITHM_IDS:
                raise ConfigError(f"unknown model id {m!r}")
        if self.training not in ("paradigm", "half"):
            raise ConfigError("training must be 'paradigm' or 'half'")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "dataset": (
                {"files": list(self.dataset_files)}
                if self.dataset_files is not None
                else {"synthetic": _synthetic_to_dict(self.synthetic, self.synthetic_seed)}
            ),
            "models": list(self.models),
            "seeds": list(self.seeds),
            "output_dir": str(self.output_dir),
            "budget": {
                "wall_clock_secs": self.budget.wall_clock_secs,
                "per_trial_secs": self.budget.per_trial_secs,
                "max_trials": self.budget.max_trials,
                "ensemble_pool_size": self.budget.ensemble_pool_size,
            },
            "automl": self.automl_options.to_dict(),
            "k_train": self.k_train,
            "folds": self.folds,
            "tuning_trials": self.tuning_trials,
            "online_max_trials": self.online_max_trials,
            "training": self.training,
            "figures": self.figures,
            "workers": self.workers,
            "grid": {
                "model": self.grid.model,
                "params": dict(self.grid.params),
                "feature_x": self.grid.feature_x,
                "feature_y": self.grid.feature_y,
                "resolution": self.grid.resolution,
                "train_fraction": self.grid.train_fraction,
                "bounds": list(self.grid.bounds) if self.grid.bounds else None,
            },
        }


def _synthetic_to_dict(spec: SyntheticSpec, seed: int) -> dict:
    return {
        "class_count": spec.class_count,
        "feature_dim": spec.feature_dim,
        "batch_count": spec.batch_count,
        "samples_per_batch": spec.samples_per_batch,
        "drift_per_batch": list(spec.drift_per_batch),
        "noise_std": spec.noise_std,
        "class_separation": spec.class_separation,
        "sensitivity_decay": list(spec.sensitivity_decay) if spec.sensitivity_decay else None,
        "layout": spec.layout,
        "seed": seed,
    }


def _synthetic_from_dict(d: dict) -> tuple[SyntheticSpec, int]:
    try:
        spec = SyntheticSpec(
            class_count=int(d["class_count"]),
            feature_dim=int(d["feature_dim"]),
            batch_count=int(d["batch_count"]),
            samples_per_batch=int(d["samples_per_batch"]),
            drift_per_batch=tuple(float(v) for v in d["drift_per_batch"]),
            noise_std=float(d.get("noise_std", 1.0)),
            class_separation=float(d.get("class_separation", 1.0)),
            sensitivity_decay=(
                tuple(float(v) for v in d["sensitivity_decay"])
                if d.get("sensitivity_decay")
                else None
            ),
            layout=d.get("layout", "blobs"),
        )
    except KeyError as exc:
        raise ConfigError(f"synthetic spec missing field {exc}") from None
    return spec, int(d.get("seed", 0))


def _budget_from_dict(d: dict) -> SearchBudget:
    return SearchBudget(
        wall_clock_secs=float(d.get("wall_clock_secs", 1200.0)),
        per_trial_secs=float(d.get("per_trial_secs", 60.0)),
        max_trials=int(d.get("max_trials", 10_000)),
        ensemble_pool_size=int(d.get("ensemble_pool_size", 20)),
    )


def _options_from_dict(d: dict) -> SearchOptions:
    algorithms = d.get("algorithms")
    return SearchOptions(
        meta=bool(d.get("meta", True)),
        search_preprocessing=bool(d.get("search_preprocessing", True)),
        ensembling=bool(d.get("ensembling", True)),
        holdout_fraction=float(d.get("holdout_fraction", 0.2)),
        algorithms=tuple(algorithms) if algorithms else None,
        warmstart_count=int(d.get("warmstart_count", 8)),
    )


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    dataset = raw.get("dataset", {})
    files = dataset.get("files")
    synthetic = None
    synthetic_seed = 0
    if dataset.get("synthetic") is not None:
        synthetic, synthetic_seed = _synthetic_from_dict(dataset["synthetic"])
    grid_raw = raw.get("grid", {})
    bounds = grid_raw.get("bounds")
    cfg = RunConfig(
        experiment=raw.get("experiment", ""),
        dataset_files=[str(p) for p in files] if files is not None else None,
        synthetic=synthetic,
        synthetic_seed=synthetic_seed,
        models=[str(m) for m in raw.get("models", [])],
        seeds=[int(s) for s in raw.get("seeds", [])],
        output_dir=Path(raw.get("output_dir", "results")),
        budget=_budget_from_dict(raw.get("budget", {})),
        automl_options=_options_from_dict(raw.get("automl", {})),
        k_train=int(raw.get("k_train", 5)),
        folds=int(raw.get("folds", 10)),
        tuning_trials=int(raw.get("tuning_trials", 25)),
        online_max_trials=int(raw.get("online_max_trials", 15)),
        training=str(raw.get("training", "paradigm")),
        figures=bool(raw.get("figures", True)),
        workers=int(raw.get("workers", 1)),
        grid=GridSpec(
            model=str(grid_raw.get("model", "random_forest")),
            params=dict(grid_raw.get("params", {})),
            feature_x=int(grid_raw.get("feature_x", 0)),
            feature_y=int(grid_raw.get("feature_y", 1)),
            resolution=int(grid_raw.get("resolution", 100)),
            train_fraction=float(grid_raw.get("train_fraction", 0.5)),
            bounds=tuple(float(b) for b in bounds) if bounds else None,
        ),
    )
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> RunConfig:
    with Path(path).open("r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return config_from_dict(raw or {})
