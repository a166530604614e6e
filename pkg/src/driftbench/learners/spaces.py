"""Hyperparameter space descriptors and the per-algorithm default spaces.

A space is an ordered tuple of parameter descriptors; conditionals
(``active_when``) may only reference parameters declared earlier, which keeps
activation acyclic by construction. Sampling resolves parameters in order and
omits inactive ones from the resulting dict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = [
    "IntRange",
    "FloatRange",
    "Categorical",
    "HyperparamSpace",
    "default_space",
]


@dataclass(frozen=True)
class IntRange:
    name: str
    low: int
    high: int
    log: bool = False
    active_when: tuple[tuple[str, Any], ...] = ()

    def sample(self, rng: np.random.Generator) -> int:
        if self.log:
            value = math.exp(rng.uniform(math.log(self.low), math.log(self.high)))
            return int(min(max(round(value), self.low), self.high))
        return int(rng.integers(self.low, self.high + 1))

    def contains(self, value) -> bool:
        return isinstance(value, (int, np.integer)) and self.low <= value <= self.high


@dataclass(frozen=True)
class FloatRange:
    name: str
    low: float
    high: float
    log: bool = False
    active_when: tuple[tuple[str, Any], ...] = ()

    def sample(self, rng: np.random.Generator) -> float:
        if self.log:
            return float(math.exp(rng.uniform(math.log(self.low), math.log(self.high))))
        return float(rng.uniform(self.low, self.high))

    def contains(self, value) -> bool:
        return isinstance(value, (int, float, np.floating, np.integer)) and \
            self.low <= float(value) <= self.high


@dataclass(frozen=True)
class Categorical:
    name: str
    choices: tuple
    active_when: tuple[tuple[str, Any], ...] = ()

    def sample(self, rng: np.random.Generator):
        return self.choices[int(rng.integers(0, len(self.choices)))]

    def contains(self, value) -> bool:
        return value in self.choices


Param = IntRange | FloatRange | Categorical


def _is_active(param: Param, resolved: dict) -> bool:
    return all(resolved.get(name) == value for name, value in param.active_when)


@dataclass(frozen=True)
class HyperparamSpace:
    params: tuple[Param, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for p in self.params:
            for dep, _ in p.active_when:
                if dep not in seen:
                    raise ValueError(f"conditional {p.name} references later/unknown {dep}")
            seen.add(p.name)

    def sample(self, rng: np.random.Generator) -> dict:
        resolved: dict[str, Any] = {}
        for p in self.params:
            if _is_active(p, resolved):
                resolved[p.name] = p.sample(rng)
        return resolved

    def contains(self, values: dict) -> bool:
        resolved: dict[str, Any] = {}
        for p in self.params:
            active = _is_active(p, resolved)
            present = p.name in values
            if active != present:
                return False
            if active:
                if not p.contains(values[p.name]):
                    return False
                resolved[p.name] = values[p.name]
        return len(values) == len(resolved)

    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)


def _tree_depth_params() -> tuple[Param, ...]:
    return (
        Categorical("max_depth_mode", ("none", "limit")),
        IntRange("max_depth", 2, 32, log=True, active_when=(("max_depth_mode", "limit"),)),
    )


_SPACES: dict[str, HyperparamSpace] = {
    "decision_tree": HyperparamSpace((
        Categorical("criterion", ("gini", "entropy")),
        *_tree_depth_params(),
        IntRange("min_samples_split", 2, 20),
        IntRange("min_samples_leaf", 1, 20),
    )),
    "random_forest": HyperparamSpace((
        IntRange("n_estimators", 16, 256, log=True),
        Categorical("criterion", ("gini", "entropy")),
        *_tree_depth_params(),
        IntRange("min_samples_split", 2, 20),
        IntRange("min_samples_leaf", 1, 20),
        Categorical("bootstrap", (True, False)),
    )),
    "knn": HyperparamSpace((
        IntRange("k", 1, 25),
    )),
    "logistic_regression": HyperparamSpace((
        FloatRange("C", 1e-3, 1e3, log=True),
        IntRange("max_iter", 100, 1000, log=True),
    )),
    "gaussian_nb": HyperparamSpace((
        FloatRange("var_smoothing", 1e-12, 1e-6, log=True),
    )),
    "mlp": HyperparamSpace((
        IntRange("hidden_layers", 1, 2),
        IntRange("width", 16, 256, log=True),
        Categorical("activation", ("tanh", "relu")),
        FloatRange("learning_rate", 1e-4, 1e-1, log=True),
        Categorical("early_stopping", (True, False)),
    )),
    "passive_aggressive": HyperparamSpace((
        FloatRange("C", 1e-3, 1e3, log=True),
        IntRange("max_iter", 10, 200, log=True),
    )),
    "gradient_boosting": HyperparamSpace((
        IntRange("n_estimators", 16, 256, log=True),
        FloatRange("learning_rate", 1e-2, 1.0, log=True),
        IntRange("max_depth", 1, 8),
    )),
    "adaboost": HyperparamSpace((
        IntRange("n_estimators", 16, 256, log=True),
        FloatRange("learning_rate", 1e-2, 1.0, log=True),
        IntRange("max_depth", 1, 8),
    )),
    "bagging": HyperparamSpace((
        IntRange("n_estimators", 5, 50),
        FloatRange("subsample", 0.5, 1.0),
    )),
    "svm_linear": HyperparamSpace((
        Categorical("kernel", ("linear",)),
        FloatRange("C", 1e-2, 1e3, log=True),
    )),
    "svm_rbf": HyperparamSpace((
        Categorical("kernel", ("rbf",)),
        FloatRange("C", 1e-2, 1e3, log=True),
        FloatRange("gamma", 1e-4, 1e1, log=True),
    )),
}


def default_space(algorithm: str) -> HyperparamSpace:
    try:
        return _SPACES[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None
