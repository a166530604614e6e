"""Tree ensembles over the CART base learner.

Randomness comes from bootstrap resampling only; every tree sees all
features, so a single-tree forest with bootstrap off reduces exactly to the
plain decision tree.
"""

from __future__ import annotations

import numpy as np

from .trees import ClassificationTree

__all__ = ["RandomForest", "Bagging"]


def _tree_seeds(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2**63 - 1, size=n)


class RandomForest:
    """Bootstrap ensemble of CART trees; probabilities are vote fractions."""

    def __init__(self, n_estimators=100, max_depth=None, min_samples_split=2,
                 min_samples_leaf=1, bootstrap=True, criterion="gini"):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.bootstrap = bootstrap
        self.criterion = criterion
        self.trees: list[ClassificationTree] = []
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        self.trees = []
        seeds = _tree_seeds(rng, self.n_estimators)
        n = X.shape[0]
        for s in seeds:
            tree = ClassificationTree(
                criterion=self.criterion,
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                min_samples_leaf=self.min_samples_leaf,
            )
            if self.bootstrap:
                idx = np.random.default_rng(s).integers(0, n, size=n)
                tree.fit(X[idx], y[idx], sample_weight[idx], n_classes=n_classes)
            else:
                tree.fit(X, y, sample_weight, n_classes=n_classes)
            self.trees.append(tree)
        return self

    def predict_proba(self, X) -> np.ndarray:
        votes = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            votes[np.arange(X.shape[0]), tree.predict_votes(X)] += 1.0
        return votes / len(self.trees)


class Bagging:
    """Subsample-with-replacement bagging; probabilities are averaged leaf
    distributions of the member trees."""

    def __init__(self, n_estimators=10, subsample=1.0):
        self.n_estimators = n_estimators
        self.subsample = subsample
        self.trees: list[ClassificationTree] = []
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        self.trees = []
        n = X.shape[0]
        m = max(1, int(round(self.subsample * n)))
        for s in _tree_seeds(rng, self.n_estimators):
            idx = np.random.default_rng(s).integers(0, n, size=m)
            tree = ClassificationTree()
            tree.fit(X[idx], y[idx], sample_weight[idx], n_classes=n_classes)
            self.trees.append(tree)
        return self

    def predict_proba(self, X) -> np.ndarray:
        total = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)
