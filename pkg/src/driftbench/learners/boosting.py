"""Boosted tree ensembles: additive logistic boosting and SAMME reweighting."""

from __future__ import annotations

import numpy as np

from .trees import ClassificationTree, RegressionTree

__all__ = ["GradientBoosting", "AdaBoost"]

_EPS = 1e-12


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


class GradientBoosting:
    """One-vs-rest additive regression trees on logistic loss.

    Each class gets its own stagewise chain; leaves carry a Newton step
    (gradient sum over hessian sum) shrunk by the learning rate.
    """

    def __init__(self, n_estimators=100, learning_rate=0.1, max_depth=3):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.chains: list[list[RegressionTree]] = []
        self.base_scores: np.ndarray | None = None
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        self.chains = []
        w = sample_weight / sample_weight.mean()
        base = []
        for c in range(n_classes):
            t = (y == c).astype(np.float64)
            prior = np.clip(np.dot(w, t) / w.sum(), _EPS, 1 - _EPS)
            score0 = float(np.log(prior / (1 - prior)))
            base.append(score0)
            scores = np.full(X.shape[0], score0)
            chain = []
            for _ in range(self.n_estimators):
                p = _sigmoid(scores)
                residual = t - p
                tree = RegressionTree(max_depth=self.max_depth, min_samples_leaf=1)
                tree.fit(X, residual, w)
                leaves = tree.apply(X)
                # replace leaf means by Newton steps over the assigned samples
                hess = np.maximum(p * (1 - p), _EPS) * w
                grad = residual * w
                for leaf in np.unique(leaves):
                    m = leaves == leaf
                    tree.value[leaf, 0] = grad[m].sum() / hess[m].sum()
                scores = scores + self.learning_rate * tree.value[leaves, 0]
                chain.append(tree)
            self.chains.append(chain)
        self.base_scores = np.asarray(base)
        return self

    def decision_scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        scores = np.tile(self.base_scores, (X.shape[0], 1))
        for c, chain in enumerate(self.chains):
            for tree in chain:
                scores[:, c] += self.learning_rate * tree.predict(X)
        return scores

    def predict_proba(self, X) -> np.ndarray:
        p = _sigmoid(self.decision_scores(X))
        p = np.clip(p, _EPS, None)
        return p / p.sum(axis=1, keepdims=True)


class AdaBoost:
    """SAMME with depth-capped CART base learners.

    With a single round the ensemble's predictions coincide with the base
    tree's. Probabilities are stage-weight vote fractions.
    """

    def __init__(self, n_estimators=50, learning_rate=1.0, max_depth=1):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.stages: list[ClassificationTree] = []
        self.alphas: list[float] = []
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        self.stages = []
        self.alphas = []
        total_w = sample_weight.sum()  # boost weights keep this scale so the
        w = sample_weight.copy()       # trees' weight-based count limits hold
        for _ in range(self.n_estimators):
            tree = ClassificationTree(max_depth=self.max_depth)
            tree.fit(X, y, w, n_classes=n_classes)
            pred = tree.predict_votes(X)
            miss = pred != y
            err = float(w[miss].sum() / w.sum())
            if err <= 0.0:
                self.stages.append(tree)
                self.alphas.append(1.0)
                break
            if err >= 1.0 - 1.0 / n_classes:
                if not self.stages:  # keep one stage so the model predicts
                    self.stages.append(tree)
                    self.alphas.append(1.0)
                break
            alpha = self.learning_rate * (np.log((1 - err) / err) + np.log(n_classes - 1))
            self.stages.append(tree)
            self.alphas.append(float(alpha))
            w = w * np.exp(alpha * miss)
            w = w / w.sum() * total_w
        return self

    def predict_proba(self, X) -> np.ndarray:
        votes = np.zeros((X.shape[0], self.n_classes))
        for tree, alpha in zip(self.stages, self.alphas):
            votes[np.arange(X.shape[0]), tree.predict_votes(X)] += alpha
        total = votes.sum(axis=1, keepdims=True)
        uniform = np.full_like(votes, 1.0 / self.n_classes)
        return np.where(total > 0, votes / np.where(total > 0, total, 1.0), uniform)
