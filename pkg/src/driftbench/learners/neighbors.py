"""Instance-based and generative baselines: k-nearest-neighbours, Gaussian NB."""

from __future__ import annotations

import numpy as np

__all__ = ["KNN", "GaussianNB"]


class KNN:
    """Brute-force Euclidean k-NN; votes are weighted by sample weight.

    Distance ties resolve by training order (stable sort), so memorized
    points always pick themselves first at k=1.
    """

    def __init__(self, k=5):
        self.k = k
        self.X: np.ndarray | None = None
        self.y: np.ndarray | None = None
        self.w: np.ndarray | None = None
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.X = np.asarray(X, dtype=np.float64).copy()
        self.y = np.asarray(y, dtype=np.int64).copy()
        self.w = np.asarray(sample_weight, dtype=np.float64).copy()
        self.n_classes = n_classes
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        k = min(self.k, self.X.shape[0])
        proba = np.empty((X.shape[0], self.n_classes))
        train_sq = np.einsum("ij,ij->i", self.X, self.X)
        chunk = max(1, int(2e7 // max(1, self.X.shape[0])))
        for start in range(0, X.shape[0], chunk):
            Q = X[start: start + chunk]
            d2 = train_sq[None, :] - 2.0 * (Q @ self.X.T)
            d2 += np.einsum("ij,ij->i", Q, Q)[:, None]
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
            for r in range(Q.shape[0]):
                votes = np.zeros(self.n_classes)
                np.add.at(votes, self.y[nearest[r]], self.w[nearest[r]])
                proba[start + r] = votes / votes.sum()
        return proba


class GaussianNB:
    """Weighted Gaussian naive Bayes with additive variance smoothing."""

    def __init__(self, var_smoothing=1e-9):
        self.var_smoothing = var_smoothing
        self.priors: np.ndarray | None = None
        self.means: np.ndarray | None = None   # (C, d)
        self.variances: np.ndarray | None = None
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        n, d = X.shape
        w = sample_weight
        wsum_total = w.sum()
        global_mean = (w[:, None] * X).sum(axis=0) / wsum_total
        global_var = (w[:, None] * (X - global_mean) ** 2).sum(axis=0) / wsum_total
        epsilon = self.var_smoothing * max(float(global_var.max()), 1e-300)

        priors = np.zeros(n_classes)
        means = np.zeros((n_classes, d))
        variances = np.full((n_classes, d), epsilon)
        for c in range(n_classes):
            mask = y == c
            if not mask.any():
                priors[c] = 0.0
                continue
            wc = w[mask]
            wc_sum = wc.sum()
            priors[c] = wc_sum / wsum_total
            mu = (wc[:, None] * X[mask]).sum(axis=0) / wc_sum
            var = (wc[:, None] * (X[mask] - mu) ** 2).sum(axis=0) / wc_sum
            means[c] = mu
            variances[c] = var + epsilon
        self.priors = priors
        self.means = means
        self.variances = variances
        return self

    def _joint_log_likelihood(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        jll = np.full((X.shape[0], self.n_classes), -np.inf)
        for c in range(self.n_classes):
            if self.priors[c] <= 0:
                continue
            diff = X - self.means[c]
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.variances[c]))
            ll = ll - 0.5 * np.sum(diff * diff / self.variances[c], axis=1)
            jll[:, c] = np.log(self.priors[c]) + ll
        return jll

    def predict_proba(self, X) -> np.ndarray:
        jll = self._joint_log_likelihood(X)
        shift = jll.max(axis=1, keepdims=True)
        p = np.exp(jll - shift)
        return p / p.sum(axis=1, keepdims=True)
