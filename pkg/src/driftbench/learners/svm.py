"""Support vector machines via dual coordinate descent, one-vs-rest.

The bias is folded in by augmenting the feature space (linear) or adding a
constant to the kernel (RBF), so the dual stays box-constrained only.
Probability rows are softmax over the per-class decision values.
"""

from __future__ import annotations

import numpy as np

from .linear import softmax

__all__ = ["SVMLinear", "SVMRBF"]

_TOL = 1e-4


def _binary_targets(y: np.ndarray, n_classes: int) -> np.ndarray:
    return np.where(y[:, None] == np.arange(n_classes), 1.0, -1.0)


def _dual_cd_linear(Xa, t, box, max_iter):
    """L2-hinge dual coordinate descent for one binary problem.

    Xa is the bias-augmented matrix; t the +/-1 targets; box the per-sample
    upper bounds. Deterministic: samples are visited in index order.
    """
    n = Xa.shape[0]
    alpha = np.zeros(n)
    w = np.zeros(Xa.shape[1])
    qii = np.einsum("ij,ij->i", Xa, Xa)
    for _ in range(max_iter):
        max_pg = 0.0
        for i in range(n):
            g = t[i] * (Xa[i] @ w) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= box[i]:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg == 0.0:
                continue
            max_pg = max(max_pg, abs(pg))
            new_a = min(max(a - g / qii[i], 0.0), box[i])
            if new_a != a:
                w += (new_a - a) * t[i] * Xa[i]
                alpha[i] = new_a
        if max_pg < _TOL:
            break
    return w


def _dual_cd_kernel(K, t, box, max_iter):
    """Same solver against a precomputed kernel matrix."""
    n = K.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)  # (Q alpha)_i - 1 maintained incrementally
    diag = np.ascontiguousarray(np.diag(K)).astype(np.float64)
    for _ in range(max_iter):
        max_pg = 0.0
        for i in range(n):
            g = grad[i]
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= box[i]:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg == 0.0:
                continue
            max_pg = max(max_pg, abs(pg))
            new_a = min(max(a - g / diag[i], 0.0), box[i])
            delta = new_a - a
            if delta != 0.0:
                grad += delta * t[i] * t * K[i]
                alpha[i] = new_a
        if max_pg < _TOL:
            break
    return alpha


def _rbf_kernel(A, B, gamma, dtype=np.float64):
    a2 = np.einsum("ij,ij->i", A, A)
    b2 = np.einsum("ij,ij->i", B, B)
    d2 = a2[:, None] + b2[None, :] - 2.0 * (A @ B.T)
    np.clip(d2, 0.0, None, out=d2)
    return np.exp(-gamma * d2, dtype=dtype)


class SVMLinear:
    def __init__(self, C=1.0, max_iter=50):
        self.C = C
        self.max_iter = max_iter
        self.coef: np.ndarray | None = None   # (d, C) incl. bias handling
        self.bias: np.ndarray | None = None
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        Xa = np.hstack([X, np.ones((X.shape[0], 1))])
        targets = _binary_targets(y, n_classes)
        coef = np.zeros((X.shape[1], n_classes))
        bias = np.zeros(n_classes)
        for c in range(n_classes):
            box = self.C * sample_weight
            w = _dual_cd_linear(Xa, targets[:, c], box, self.max_iter)
            coef[:, c] = w[:-1]
            bias[c] = w[-1]
        self.coef = coef
        self.bias = bias
        return self

    def decision_scores(self, X) -> np.ndarray:
        return X @ self.coef + self.bias

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_scores(X))


class SVMRBF:
    """Kernel SVM; the full training kernel is materialized once per fit
    (float32 above ~8k samples to cap memory) and shared by all classes."""

    def __init__(self, C=1.0, gamma="scale", max_iter=30):
        self.C = C
        self.gamma = gamma
        self.max_iter = max_iter
        self.support_X: np.ndarray | None = None
        self.dual: np.ndarray | None = None   # (n_support, C), alpha_i * t_i
        self.gamma_value = 0.0
        self.n_classes = 0

    def _resolve_gamma(self, X) -> float:
        if self.gamma == "scale":
            var = X.var()
            return 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        return float(self.gamma)

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        self.gamma_value = self._resolve_gamma(X)
        dtype = np.float64 if X.shape[0] <= 8000 else np.float32
        K = _rbf_kernel(X, X, self.gamma_value, dtype=dtype) + 1.0  # +1 emulates a bias
        targets = _binary_targets(y, n_classes)
        dual = np.zeros((X.shape[0], n_classes))
        for c in range(n_classes):
            t = targets[:, c]
            alpha = _dual_cd_kernel(K, t, self.C * sample_weight, self.max_iter)
            dual[:, c] = alpha * t
        keep = np.abs(dual).sum(axis=1) > 0
        if not keep.any():
            keep[:] = True
        self.support_X = X[keep].copy()
        self.dual = dual[keep]
        return self

    def decision_scores(self, X) -> np.ndarray:
        K = _rbf_kernel(np.asarray(X, dtype=np.float64), self.support_X,
                        self.gamma_value) + 1.0
        return K @ self.dual

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_scores(X))
