"""Linear classifiers: multinomial logistic regression and passive-aggressive.

The logistic loss/gradient lives in a standalone function so tests can check
it against finite differences.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

__all__ = ["LogisticRegression", "PassiveAggressive", "logreg_loss_grad", "softmax"]


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def logreg_loss_grad(theta: np.ndarray, X: np.ndarray, y: np.ndarray,
                     sample_weight: np.ndarray, n_classes: int, l2: float):
    """Weighted softmax cross-entropy with L2 on the non-bias coefficients.

    theta is the flattened (d+1, C) matrix, bias row last. Returns
    (loss, grad) with grad flattened the same way.
    """
    n, d = X.shape
    W = theta.reshape(d + 1, n_classes)
    coef, bias = W[:d], W[d]
    scores = X @ coef + bias
    P = softmax(scores)
    wsum = sample_weight.sum()
    ll = -np.log(np.clip(P[np.arange(n), y], 1e-300, None))
    loss = float(np.dot(sample_weight, ll) / wsum + 0.5 * l2 * np.sum(coef * coef))
    G = P.copy()
    G[np.arange(n), y] -= 1.0
    G = G * sample_weight[:, None] / wsum
    grad = np.empty_like(W)
    grad[:d] = X.T @ G + l2 * coef
    grad[d] = G.sum(axis=0)
    return loss, grad.ravel()


class LogisticRegression:
    """Multinomial regression fit by L-BFGS from a zero start."""

    def __init__(self, C=1.0, max_iter=200):
        self.C = C
        self.max_iter = max_iter
        self.coef: np.ndarray | None = None   # (d, C)
        self.bias: np.ndarray | None = None   # (C,)
        self.iterations_used = 0
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        n, d = X.shape
        l2 = 1.0 / (self.C * sample_weight.sum())
        theta0 = np.zeros((d + 1) * n_classes)
        if self.max_iter <= 0:
            W = theta0.reshape(d + 1, n_classes)
            self.iterations_used = 0
        else:
            res = minimize(
                logreg_loss_grad,
                theta0,
                args=(X, y, sample_weight, n_classes, l2),
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": self.max_iter, "ftol": 1e-10, "gtol": 1e-8},
            )
            W = res.x.reshape(d + 1, n_classes)
            self.iterations_used = int(res.nit)
        self.coef = W[:d]
        self.bias = W[d]
        return self

    def decision_scores(self, X) -> np.ndarray:
        return X @ self.coef + self.bias

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_scores(X))


class PassiveAggressive:
    """One-vs-rest PA-I: updates only on margin violations.

    Per-sample aggressiveness is capped at C times the sample weight; the
    visit order is reshuffled each epoch from the training seed.
    """

    def __init__(self, C=1.0, max_iter=50):
        self.C = C
        self.max_iter = max_iter
        self.coef: np.ndarray | None = None   # (d, C)
        self.bias: np.ndarray | None = None
        self.iterations_used = 0
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        n, d = X.shape
        coef = np.zeros((d, n_classes))
        bias = np.zeros(n_classes)
        sq_norms = np.einsum("ij,ij->i", X, X) + 1.0  # +1 for the bias input
        targets = np.where(y[:, None] == np.arange(n_classes), 1.0, -1.0)
        for epoch in range(self.max_iter):
            order = rng.permutation(n)
            changed = False
            for i in order:
                margins = targets[i] * (X[i] @ coef + bias)
                losses = np.maximum(0.0, 1.0 - margins)
                active = losses > 0
                if not active.any():
                    continue
                tau = np.minimum(self.C * sample_weight[i], losses / sq_norms[i])
                step = tau * targets[i] * active
                coef += np.outer(X[i], step)
                bias += step
                changed = True
            self.iterations_used = epoch + 1
            if not changed:
                break
        self.coef = coef
        self.bias = bias
        return self

    def decision_scores(self, X) -> np.ndarray:
        return X @ self.coef + self.bias

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_scores(X))
