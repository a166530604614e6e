"""Small feed-forward classifier trained with Adam.

Parameters are packed into one flat vector so the loss/gradient pair can be
checked against finite differences.
"""

from __future__ import annotations

import numpy as np

from .linear import softmax

__all__ = ["MLP", "mlp_loss_grad", "init_params", "unpack_params"]


def _activate(Z, kind):
    return np.tanh(Z) if kind == "tanh" else np.maximum(Z, 0.0)


def _activate_grad(A, Z, kind):
    return 1.0 - A * A if kind == "tanh" else (Z > 0).astype(np.float64)


def layer_dims(n_in: int, hidden_layers: int, width: int, n_out: int) -> list[tuple[int, int]]:
    dims = []
    prev = n_in
    for _ in range(hidden_layers):
        dims.append((prev, width))
        prev = width
    dims.append((prev, n_out))
    return dims


def init_params(dims, rng) -> np.ndarray:
    parts = []
    for fan_in, fan_out in dims:
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        parts.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)).ravel())
        parts.append(np.zeros(fan_out))
    return np.concatenate(parts)


def unpack_params(theta, dims):
    layers = []
    off = 0
    for fan_in, fan_out in dims:
        W = theta[off: off + fan_in * fan_out].reshape(fan_in, fan_out)
        off += fan_in * fan_out
        b = theta[off: off + fan_out]
        off += fan_out
        layers.append((W, b))
    return layers


def mlp_loss_grad(theta, dims, X, y, sample_weight, l2, activation):
    """Weighted softmax cross-entropy + L2 on weight matrices; returns
    (loss, flat gradient)."""
    layers = unpack_params(theta, dims)
    n = X.shape[0]
    wsum = sample_weight.sum()

    acts = [X]
    zs = []
    A = X
    for i, (W, b) in enumerate(layers):
        Z = A @ W + b
        zs.append(Z)
        A = _activate(Z, activation) if i < len(layers) - 1 else Z
        acts.append(A)
    P = softmax(acts[-1])
    ll = -np.log(np.clip(P[np.arange(n), y], 1e-300, None))
    reg = sum(np.sum(W * W) for W, _ in layers)
    loss = float(np.dot(sample_weight, ll) / wsum + 0.5 * l2 * reg)

    delta = P.copy()
    delta[np.arange(n), y] -= 1.0
    delta *= sample_weight[:, None] / wsum
    grads = []
    for i in range(len(layers) - 1, -1, -1):
        W, _ = layers[i]
        gW = acts[i].T @ delta + l2 * W
        gb = delta.sum(axis=0)
        grads.append((gW, gb))
        if i > 0:
            delta = (delta @ W.T) * _activate_grad(acts[i], zs[i - 1], activation)
    grads.reverse()
    flat = np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in grads])
    return loss, flat


class MLP:
    def __init__(self, hidden_layers=1, width=64, activation="tanh",
                 learning_rate=1e-3, early_stopping=True, max_epochs=200,
                 batch_size=32, patience=10, validation_fraction=0.1, l2=1e-4):
        if activation not in ("tanh", "relu"):
            raise ValueError(f"unknown activation {activation!r}")
        self.hidden_layers = hidden_layers
        self.width = width
        self.activation = activation
        self.learning_rate = learning_rate
        self.early_stopping = early_stopping
        self.max_epochs = max_epochs
        self.batch_size = batch_size
        self.patience = patience
        self.validation_fraction = validation_fraction
        self.l2 = l2
        self.dims: list[tuple[int, int]] | None = None
        self.theta: np.ndarray | None = None
        self.iterations_used = 0
        self.early_stopped = False
        self.n_classes = 0

    def fit(self, X, y, sample_weight, n_classes, rng):
        self.n_classes = n_classes
        n, d = X.shape
        self.dims = layer_dims(d, self.hidden_layers, self.width, n_classes)
        theta = init_params(self.dims, rng)

        train_idx = np.arange(n)
        val_idx = np.array([], dtype=np.int64)
        if self.early_stopping and n >= 10:
            perm = rng.permutation(n)
            n_val = max(1, int(round(self.validation_fraction * n)))
            val_idx, train_idx = perm[:n_val], perm[n_val:]

        m = np.zeros_like(theta)
        v = np.zeros_like(theta)
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        t = 0
        best_val = np.inf
        best_theta = theta.copy()
        stall = 0
        self.early_stopped = False

        for epoch in range(self.max_epochs):
            order = rng.permutation(train_idx.size)
            for start in range(0, train_idx.size, self.batch_size):
                batch = train_idx[order[start: start + self.batch_size]]
                _, grad = mlp_loss_grad(theta, self.dims, X[batch], y[batch],
                                        sample_weight[batch], self.l2, self.activation)
                t += 1
                m = beta1 * m + (1 - beta1) * grad
                v = beta2 * v + (1 - beta2) * grad * grad
                mhat = m / (1 - beta1**t)
                vhat = v / (1 - beta2**t)
                theta = theta - self.learning_rate * mhat / (np.sqrt(vhat) + eps)
            self.iterations_used = epoch + 1
            if val_idx.size:
                val_loss, _ = mlp_loss_grad(theta, self.dims, X[val_idx], y[val_idx],
                                            sample_weight[val_idx], 0.0, self.activation)
                if val_loss < best_val - 1e-9:
                    best_val = val_loss
                    best_theta = theta.copy()
                    stall = 0
                else:
                    stall += 1
                    if stall >= self.patience:
                        self.early_stopped = True
                        break
        # with a validation slice, keep the best checkpoint seen
        self.theta = best_theta if val_idx.size else theta
        return self

    def decision_scores(self, X) -> np.ndarray:
        layers = unpack_params(self.theta, self.dims)
        A = np.asarray(X, dtype=np.float64)
        for i, (W, b) in enumerate(layers):
            Z = A @ W + b
            A = _activate(Z, self.activation) if i < len(layers) - 1 else Z
        return A

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_scores(X))
