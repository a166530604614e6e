"""Array-based CART trees with weighted impurity and deterministic ties.

Ties at equal split quality resolve to the lowest feature index, then the
lowest threshold, so identical inputs always grow identical trees. Sample
counts (min_samples_split / min_samples_leaf) are interpreted on total
sample weight; with unit weights this is the usual count semantics, and it
makes duplicating a sample exactly equivalent to doubling its weight.
"""

from __future__ import annotations

import numpy as np

__all__ = ["ClassificationTree", "RegressionTree"]

_NO_SPLIT = (-np.inf, -1, 0.0)


def _impurity(class_w, total_w, criterion):
    p = class_w / total_w[:, None]
    if criterion == "gini":
        return 1.0 - np.sum(p * p, axis=1)
    logp = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -np.sum(p * logp, axis=1)


def _class_split(values, y, w, n_classes, min_leaf_w, criterion):
    """Best (gain, position, threshold) for one feature column.

    Gain is parent weighted impurity minus the split's weighted child
    impurity; -inf when no valid split exists. The first minimum wins, so
    equal-quality thresholds resolve to the lowest one.
    """
    order = np.argsort(values, kind="stable")
    v = values[order]
    labels = y[order]
    wts = w[order]

    boundaries = np.flatnonzero(v[:-1] != v[1:])
    if boundaries.size == 0:
        return _NO_SPLIT

    onehot = np.zeros((v.size, n_classes))
    onehot[np.arange(v.size), labels] = wts
    cum_class = np.cumsum(onehot, axis=0)
    cum_w = np.cumsum(wts)

    total_class = cum_class[-1]
    total_w = cum_w[-1]

    left_w = cum_w[boundaries]
    right_w = total_w - left_w
    valid = (left_w >= min_leaf_w) & (right_w >= min_leaf_w)
    if not valid.any():
        return _NO_SPLIT
    boundaries = boundaries[valid]
    left_w = left_w[valid]
    right_w = right_w[valid]
    left_class = cum_class[boundaries]
    right_class = total_class - left_class

    gl = _impurity(left_class, left_w, criterion)
    gr = _impurity(right_class, right_w, criterion)
    score = (left_w * gl + right_w * gr) / total_w
    best = int(np.argmin(score))
    pos = boundaries[best]
    threshold = 0.5 * (v[pos] + v[pos + 1])
    parent = _impurity(total_class[None, :], np.array([total_w]), criterion)[0]
    return parent - score[best], pos, threshold


def _regression_split(values, target, w, min_leaf_w):
    order = np.argsort(values, kind="stable")
    v = values[order]
    t = target[order]
    wts = w[order]
    boundaries = np.flatnonzero(v[:-1] != v[1:])
    if boundaries.size == 0:
        return _NO_SPLIT
    cw = np.cumsum(wts)
    cwt = np.cumsum(wts * t)
    cwt2 = np.cumsum(wts * t * t)
    total_w, total_wt, total_wt2 = cw[-1], cwt[-1], cwt2[-1]

    lw = cw[boundaries]
    rw = total_w - lw
    valid = (lw >= min_leaf_w) & (rw >= min_leaf_w)
    if not valid.any():
        return _NO_SPLIT
    boundaries = boundaries[valid]
    lw, rw = lw[valid], rw[valid]
    lwt = cwt[boundaries]
    lwt2 = cwt2[boundaries]
    sse = (lwt2 - lwt**2 / lw) + ((total_wt2 - lwt2) - (total_wt - lwt) ** 2 / rw)
    best = int(np.argmin(sse))
    pos = boundaries[best]
    threshold = 0.5 * (v[pos] + v[pos + 1])
    parent_sse = total_wt2 - total_wt**2 / total_w
    return parent_sse - sse[best], pos, threshold


class _TreeBase:
    def __init__(self, max_depth=None, min_samples_split=2, min_samples_leaf=1):
        self.max_depth = np.inf if max_depth is None else max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.feature: np.ndarray | None = None
        self.threshold: np.ndarray | None = None
        self.left: np.ndarray | None = None
        self.right: np.ndarray | None = None
        self.value: np.ndarray | None = None

    def _finalize(self, nodes):
        self.feature = np.array([n[0] for n in nodes], dtype=np.int64)
        self.threshold = np.array([n[1] for n in nodes], dtype=np.float64)
        self.left = np.array([n[2] for n in nodes], dtype=np.int64)
        self.right = np.array([n[3] for n in nodes], dtype=np.int64)
        self.value = np.vstack([n[4] for n in nodes])

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index for every row (level-synchronous descent)."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            nd = node[active]
            go_left = X[active, self.feature[nd]] <= self.threshold[nd]
            node[active[go_left]] = self.left[nd[go_left]]
            node[active[~go_left]] = self.right[nd[~go_left]]
            active = active[self.feature[node[active]] >= 0]
        return node

    @property
    def node_count(self) -> int:
        return self.feature.size


class ClassificationTree(_TreeBase):
    def __init__(self, criterion="gini", max_depth=None, min_samples_split=2,
                 min_samples_leaf=1):
        super().__init__(max_depth, min_samples_split, min_samples_leaf)
        if criterion not in ("gini", "entropy"):
            raise ValueError(f"unknown criterion {criterion!r}")
        self.criterion = criterion
        self.n_classes = 0

    def fit(self, X, y, sample_weight=None, n_classes=None):
        """y holds class indices 0..C-1."""
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        w = np.ones(y.size) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
        self.n_classes = int(y.max()) + 1 if n_classes is None else n_classes
        nodes: list[tuple] = []
        # stack of (index array, depth, slot); slot -1 means root
        stack = [(np.arange(X.shape[0]), 0, -1, "")]
        while stack:
            idx, depth, slot, side = stack.pop()
            dist = np.zeros(self.n_classes)
            np.add.at(dist, y[idx], w[idx])
            node_w = dist.sum()
            leaf_value = dist / node_w

            split = None
            if depth < self.max_depth and node_w >= self.min_samples_split and np.count_nonzero(dist) > 1:
                split = self._best_split(X, y, w, idx)
            node_id = len(nodes)
            if slot >= 0:
                if side == "L":
                    nodes[slot][2] = node_id
                else:
                    nodes[slot][3] = node_id
            if split is None:
                nodes.append([-1, 0.0, -1, -1, leaf_value])
                continue
            feat, thr = split
            nodes.append([feat, thr, -1, -1, leaf_value])
            mask = X[idx, feat] <= thr
            # push right first so the left child is materialized first
            stack.append((idx[~mask], depth + 1, node_id, "R"))
            stack.append((idx[mask], depth + 1, node_id, "L"))
        self._finalize(nodes)
        return self

    def _best_split(self, X, y, w, idx):
        best_gain = 0.0
        best = None
        yn = y[idx]
        wn = w[idx]
        for feat in range(X.shape[1]):
            gain, _, thr = _class_split(X[idx, feat], yn, wn, self.n_classes,
                                        self.min_samples_leaf, self.criterion)
            if gain > best_gain + 1e-12:
                best_gain = gain
                best = (feat, thr)
        return best

    def predict_proba(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def predict_votes(self, X) -> np.ndarray:
        """Hard class vote per row (first maximum on ties)."""
        return np.argmax(self.predict_proba(X), axis=1)


class RegressionTree(_TreeBase):
    def fit(self, X, target, sample_weight=None):
        X = np.asarray(X, dtype=np.float64)
        t = np.asarray(target, dtype=np.float64)
        w = np.ones(t.size) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
        nodes: list[list] = []
        stack = [(np.arange(X.shape[0]), 0, -1, "")]
        while stack:
            idx, depth, slot, side = stack.pop()
            node_w = w[idx].sum()
            mean = float(np.dot(w[idx], t[idx]) / node_w)

            split = None
            if depth < self.max_depth and node_w >= self.min_samples_split:
                split = self._best_split(X, t, w, idx)
            node_id = len(nodes)
            if slot >= 0:
                if side == "L":
                    nodes[slot][2] = node_id
                else:
                    nodes[slot][3] = node_id
            if split is None:
                nodes.append([-1, 0.0, -1, -1, np.array([mean])])
                continue
            feat, thr = split
            nodes.append([feat, thr, -1, -1, np.array([mean])])
            mask = X[idx, feat] <= thr
            stack.append((idx[~mask], depth + 1, node_id, "R"))
            stack.append((idx[mask], depth + 1, node_id, "L"))
        self._finalize(nodes)
        return self

    def _best_split(self, X, t, w, idx):
        best_gain = 1e-12
        best = None
        tn = t[idx]
        wn = w[idx]
        for feat in range(X.shape[1]):
            gain, _, thr = _regression_split(X[idx, feat], tn, wn, self.min_samples_leaf)
            if gain > best_gain + 1e-12:
                best_gain = gain
                best = (feat, thr)
        return best

    def predict(self, X) -> np.ndarray:
        return self.value[self.apply(X), 0]
