import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftbench import learners
from driftbench.metrics import (
    aggregate_runs,
    decision_grid,
    evaluate,
    macro_f1,
    roc_auc_ovr,
)


def brute_force_report(y_true, y_pred, classes):
    """Independent per-pair counting oracle for precision/recall/F1."""
    stats = {}
    for c in classes:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == c and p != c)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        stats[c] = (prec, rec, f1)
    acc = sum(1 for t, p in zip(y_true, y_pred) if t == p) / len(y_true)
    return stats, acc


def mann_whitney_auc(y_bin, scores):
    """Pairwise rank statistic with ties counted 0.5."""
    pos = [s for yb, s in zip(y_bin, scores) if yb == 1]
    neg = [s for yb, s in zip(y_bin, scores) if yb == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else (0.5 if p == n else 0.0)
    return total / (len(pos) * len(neg))


class TestEvaluate:
    def test_identity(self):
        r = evaluate([1, 2, 3], [1, 2, 3])
        assert r.accuracy == 1.0
        assert np.allclose(r.f1, 1.0)
        assert r.macro_f1 == 1.0

    def test_hand_counted_example(self):
        r = evaluate([1, 1, 2], [1, 2, 2])
        assert np.allclose(r.precision, [1.0, 0.5])
        assert np.allclose(r.recall, [0.5, 1.0])
        assert np.allclose(r.f1, [2 / 3, 2 / 3])
        assert np.isclose(r.macro_f1, 2 / 3)
        assert np.isclose(r.accuracy, 2 / 3)

    def test_constant_predictions_on_balanced_two_class(self):
        r = evaluate([1, 1, 2, 2], [1, 1, 1, 1])
        assert np.isclose(r.macro_f1, 1 / 3)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            evaluate([1, 2], [1])

    def test_confusion_sums(self):
        r = evaluate([1, 1, 2, 3], [1, 2, 2, 3])
        assert r.confusion.sum() == 4
        assert np.array_equal(r.confusion.sum(axis=1), r.support)

    def test_report_rows_shape(self):
        rows = evaluate([1, 2, 2], [1, 2, 1]).to_rows()
        assert [row["class"] for row in rows] == ["1", "2", "macro", "weighted", "accuracy"]

    @given(st.integers(1, 50), st.integers(2, 5), st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_matches_brute_force(self, n, n_classes, seed):
        rng = np.random.default_rng(seed)
        classes = list(range(1, n_classes + 1))
        y_true = rng.integers(1, n_classes + 1, size=n)
        y_pred = rng.integers(1, n_classes + 1, size=n)
        r = evaluate(y_true, y_pred, classes=classes)
        oracle, acc = brute_force_report(y_true, y_pred, classes)
        for i, c in enumerate(classes):
            assert abs(r.precision[i] - oracle[c][0]) < 1e-12
            assert abs(r.recall[i] - oracle[c][1]) < 1e-12
            assert abs(r.f1[i] - oracle[c][2]) < 1e-12
        assert abs(r.accuracy - acc) < 1e-12

    @given(st.integers(2, 40), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_joint_permutation_invariance(self, n, seed):
        rng = np.random.default_rng(seed)
        y_true = rng.integers(1, 4, size=n)
        y_pred = rng.integers(1, 4, size=n)
        perm = rng.permutation(n)
        a = evaluate(y_true, y_pred, classes=[1, 2, 3])
        b = evaluate(y_true[perm], y_pred[perm], classes=[1, 2, 3])
        assert np.array_equal(a.confusion, b.confusion)
        assert a.macro_f1 == b.macro_f1
        assert a.weighted_f1 == b.weighted_f1

    @given(st.integers(2, 40), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_weighted_f1_bounded_by_per_class(self, n, seed):
        rng = np.random.default_rng(seed)
        y_true = rng.integers(1, 4, size=n)
        y_pred = rng.integers(1, 4, size=n)
        r = evaluate(y_true, y_pred, classes=[1, 2, 3])
        assert r.f1.min() - 1e-12 <= r.weighted_f1 <= r.f1.max() + 1e-12


class TestRocAuc:
    def _proba(self, scores):
        scores = np.asarray(scores, dtype=np.float64)
        return np.column_stack([1 - scores, scores])

    def test_textbook_three_quarters(self):
        res = roc_auc_ovr([1, 1, 2, 2], self._proba([0.1, 0.4, 0.35, 0.8]), classes=[1, 2])
        assert np.isclose(res["per_class"][2]["auc"], 0.75)

    def test_perfect_separation(self):
        res = roc_auc_ovr([1, 1, 2, 2], self._proba([0.1, 0.2, 0.8, 0.9]), classes=[1, 2])
        assert res["per_class"][2]["auc"] == 1.0
        assert res["per_class"][1]["auc"] == 1.0

    def test_constant_scores(self):
        res = roc_auc_ovr([1, 2, 1, 2], self._proba([0.5, 0.5, 0.5, 0.5]), classes=[1, 2])
        assert np.isclose(res["per_class"][1]["auc"], 0.5)

    def test_absent_class_excluded(self):
        proba = np.full((4, 3), 1 / 3)
        res = roc_auc_ovr([1, 1, 2, 2], proba, classes=[1, 2, 3])
        assert 3 not in res["per_class"]
        assert set(res["per_class"]) == {1, 2}

    def test_row_sum_validation(self):
        with pytest.raises(ValueError):
            roc_auc_ovr([1, 2], np.array([[0.9, 0.9], [0.1, 0.1]]), classes=[1, 2])

    @given(st.integers(2, 30), st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_trapezoid_equals_rank_statistic(self, n, seed):
        rng = np.random.default_rng(seed)
        y = rng.integers(1, 3, size=n)
        if len(set(y.tolist())) < 2:
            y[0] = 1
            y[1] = 2
        # coarse score grid forces ties
        s = rng.integers(0, 5, size=n) / 4.0
        res = roc_auc_ovr(y, self._proba(s), classes=[1, 2])
        oracle = mann_whitney_auc((y == 2).astype(int), s)
        assert abs(res["per_class"][2]["auc"] - oracle) <= 1e-12


class TestAggregateRuns:
    def test_single(self):
        agg = aggregate_runs([0.5])
        assert agg.mean == 0.5
        assert agg.std == 0.0

    def test_two_point(self):
        agg = aggregate_runs([0.0, 1.0])
        assert agg.mean == 0.5
        assert agg.std == 0.5

    def test_three_point_against_direct_formula(self):
        scores = [0.2, 0.4, 0.6]
        agg = aggregate_runs(scores)
        mean = sum(scores) / 3
        expected_std = (sum((s - mean) ** 2 for s in scores) / 3) ** 0.5
        assert np.isclose(agg.mean, 0.4)
        assert np.isclose(agg.std, expected_std)
        assert np.isclose(agg.std, 0.16329931618554522)

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate_runs([])


class TestDecisionGrid:
    def test_constant_predictor(self):
        X = np.zeros((3, 2))
        m = learners.train("knn", {"k": 1}, X, np.array([7, 7, 7]), seed=0)
        xs, ys, labels = decision_grid(m, 0, 1, (-1, 1, -1, 1), 5)
        assert np.all(labels == 7)

    def test_one_nn_bisector(self):
        X = np.array([[-1.0, 0.0], [1.0, 0.0]])
        m = learners.train("knn", {"k": 1}, X, np.array([1, 2]), seed=0)
        xs, ys, labels = decision_grid(m, 0, 1, (-2, 2, -2, 2), 9)
        # perpendicular bisector is the y-axis
        for j, x in enumerate(xs):
            expected = 1 if x < 0 else 2 if x > 0 else labels[0, j]
            assert np.all(labels[:, j] == expected)

    def test_matches_pointwise_predict(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(30, 3))
        y = rng.integers(1, 3, size=30)
        m = learners.train("decision_tree", {}, X, y, seed=0)
        xs, ys, labels = decision_grid(m, 0, 2, (-2, 2, -2, 2), 7)
        base = np.tile(m.feature_means, (7 * 7, 1))
        xx, yy = np.meshgrid(xs, ys)
        base[:, 0] = xx.ravel()
        base[:, 2] = yy.ravel()
        assert np.array_equal(labels.ravel(), learners.predict(m, base))

    def test_bad_resolution_and_index(self):
        X = np.zeros((3, 2))
        m = learners.train("knn", {"k": 1}, X, np.array([1, 1, 2]), seed=0)
        with pytest.raises(ValueError):
            decision_grid(m, 0, 1, (-1, 1, -1, 1), 1)
        with pytest.raises(ValueError):
            decision_grid(m, 0, 5, (-1, 1, -1, 1), 4)


def test_macro_f1_helper():
    assert np.isclose(macro_f1([1, 1, 2, 2], [1, 1, 1, 1]), 1 / 3)
