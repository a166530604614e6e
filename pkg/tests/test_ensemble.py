import numpy as np
import pytest

from driftbench.ensemble import (
    EnsembleModel,
    ensemble_select,
    predict_ensemble,
    predict_proba_ensemble,
)


class FakeModel:
    """Stands in for a fitted pipeline: fixed probability table, row-indexed."""

    def __init__(self, proba, classes=(1, 2)):
        self.proba = np.asarray(proba, dtype=np.float64)
        self.classes = np.asarray(classes)
        self.algorithm = "fake"
        self.params = {}

    def predict_proba(self, X):
        return self.proba[: len(X)]

    def predict(self, X):
        return self.classes[np.argmax(self.predict_proba(X), axis=1)]


def dummy_X(n):
    return np.zeros((n, 1))


class TestSelection:
    def test_single_candidate(self):
        proba = np.array([[0.9, 0.1], [0.2, 0.8]])
        model = FakeModel(proba)
        ens = ensemble_select([(model, proba)], np.array([1, 2]))
        assert len(ens.members) == 1
        assert np.allclose(ens.weights, [1.0])

    def test_greedy_first_pick_is_best_alone(self):
        labels = np.array([1, 2, 1, 2])
        perfect = np.array([[0.9, 0.1], [0.1, 0.9], [0.8, 0.2], [0.2, 0.8]])
        wrong = 1.0 - perfect
        a = FakeModel(perfect)
        b = FakeModel(wrong)
        ens = ensemble_select([(b, wrong), (a, perfect)], labels, max_rounds=1)
        assert ens.members == (a,)

    def test_never_below_best_single(self):
        rng = np.random.default_rng(0)
        labels = rng.integers(1, 3, size=12)
        cands = []
        for _ in range(4):
            p = rng.dirichlet((1, 1), size=12)
            cands.append((FakeModel(p), p))
        best_single = max(
            _macro_f1_oracle(labels, c.predict(dummy_X(12))) for c, _ in cands
        )
        ens = ensemble_select(cands, labels, max_rounds=10)
        score = _macro_f1_oracle(labels, predict_ensemble(ens, dummy_X(12)))
        assert score >= best_single - 1e-12

    def test_weights_are_count_fractions(self):
        rng = np.random.default_rng(1)
        labels = rng.integers(1, 3, size=10)
        cands = []
        for _ in range(3):
            p = rng.dirichlet((1, 1), size=10)
            cands.append((FakeModel(p), p))
        ens = ensemble_select(cands, labels, max_rounds=7)
        assert np.isclose(ens.weights.sum(), 1.0)
        # weights mirror how often each member was picked in the kept prefix
        picked = sorted(set(ens.selection_sequence))
        fractions = [ens.selection_sequence.count(i) / len(ens.selection_sequence)
                     for i in picked]
        assert np.allclose(ens.weights, fractions)

    def test_empty_candidates(self):
        with pytest.raises(ValueError):
            ensemble_select([], np.array([1]))


class TestPrediction:
    def test_hand_averaged_two_members(self):
        a = FakeModel(np.array([[0.9, 0.1]]))
        b = FakeModel(np.array([[0.2, 0.8]]))
        ens = EnsembleModel(members=(a, b), weights=np.array([0.5, 0.5]),
                            classes=np.array([1, 2]))
        proba = predict_proba_ensemble(ens, dummy_X(1))
        assert np.allclose(proba, [[0.55, 0.45]])
        assert predict_ensemble(ens, dummy_X(1))[0] == 1

    def test_degenerate_weights_pick_first_member(self):
        a = FakeModel(np.array([[0.7, 0.3], [0.4, 0.6]]))
        b = FakeModel(np.array([[0.1, 0.9], [0.9, 0.1]]))
        ens = EnsembleModel(members=(a, b), weights=np.array([1.0, 0.0]),
                            classes=np.array([1, 2]))
        assert np.allclose(predict_proba_ensemble(ens, dummy_X(2)), a.proba)

    def test_uniform_members_stay_uniform(self):
        u = FakeModel(np.full((3, 2), 0.5))
        ens = EnsembleModel(members=(u, u), weights=np.array([0.5, 0.5]),
                            classes=np.array([1, 2]))
        assert np.allclose(predict_proba_ensemble(ens, dummy_X(3)), 0.5)

    def test_one_member_equals_member(self):
        rng = np.random.default_rng(2)
        proba = rng.dirichlet((1, 1, 1), size=6)
        m = FakeModel(proba, classes=(1, 2, 3))
        ens = EnsembleModel(members=(m,), weights=np.array([1.0]),
                            classes=np.array([1, 2, 3]))
        assert np.allclose(predict_proba_ensemble(ens, dummy_X(6)), proba)
        assert np.array_equal(predict_ensemble(ens, dummy_X(6)), m.predict(dummy_X(6)))

    def test_identical_members_any_weights(self):
        rng = np.random.default_rng(3)
        proba = rng.dirichlet((1, 1), size=5)
        m1, m2 = FakeModel(proba), FakeModel(proba)
        ens = EnsembleModel(members=(m1, m2), weights=np.array([0.3, 0.7]),
                            classes=np.array([1, 2]))
        assert np.allclose(predict_proba_ensemble(ens, dummy_X(5)), proba)

    def test_weighted_average_oracle(self):
        rng = np.random.default_rng(4)
        probas = [rng.dirichlet((1, 1, 1), size=8) for _ in range(3)]
        weights = np.array([0.5, 0.25, 0.25])
        members = tuple(FakeModel(p, classes=(1, 2, 3)) for p in probas)
        ens = EnsembleModel(members=members, weights=weights,
                            classes=np.array([1, 2, 3]))
        direct = sum(w * p for w, p in zip(weights, probas))
        assert np.max(np.abs(predict_proba_ensemble(ens, dummy_X(8)) - direct)) <= 1e-12

    def test_convexity(self):
        rng = np.random.default_rng(5)
        probas = [rng.dirichlet((1, 1), size=10) for _ in range(4)]
        members = tuple(FakeModel(p) for p in probas)
        w = rng.dirichlet(np.ones(4))
        ens = EnsembleModel(members=members, weights=w, classes=np.array([1, 2]))
        mixed = predict_proba_ensemble(ens, dummy_X(10))
        stack = np.stack(probas)
        assert (mixed >= stack.min(axis=0) - 1e-12).all()
        assert (mixed <= stack.max(axis=0) + 1e-12).all()

    def test_common_row_scaling_leaves_labels_unchanged(self):
        rng = np.random.default_rng(6)
        probas = [rng.dirichlet((1, 1, 1), size=12) for _ in range(2)]
        weights = np.array([0.6, 0.4])
        base = EnsembleModel(members=tuple(FakeModel(p, classes=(1, 2, 3)) for p in probas),
                             weights=weights, classes=np.array([1, 2, 3]))
        scaled = EnsembleModel(
            members=tuple(FakeModel(3.7 * p, classes=(1, 2, 3)) for p in probas),
            weights=weights, classes=np.array([1, 2, 3]))
        assert np.array_equal(predict_ensemble(base, dummy_X(12)),
                              predict_ensemble(scaled, dummy_X(12)))

    def test_weight_validation(self):
        m = FakeModel(np.array([[1.0, 0.0]]))
        with pytest.raises(ValueError):
            EnsembleModel(members=(m,), weights=np.array([0.5]),
                          classes=np.array([1, 2]))


def _macro_f1_oracle(y_true, y_pred):
    classes = sorted(set(np.asarray(y_true).tolist()))
    f1s = []
    for c in classes:
        tp = int(np.sum((y_true == c) & (y_pred == c)))
        fp = int(np.sum((y_true != c) & (y_pred == c)))
        fn = int(np.sum((y_true == c) & (y_pred != c)))
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    return float(np.mean(f1s))
