import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import spearmanr

from driftbench import learners
from driftbench.data import (
    ParseError,
    SyntheticSpec,
    chronological_split,
    incremental_schedule,
    kfold_split,
    load_batches,
    meta_features,
    parse_record,
    synthesize_drift,
)

from conftest import make_dataset


class TestParseRecord:
    def test_basic_record(self):
        s = parse_record("3;50.0 1:1.5 2:-0.25", declared_dim=2)
        assert s.label == 3
        assert s.concentration == 50.0
        assert np.array_equal(s.features, [1.5, -0.25])

    def test_label_not_integer(self):
        with pytest.raises(ParseError):
            parse_record("x;1 1:2")

    def test_missing_separator(self):
        with pytest.raises(ParseError, match="';'"):
            parse_record("3 1:2.0")

    def test_non_monotonic_indices(self):
        with pytest.raises(ParseError, match="strictly increasing"):
            parse_record("1;1.0 2:1.0 1:2.0", line_no=7)

    def test_error_names_line_and_column(self):
        with pytest.raises(ParseError) as err:
            parse_record("1;1.0 1:abc", line_no=3)
        assert err.value.line == 3
        assert err.value.column > 1

    def test_missing_trailing_indices(self):
        with pytest.raises(ParseError, match="expected 3"):
            parse_record("1;1.0 1:0.5 2:0.5", declared_dim=3)

    def test_shorter_declared_dim_is_fine(self):
        s = parse_record("1;1.0 1:0.5 2:0.5", declared_dim=2)
        assert s.features.shape == (2,)

    def test_interior_gaps_are_zero_filled(self):
        s = parse_record("2;5.0 1:1.0 3:3.0")
        assert np.array_equal(s.features, [1.0, 0.0, 3.0])

    def test_non_numeric_value(self):
        with pytest.raises(ParseError, match="not numeric"):
            parse_record("1;oops 1:1.0")


class TestLoadBatches:
    def _write(self, path, lines):
        path.write_text("".join(line + "\n" for line in lines))
        return str(path)

    def test_two_tiny_files(self, tmp_path):
        p1 = self._write(tmp_path / "b1.dat", ["1;10 1:0.1 2:0.2", "2;20 1:0.3 2:0.4"])
        p2 = self._write(tmp_path / "b2.dat", ["1;10 1:0.5 2:0.6", "2;20 1:0.7 2:0.8"])
        ds = load_batches([p1, p2])
        assert ds.batch_count == 2
        assert ds.batch_sizes == (2, 2)
        assert ds.sample_count == 4
        assert ds.feature_dim == 2
        assert ds.class_count == 2

    def test_order_preserved(self, tmp_path):
        rows = [f"1;1 1:{i}.0" for i in range(5)]
        p1 = self._write(tmp_path / "b1.dat", rows[:3])
        p2 = self._write(tmp_path / "b2.dat", rows[3:])
        ds = load_batches([p1, p2])
        assert np.array_equal(ds.X[:, 0], np.arange(5.0))
        flat = [s for b in ds.batches for s in b]
        assert [s.features[0] for s in flat] == list(range(5))

    def test_inconsistent_dimensions(self, tmp_path):
        p1 = self._write(tmp_path / "b1.dat", ["1;1 1:0.1 2:0.2"])
        p2 = self._write(tmp_path / "b2.dat", ["1;1 1:0.1 2:0.2 3:0.3"])
        with pytest.raises(ParseError):
            load_batches([p1, p2])

    def test_empty_file(self, tmp_path):
        p1 = self._write(tmp_path / "b1.dat", ["1;1 1:0.1"])
        p2 = self._write(tmp_path / "b2.dat", [])
        with pytest.raises(ValueError, match="empty"):
            load_batches([p1, p2])


class TestChronologicalSplit:
    def test_toy_k1(self):
        ds = make_dataset(np.zeros((4, 1)), [1, 2, 1, 2], (2, 2))
        plan = chronological_split(ds, 1)
        assert np.array_equal(plan.train_indices, [0, 1])
        assert np.array_equal(plan.test_indices, [2, 3])

    def test_k_equal_K_is_error(self):
        ds = make_dataset(np.zeros((4, 1)), [1, 2, 1, 2], (2, 2))
        with pytest.raises(ValueError):
            chronological_split(ds, 2)

    def test_batch_ordering_invariant(self):
        ds = make_dataset(np.zeros((10, 1)), [1] * 10, (2, 3, 2, 3), class_count=1)
        for k in (1, 2, 3):
            plan = chronological_split(ds, k)
            assert ds.batch_ids[plan.train_indices].max() < ds.batch_ids[plan.test_indices].min()
            assert np.intersect1d(plan.train_indices, plan.test_indices).size == 0


class TestKFold:
    def test_even_folds(self):
        ds = make_dataset(np.zeros((10, 1)), [1] * 10, (10,), class_count=1)
        plans = kfold_split(ds, 5, seed=0)
        assert len(plans) == 5
        assert all(p.test_indices.size == 2 for p in plans)

    def test_deterministic_under_seed(self):
        ds = make_dataset(np.zeros((23, 1)), [1] * 23, (23,), class_count=1)
        a = kfold_split(ds, 4, seed=9)
        b = kfold_split(ds, 4, seed=9)
        for pa, pb in zip(a, b):
            assert np.array_equal(pa.test_indices, pb.test_indices)

    def test_10277_fold_sizes(self):
        # integer-division oracle: 10277 = 10 * 1027 + 7
        n = 10_277
        ds = make_dataset(np.zeros((n, 1)), [1] * n, (n,), class_count=1)
        plans = kfold_split(ds, 10, seed=1)
        sizes = sorted(p.test_indices.size for p in plans)
        assert set(sizes) == {1027, 1028}
        assert sizes.count(1028) == 7

    def test_partition(self):
        ds = make_dataset(np.zeros((29, 1)), [1] * 29, (29,), class_count=1)
        plans = kfold_split(ds, 4, seed=3)
        combined = np.sort(np.concatenate([p.test_indices for p in plans]))
        assert np.array_equal(combined, np.arange(29))
        for p in plans:
            assert np.intersect1d(p.train_indices, p.test_indices).size == 0

    def test_out_of_range(self):
        ds = make_dataset(np.zeros((5, 1)), [1] * 5, (5,), class_count=1)
        with pytest.raises(ValueError):
            kfold_split(ds, 1, seed=0)
        with pytest.raises(ValueError):
            kfold_split(ds, 6, seed=0)


class TestIncremental:
    def test_k10_schedule(self):
        ds = make_dataset(np.zeros((20, 1)), [1] * 20, (2,) * 10, class_count=1)
        plans = incremental_schedule(ds)
        assert len(plans) == 9
        last = plans[-1]
        assert ds.batch_ids[last.train_indices].max() == 9
        assert np.array_equal(np.unique(ds.batch_ids[last.test_indices]), [10])

    def test_k2_matches_chronological(self):
        ds = make_dataset(np.zeros((4, 1)), [1, 1, 1, 1], (2, 2), class_count=1)
        plans = incremental_schedule(ds)
        chrono = chronological_split(ds, 1)
        assert len(plans) == 1
        assert np.array_equal(plans[0].train_indices, chrono.train_indices)
        assert np.array_equal(plans[0].test_indices, chrono.test_indices)

    def test_disjoint_all_steps(self):
        ds = make_dataset(np.zeros((12, 1)), [1] * 12, (3, 3, 3, 3), class_count=1)
        for p in incremental_schedule(ds):
            assert np.intersect1d(p.train_indices, p.test_indices).size == 0


class TestSynthesizeDrift:
    def test_zero_drift_batches_identical(self):
        spec = SyntheticSpec(class_count=2, feature_dim=3, batch_count=4,
                             samples_per_batch=20, drift_per_batch=(0, 0, 0, 0),
                             noise_std=0.5)
        ds = synthesize_drift(spec, seed=3)
        first = ds.X[ds.batch_indices(1)]
        for b in range(2, 5):
            assert np.array_equal(ds.X[ds.batch_indices(b)], first)

    def test_noise_free_centers(self):
        spec = SyntheticSpec(class_count=2, feature_dim=1, batch_count=1,
                             samples_per_batch=10, drift_per_batch=(0.0,),
                             noise_std=0.0)
        ds = synthesize_drift(spec, seed=0)
        assert np.array_equal(np.unique(ds.X[ds.y == 1]), [1.0])
        assert np.array_equal(np.unique(ds.X[ds.y == 2]), [-1.0])

    def test_bitwise_reproducible(self):
        spec = SyntheticSpec(class_count=3, feature_dim=4, batch_count=3,
                             samples_per_batch=30, drift_per_batch=(0, 0.5, 1.0))
        a = synthesize_drift(spec, seed=17)
        b = synthesize_drift(spec, seed=17)
        assert np.array_equal(a.X, b.X)
        assert np.array_equal(a.y, b.y)

    def test_monotone_drift_degrades_batch1_model(self):
        # oracle: the module's own kNN, trained on batch 1 only
        spec = SyntheticSpec(class_count=3, feature_dim=4, batch_count=8,
                             samples_per_batch=60,
                             drift_per_batch=tuple(0.6 * b for b in range(8)),
                             noise_std=0.5, class_separation=1.5)
        ds = synthesize_drift(spec, seed=5)
        idx1 = ds.batch_indices(1)
        model = learners.train("knn", {"k": 3}, ds.X[idx1], ds.y[idx1], seed=0)
        accs = []
        for b in range(1, ds.batch_count + 1):
            idx = ds.batch_indices(b)
            accs.append((learners.predict(model, ds.X[idx]) == ds.y[idx]).mean())
        rho, _ = spearmanr(np.arange(1, ds.batch_count + 1), accs)
        assert rho <= 0

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            SyntheticSpec(class_count=2, feature_dim=2, batch_count=3,
                          samples_per_batch=10, drift_per_batch=(0, 0))

    def test_shells_layout(self):
        spec = SyntheticSpec(class_count=2, feature_dim=2, batch_count=1,
                             samples_per_batch=100, drift_per_batch=(0.0,),
                             noise_std=0.05, class_separation=2.0, layout="shells")
        ds = synthesize_drift(spec, seed=0)
        radii_inner = np.linalg.norm(ds.X[ds.y == 1], axis=1)
        radii_outer = np.linalg.norm(ds.X[ds.y == 2], axis=1)
        assert radii_inner.mean() < radii_outer.mean()


class TestMetaFeatures:
    def test_balanced(self):
        ds = make_dataset(np.arange(8, dtype=float).reshape(4, 2), [1, 1, 2, 2], (4,))
        mf = meta_features(ds, np.arange(4))
        assert mf.class_imbalance_ratio == 1.0
        assert mf.sample_count == 4
        assert mf.feature_dim == 2

    def test_imbalanced(self):
        ds = make_dataset(np.zeros((10, 1)), [1] * 9 + [2], (10,))
        mf = meta_features(ds, np.arange(10))
        assert mf.class_imbalance_ratio == 9.0

    def test_empty_indices(self):
        ds = make_dataset(np.zeros((4, 1)), [1, 1, 2, 2], (4,))
        with pytest.raises(ValueError):
            meta_features(ds, np.array([], dtype=int))

    @given(st.randoms(use_true_random=False))
    @settings(max_examples=25, deadline=None)
    def test_permutation_invariance(self, rnd):
        rng = np.random.default_rng(rnd.randrange(2**32))
        n = rng.integers(3, 30)
        X = rng.normal(size=(n, 3))
        y = rng.integers(1, 4, size=n)
        ds = make_dataset(X, y, (n,), class_count=3)
        idx = rng.permutation(n)
        a = meta_features(ds, np.arange(n))
        b = meta_features(ds, idx)
        assert np.allclose(a.as_vector(), b.as_vector())
        assert np.isfinite(a.as_vector()).all()
