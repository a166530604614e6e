import numpy as np
import pytest

from driftbench.preprocess import (
    FeatureStep,
    PreprocessConfig,
    balance_weights,
    fit_preprocessor,
)


def cfg(**kw):
    return PreprocessConfig(**kw)


class TestScaling:
    def test_standardize_two_point_column(self):
        X = np.array([[1.0], [3.0]])
        p = fit_preprocessor(cfg(scaling="standardize"), X)
        assert p.shift[0] == 2.0
        assert p.scale[0] == 1.0  # population std
        assert np.allclose(p.apply(X)[:, 0], [-1.0, 1.0])

    def test_standardized_train_columns_are_centered(self):
        rng = np.random.default_rng(0)
        X = rng.normal(3.0, 2.0, size=(40, 5))
        p = fit_preprocessor(cfg(scaling="standardize"), X)
        out = p.apply(X)
        assert np.abs(out.mean(axis=0)).max() < 1e-9

    def test_zero_variance_column_maps_to_zero(self):
        X = np.array([[5.0, 1.0], [5.0, 2.0]])
        p = fit_preprocessor(cfg(scaling="standardize"), X)
        assert np.allclose(p.apply(X)[:, 0], 0.0)

    def test_minmax(self):
        X = np.array([[0.0], [5.0], [10.0]])
        p = fit_preprocessor(cfg(scaling="minmax"), X)
        assert np.allclose(p.apply(X)[:, 0], [0.0, 0.5, 1.0])

    def test_identity_pipeline(self):
        X = np.arange(12, dtype=float).reshape(4, 3)
        p = fit_preprocessor(cfg(), X)
        assert np.array_equal(p.apply(X), X)


class TestPolynomial:
    def test_degree_two_layout(self):
        X = np.array([[2.0, 3.0]])
        p = fit_preprocessor(
            cfg(feature_step=FeatureStep(kind="polynomial")), X)
        out = p.apply(X)
        assert out.shape == (1, 5)
        assert np.allclose(out[0], [2.0, 3.0, 4.0, 6.0, 9.0])  # a, b, a^2, ab, b^2

    def test_interaction_only(self):
        X = np.array([[1.0, 2.0, 3.0]])
        p = fit_preprocessor(
            cfg(feature_step=FeatureStep(kind="polynomial", interaction_only=True)), X)
        assert np.allclose(p.apply(X)[0], [1, 2, 3, 2, 3, 6])

    def test_width_cap(self):
        X = np.zeros((2, 100))
        with pytest.raises(ValueError, match="limit"):
            fit_preprocessor(cfg(feature_step=FeatureStep(kind="polynomial")), X)


class TestAgglomeration:
    def test_single_cluster_is_row_mean(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(10, 4))
        p = fit_preprocessor(
            cfg(feature_step=FeatureStep(kind="agglomeration", cluster_count=1)), X)
        assert np.allclose(p.apply(X)[:, 0], X.mean(axis=1))

    def test_partition_and_output_dim(self):
        rng = np.random.default_rng(2)
        base = rng.normal(size=(30, 2))
        # two correlated groups of features
        X = np.hstack([base[:, [0]], base[:, [0]] * 2 + 0.01 * rng.normal(size=(30, 1)),
                       base[:, [1]], base[:, [1]] * 3 + 0.01 * rng.normal(size=(30, 1))])
        p = fit_preprocessor(
            cfg(feature_step=FeatureStep(kind="agglomeration", cluster_count=2)), X)
        assert p.output_dim == 2
        assert p.clusters.shape == (4,)
        assert np.unique(p.clusters).size == 2
        # correlated features land in one cluster
        assert p.clusters[0] == p.clusters[1]
        assert p.clusters[2] == p.clusters[3]

    def test_too_many_clusters(self):
        X = np.zeros((5, 3))
        with pytest.raises(ValueError, match="clusters"):
            fit_preprocessor(
                cfg(feature_step=FeatureStep(kind="agglomeration", cluster_count=4)), X)


class TestPCA:
    def test_full_dim_reconstruction_against_eigh_oracle(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(5, 3))
        p = fit_preprocessor(cfg(feature_step=FeatureStep(kind="pca", pca_dim=3)), X)
        Z = p.apply(X)
        centered = X - X.mean(axis=0)
        recon = Z @ p.pca_axes
        rel = np.linalg.norm(recon - centered) / np.linalg.norm(centered)
        assert rel <= 1e-6
        # oracle: the projection variances are the covariance eigenvalues
        cov = centered.T @ centered / X.shape[0]
        eigvals = np.sort(np.linalg.eigvalsh(cov))[::-1]
        assert np.allclose(np.sort(Z.var(axis=0))[::-1], eigvals, atol=1e-9)

    def test_components_uncorrelated(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(50, 6)) @ rng.normal(size=(6, 6))
        p = fit_preprocessor(cfg(feature_step=FeatureStep(kind="pca", pca_dim=4)), X)
        Z = p.apply(X)
        cov = np.cov(Z.T, bias=True)
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() <= 1e-8 * np.abs(np.diag(cov)).max()

    def test_variance_fraction_picks_dimension(self):
        rng = np.random.default_rng(5)
        X = np.hstack([rng.normal(0, 10, size=(100, 1)), rng.normal(0, 0.1, size=(100, 3))])
        p = fit_preprocessor(
            cfg(feature_step=FeatureStep(kind="pca", pca_variance=0.9)), X)
        assert p.output_dim == 1

    def test_dim_too_large(self):
        X = np.zeros((4, 2))
        with pytest.raises(ValueError):
            fit_preprocessor(cfg(feature_step=FeatureStep(kind="pca", pca_dim=3)), X)


class TestImputation:
    def test_mean_fill(self):
        X = np.array([[1.0, np.nan], [3.0, 4.0]])
        p = fit_preprocessor(cfg(imputation="mean"), X)
        out = p.apply(X)
        assert out[0, 1] == 4.0
        assert out[1, 1] == 4.0  # finite entries untouched
        assert out[0, 0] == 1.0

    def test_median_and_most_frequent(self):
        X = np.array([[1.0], [1.0], [7.0], [np.nan]])
        med = fit_preprocessor(cfg(imputation="median"), X)
        assert med.fill_values[0] == 1.0
        mf = fit_preprocessor(cfg(imputation="most_frequent"), X)
        assert mf.fill_values[0] == 1.0

    def test_none_with_missing_is_error(self):
        X = np.array([[1.0], [np.nan]])
        with pytest.raises(ValueError, match="imputation"):
            fit_preprocessor(cfg(), X)

    def test_fit_apply_separation(self):
        rng = np.random.default_rng(6)
        Xtr = rng.normal(size=(20, 3))
        p = fit_preprocessor(cfg(imputation="mean", scaling="standardize"), Xtr)
        Xte = rng.normal(size=(10, 3))
        out = p.apply(Xte)
        # permuting and duplicating test rows must not change any transform
        perm = rng.permutation(10)
        assert np.array_equal(p.apply(Xte[perm]), out[perm])
        assert np.array_equal(p.apply(np.vstack([Xte, Xte]))[:10], out)

    def test_width_mismatch(self):
        p = fit_preprocessor(cfg(), np.zeros((3, 2)))
        with pytest.raises(ValueError, match="width"):
            p.apply(np.zeros((3, 5)))


class TestBalanceWeights:
    def test_balanced_all_ones(self):
        assert np.allclose(balance_weights(np.array([1, 1, 2, 2])), 1.0)

    def test_three_one_split(self):
        # direct-count oracle: N=4, C=2 -> w1 = 4/(2*3) = 2/3, w2 = 4/(2*1) = 2
        w = balance_weights(np.array([1, 1, 1, 2]))
        assert np.allclose(w, [2 / 3, 2 / 3, 2 / 3, 2.0])
        assert np.isclose(w.mean(), 1.0)

    def test_single_class(self):
        assert np.allclose(balance_weights(np.array([3, 3, 3])), 1.0)


class TestConfigRoundTrip:
    @pytest.mark.parametrize("config", [
        PreprocessConfig(),
        PreprocessConfig(imputation="median", scaling="minmax",
                         feature_step=FeatureStep(kind="polynomial", interaction_only=True),
                         balancing="inverse_frequency_weights"),
        PreprocessConfig(feature_step=FeatureStep(kind="agglomeration", cluster_count=7)),
        PreprocessConfig(feature_step=FeatureStep(kind="pca", pca_variance=0.8)),
        PreprocessConfig(feature_step=FeatureStep(kind="pca", pca_dim=3)),
    ])
    def test_dict_round_trip(self, config):
        assert PreprocessConfig.from_dict(config.to_dict()) == config
