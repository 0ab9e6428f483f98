import numpy as np
import pytest
from sklearn.base import clone

from sscpursuit.datamodel import SyntheticConfig, generate_points, sample_arrangement_random
from sscpursuit.estimators import SparseSubspaceClusteringMP, SparseSubspaceClusteringOMP
from sscpursuit.metrics import clustering_error
from sscpursuit.numerics import RngStream


def easy_dataset(seed=0, m=40, d=4, n=30, sigma=0.0, L=3):
    rng = RngStream(seed, (200,))
    arr = sample_arrangement_random(m, (d,) * L, rng.child(0))
    ds = generate_points(arr, SyntheticConfig(m, (n,) * L, sigma, rng.child(1)))
    return ds.Y.T, ds.truth  # samples as rows, sklearn-style


class TestSklearnApi:
    def test_get_set_params_roundtrip(self):
        est = SparseSubspaceClusteringOMP(s_max=5, n_clusters=3)
        params = est.get_params()
        assert params["s_max"] == 5 and params["n_clusters"] == 3
        est.set_params(s_max=7)
        assert est.s_max == 7

    def test_clone(self):
        est = SparseSubspaceClusteringMP(s_max=4, p_max=9, tau=0.1, random_state=3)
        cl = clone(est)
        assert cl.get_params() == est.get_params()

    def test_fit_returns_self_and_sets_attributes(self):
        X, truth = easy_dataset()
        est = SparseSubspaceClusteringOMP(n_clusters=3, s_max=4, random_state=0)
        assert est.fit(X) is est
        assert est.labels_.shape == (X.shape[0],)
        assert est.coefficient_matrix_.shape == (X.shape[0], X.shape[0])
        assert est.affinity_matrix_.shape == (X.shape[0], X.shape[0])
        assert est.n_clusters_ == 3

    def test_fit_predict(self):
        X, truth = easy_dataset(seed=1)
        labels = SparseSubspaceClusteringOMP(
            n_clusters=3, s_max=4, random_state=0
        ).fit_predict(X)
        assert clustering_error(labels, truth) == 0.0


class TestClusteringBehavior:
    def test_omp_recovers_well_separated_subspaces(self):
        X, truth = easy_dataset(seed=2, sigma=0.1)
        est = SparseSubspaceClusteringOMP(n_clusters=3, s_max=4, random_state=1).fit(X)
        assert clustering_error(est.labels_, truth) == 0.0

    def test_mp_recovers_well_separated_subspaces(self):
        X, truth = easy_dataset(seed=3, sigma=0.1)
        est = SparseSubspaceClusteringMP(
            n_clusters=3, s_max=8, random_state=1
        ).fit(X)
        assert clustering_error(est.labels_, truth) == 0.0

    def test_eigengap_estimates_cluster_count(self):
        X, truth = easy_dataset(seed=4)
        est = SparseSubspaceClusteringOMP(s_max=4, random_state=0).fit(X)
        assert est.n_clusters_ == 3

    def test_parallel_fit_matches_serial(self):
        X, _ = easy_dataset(seed=5)
        a = SparseSubspaceClusteringOMP(n_clusters=3, s_max=4, random_state=2, n_jobs=1).fit(X)
        b = SparseSubspaceClusteringOMP(n_clusters=3, s_max=4, random_state=2, n_jobs=4).fit(X)
        assert np.array_equal(a.labels_, b.labels_)
        assert np.array_equal(a.coefficient_matrix_, b.coefficient_matrix_)

    def test_deterministic_given_random_state(self):
        X, _ = easy_dataset(seed=6, sigma=0.2)
        a = SparseSubspaceClusteringMP(n_clusters=3, s_max=6, random_state=5).fit(X)
        b = SparseSubspaceClusteringMP(n_clusters=3, s_max=6, random_state=5).fit(X)
        assert np.array_equal(a.labels_, b.labels_)

    def test_dd_stopping_mode(self):
        X, truth = easy_dataset(seed=7, sigma=0.1)
        est = SparseSubspaceClusteringOMP(n_clusters=3, tau=0.3, random_state=0).fit(X)
        assert clustering_error(est.labels_, truth) == 0.0

    def test_rejects_single_sample(self):
        with pytest.raises(ValueError):
            SparseSubspaceClusteringOMP(n_clusters=1, s_max=1).fit(np.ones((1, 4)))
