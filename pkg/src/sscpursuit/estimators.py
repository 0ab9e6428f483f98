"""Scikit-learn compatible clusterers wrapping the full pipeline.

Both estimators follow the same three steps: sparse self-representation of
every sample in terms of all the other samples (by OMP or MP), construction
of the symmetrized affinity graph from the coefficient magnitudes, and
normalized spectral clustering of that graph.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils import check_array, check_random_state

from . import graph, pursuit, spectral
from .datamodel import normalize_columns
from .numerics import RngStream


class _GreedySelfRepresentationClustering(BaseEstimator, ClusterMixin):
    """Shared machinery of the OMP and MP based clusterers."""

    _method = None

    def __init__(
        self,
        n_clusters=None,
        s_max=None,
        tau=0.0,
        alpha=1.0,
        zero_tol=1e-12,
        iter_cap=None,
        normalize=True,
        max_clusters=None,
        n_restarts=10,
        random_state=None,
        n_jobs=1,
    ):
        self.n_clusters = n_clusters
        self.s_max = s_max
        self.tau = tau
        self.alpha = alpha
        self.zero_tol = zero_tol
        self.iter_cap = iter_cap
        self.normalize = normalize
        self.max_clusters = max_clusters
        self.n_restarts = n_restarts
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _pursuit_config(self):
        return pursuit.PursuitConfig(
            method=self._method,
            s_max=self.s_max,
            tau=self.tau,
            alpha=self.alpha,
            zero_tol=self.zero_tol,
            iter_cap=self.iter_cap,
        )

    def _rng(self):
        # derive a stable stream from sklearn-style random_state
        if self.random_state is None:
            return RngStream(0)
        if isinstance(self.random_state, (int, np.integer)):
            return RngStream(int(self.random_state))
        rs = check_random_state(self.random_state)
        return RngStream(int(rs.randint(0, 2**31 - 1)))

    def fit(self, X, y=None):
        """Cluster the samples of ``X`` (one sample per row).

        Sets ``labels_``, ``coefficient_matrix_``, ``affinity_matrix_``,
        ``pursuit_results_``, and ``n_clusters_``.
        """
        X = check_array(X, dtype=np.float64)
        if X.shape[0] < 2:
            raise ValueError("need at least two samples")
        Y = X.T.copy()
        if self.normalize:
            Y, _ = normalize_columns(Y)
        results = pursuit.represent_all(Y, self._pursuit_config(), n_jobs=self.n_jobs)
        B = graph.coefficient_matrix(results)
        A = graph.build_adjacency(B)
        if self.n_clusters is None:
            n_clusters = graph.estimate_num_clusters_eigengap(A, self.max_clusters)
        else:
            n_clusters = int(self.n_clusters)
        cfg = spectral.SpectralConfig(restarts=self.n_restarts, rng=self._rng())
        self.labels_ = spectral.normalized_spectral_clustering(A, n_clusters, cfg)
        self.pursuit_results_ = results
        self.coefficient_matrix_ = B
        self.affinity_matrix_ = A
        self.n_clusters_ = n_clusters
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class SparseSubspaceClusteringOMP(_GreedySelfRepresentationClustering):
    """Subspace clustering with OMP-based self-representation.

    Parameters
    ----------
    n_clusters : int or None, default None
        Number of clusters; None estimates it with the eigengap heuristic.
    s_max : int or None, default None
        Iteration budget per sample (data-independent stopping).
    tau : float, default 0.0
        Residual threshold (data-dependent stopping); 0 disables it.
    alpha : float, default 1.0
        Weak-selection relaxation in (0, 1].
    zero_tol : float, default 1e-12
        Absolute threshold for treating inner products as zero.
    iter_cap : int or None, default None
        Hard per-sample iteration cap; defaults to ``10 * min(m, N - 1)``.
    normalize : bool, default True
        Scale samples to unit l2-norm before the pursuit step.
    max_clusters : int or None, default None
        Cap for the eigengap search when ``n_clusters`` is None.
    n_restarts : int, default 10
        k-means restarts inside spectral clustering.
    random_state : int or None
        Seed for the spectral clustering k-means.
    n_jobs : int, default 1
        Threads for the per-sample pursuit loop.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
    coefficient_matrix_ : ndarray of shape (n_samples, n_samples)
        Column ``j`` holds the sparse representation of sample ``j``.
    affinity_matrix_ : ndarray of shape (n_samples, n_samples)
    n_clusters_ : int
        Number of clusters actually used.
    """

    _method = pursuit.Method.OMP


class SparseSubspaceClusteringMP(_GreedySelfRepresentationClustering):
    """Subspace clustering with MP-based self-representation.

    MP skips the per-iteration orthogonalization and may reselect samples,
    so it also takes a target sparsity ``p_max``; see
    :class:`SparseSubspaceClusteringOMP` for the shared parameters.
    """

    _method = pursuit.Method.MP

    def __init__(
        self,
        n_clusters=None,
        s_max=None,
        p_max=None,
        tau=0.0,
        alpha=1.0,
        zero_tol=1e-12,
        iter_cap=None,
        normalize=True,
        max_clusters=None,
        n_restarts=10,
        random_state=None,
        n_jobs=1,
    ):
        super().__init__(
            n_clusters=n_clusters,
            s_max=s_max,
            tau=tau,
            alpha=alpha,
            zero_tol=zero_tol,
            iter_cap=iter_cap,
            normalize=normalize,
            max_clusters=max_clusters,
            n_restarts=n_restarts,
            random_state=random_state,
            n_jobs=n_jobs,
        )
        self.p_max = p_max

    def _pursuit_config(self):
        return pursuit.PursuitConfig(
            method=self._method,
            s_max=self.s_max,
            p_max=self.p_max,
            tau=self.tau,
            alpha=self.alpha,
            zero_tol=self.zero_tol,
            iter_cap=self.iter_cap,
        )
