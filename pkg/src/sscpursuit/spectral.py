"""Normalized spectral clustering of an affinity graph.

The variant fixed here: symmetric normalized Laplacian, embedding by the
eigenvectors of the L smallest eigenvalues, row normalization to unit
length, k-means on the rows.
"""

from dataclasses import dataclass, field

import numpy as np

from .graph import laplacian_spectrum
from .numerics import KMEANS_RESTARTS, RngStream, kmeans


@dataclass(frozen=True)
class SpectralConfig:
    restarts: int = KMEANS_RESTARTS
    eig_tol: float = 1e-8
    rng: RngStream = field(default_factory=lambda: RngStream(0))

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


def normalized_spectral_clustering(A, n_clusters, cfg=None):
    """Cluster the nodes of affinity graph ``A`` into ``n_clusters`` groups.

    Rows of the spectral embedding that are exactly zero (isolated nodes
    under degenerate spectra) are held out of k-means and assigned to the
    nearest centroid afterwards.
    """
    if cfg is None:
        cfg = SpectralConfig()
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("affinity matrix must be square")
    if not 1 <= n_clusters <= n:
        raise ValueError(f"number of clusters {n_clusters} out of range [1, {n}]")
    if n_clusters == 1:
        return np.zeros(n, dtype=int)

    _, V = laplacian_spectrum(A, k=n_clusters)
    row_norms = np.linalg.norm(V, axis=1)
    nonzero = row_norms > 0
    emb = np.zeros_like(V)
    emb[nonzero] = V[nonzero] / row_norms[nonzero, None]

    if nonzero.sum() >= n_clusters:
        labels_nz, centroids = kmeans(
            emb[nonzero], n_clusters, restarts=cfg.restarts, rng=cfg.rng, return_centroids=True
        )
        labels = np.empty(n, dtype=int)
        labels[nonzero] = labels_nz
        if (~nonzero).any():
            d2 = ((emb[~nonzero, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
            labels[~nonzero] = np.argmin(d2, axis=1)
    else:
        # fewer usable rows than clusters: degenerate, cluster everything
        labels = kmeans(emb, n_clusters, restarts=cfg.restarts, rng=cfg.rng)
    return labels
