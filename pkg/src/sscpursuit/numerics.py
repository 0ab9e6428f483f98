"""Dense linear-algebra and randomness kernels used by the rest of the package.

Everything here is a pure function of its inputs; routines that draw random
numbers take an explicit :class:`RngStream` (or a ``numpy.random.Generator``)
so that results are reproducible across runs and across parallel schedules.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceError, NotSymmetricError, RankDeficientError

RANK_TOL = 1e-10
SYMMETRY_TOL = 1e-10

KMEANS_MAX_ITER = 300
KMEANS_RESTARTS = 10


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by a seed and a stream path.

    Identical ``(seed, stream)`` pairs yield identical draw sequences, no
    matter where or in which order the streams are consumed. ``child``
    derives independent sub-streams, so e.g. every (cell, trial) pair of a
    parameter sweep gets its own stream and results do not depend on the
    execution schedule.
    """

    seed: int
    stream: tuple = ()

    def child(self, *ids):
        """Derive an independent sub-stream addressed by ``ids``."""
        return RngStream(self.seed, self.stream + tuple(int(i) for i in ids))

    def generator(self):
        """Fresh ``numpy.random.Generator`` positioned at the stream start."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.default_rng(seq)


def as_generator(rng):
    """Coerce an RngStream, Generator, int seed, or None to a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


def least_squares(A, b):
    """Solve ``min_x ||A x - b||_2`` for a full-column-rank ``A``.

    Raises
    ------
    RankDeficientError
        If the smallest singular value of ``A`` is below ``1e-10`` times the
        largest.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise ValueError(f"incompatible shapes {A.shape} and {b.shape}")
    if A.shape[1] > A.shape[0]:
        raise ValueError("system has more columns than rows")
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] < RANK_TOL * sv[0]:
        raise RankDeficientError(
            f"smallest singular value {sv[-1]:.3e} below {RANK_TOL:g} * {sv[0]:.3e}"
        )
    x, _, _, _ = np.linalg.lstsq(A, b, rcond=None)
    return x


def random_orthonormal(m, k, rng):
    """Draw an ``m x k`` matrix with orthonormal columns, uniformly.

    QR of a standard-normal matrix with the R diagonal forced positive,
    which makes the draw unique and the distribution Haar (invariant under
    left-multiplication by any fixed orthogonal matrix).
    """
    if k > m:
        raise ValueError(f"cannot fit {k} orthonormal columns in dimension {m}")
    gen = as_generator(rng)
    G = gen.standard_normal((m, k))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def uniform_sphere(d, rng):
    """Draw a point uniformly from the unit sphere in ``R^d``."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    gen = as_generator(rng)
    while True:
        v = gen.standard_normal(d)
        n = np.linalg.norm(v)
        if n > 0:  # zero draw has probability 0 but guard anyway
            return v / n


def sym_eigs_smallest(S, k):
    """Return the ``k`` smallest eigenpairs of a symmetric matrix.

    Eigenvalues come back ascending; eigenvectors are the corresponding
    orthonormal columns.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if S.ndim != 2 or S.shape[1] != n:
        raise ValueError("matrix must be square")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range [1, {n}]")
    scale = max(np.abs(S).max(), 1.0)
    if np.abs(S - S.T).max() > SYMMETRY_TOL * scale:
        raise NotSymmetricError("matrix is not symmetric within tolerance")
    try:
        w, V = scipy.linalg.eigh(S, subset_by_index=(0, k - 1))
    except scipy.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    return w, V


def singular_values(A):
    """Singular values of ``A`` in descending order."""
    A = np.asarray(A, dtype=float)
    try:
        return np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD failed: {exc}") from exc


def _wcss(points, labels, centroids):
    diff = points - centroids[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def _kmeans_pp_seed(points, n_clusters, gen):
    # Standard D^2-weighted seeding.
    n = points.shape[0]
    centers = np.empty((n_clusters, points.shape[1]))
    idx = int(gen.integers(n))
    centers[0] = points[idx]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, n_clusters):
        total = d2.sum()
        if total > 0:
            probs = d2 / total
            idx = int(gen.choice(n, p=probs))
        else:
            idx = int(gen.integers(n))
        centers[c] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[c]) ** 2, axis=1))
    return centers


def _lloyd(points, centers, max_iter):
    labels = None
    for _ in range(max_iter):
        d2 = (
            np.sum(points**2, axis=1)[:, None]
            - 2.0 * points @ centers.T
            + np.sum(centers**2, axis=1)[None, :]
        )
        new_labels = np.argmin(d2, axis=1)
        for c in range(centers.shape[0]):
            mask = new_labels == c
            if mask.any():
                centers[c] = points[mask].mean(axis=0)
            else:
                # repair: reseed the empty centroid at the point farthest
                # from its currently assigned centroid
                dist = np.sum((points - centers[new_labels]) ** 2, axis=1)
                far = int(np.argmax(dist))
                centers[c] = points[far]
                new_labels[far] = c
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
    # one final exact assignment against the converged centroids
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centers.T
        + np.sum(centers**2, axis=1)[None, :]
    )
    labels = np.argmin(d2, axis=1)
    return labels, centers


def kmeans(points, n_clusters, restarts=KMEANS_RESTARTS, rng=None, return_centroids=False):
    """Cluster rows of ``points`` into ``n_clusters`` groups by k-means.

    Runs ``restarts`` independent k-means++ seeded Lloyd iterations and keeps
    the solution with the lowest within-cluster sum of squares. Deterministic
    for a fixed ``rng``.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array (rows are points)")
    n = points.shape[0]
    if n_clusters < 1:
        raise ValueError("need at least one cluster")
    if n < n_clusters:
        raise ValueError(f"cannot split {n} points into {n_clusters} clusters")
    if n_clusters == 1:
        labels = np.zeros(n, dtype=int)
        if return_centroids:
            return labels, points.mean(axis=0, keepdims=True)
        return labels
    gen = as_generator(rng)
    best_labels, best_centers, best_cost = None, None, np.inf
    for _ in range(max(1, restarts)):
        centers = _kmeans_pp_seed(points, n_clusters, gen)
        labels, centers = _lloyd(points, centers, KMEANS_MAX_ITER)
        cost = _wcss(points, labels, centers)
        if cost < best_cost:
            best_labels, best_centers, best_cost = labels, centers, cost
    if return_centroids:
        return best_labels, best_centers
    return best_labels
