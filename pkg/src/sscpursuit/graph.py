"""Affinity-graph construction and structural queries.

The graph is the symmetrized magnitude of the self-representation
coefficient matrix: ``A = |B| + |B|^T``. An edge exists wherever the
corresponding entry of ``A`` is nonzero.
"""

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .numerics import sym_eigs_smallest

DEFAULT_MAX_CLUSTERS = 20


def coefficient_matrix(results):
    """Stack per-point pursuit results into the N x N coefficient matrix B,
    column j holding the representation of point j."""
    n = len(results)
    B = np.zeros((n, n))
    for res in results:
        B[:, res.index] = res.coefficients
    return B


def build_adjacency(B):
    """Adjacency ``A = |B| + |B|^T`` from a zero-diagonal coefficient matrix."""
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("coefficient matrix must be square")
    if np.any(np.diag(B) != 0):
        raise ValueError("coefficient matrix must have zero diagonal")
    absB = np.abs(B)
    return absB + absB.T


def connected_components(A):
    """Component labels; two nodes share a label iff a path of nonzero-weight
    edges joins them."""
    A = np.asarray(A, dtype=float)
    sparse = scipy.sparse.csr_matrix(A != 0)
    _, labels = scipy.sparse.csgraph.connected_components(sparse, directed=False)
    return labels


def check_nfc(A, truth):
    """Whether every edge of ``A`` joins same-cluster nodes.

    Returns ``(ok, violations)`` where ``violations`` lists each offending
    undirected edge once as ``(i, k, weight)``.
    """
    A = np.asarray(A, dtype=float)
    truth = np.asarray(truth)
    if truth.shape[0] != A.shape[0]:
        raise ValueError("label vector length does not match graph size")
    ii, kk = np.nonzero(np.triu(A, k=1))
    bad = truth[ii] != truth[kk]
    violations = [(int(i), int(k), float(A[i, k])) for i, k in zip(ii[bad], kk[bad])]
    return len(violations) == 0, violations


def normalized_laplacian(A):
    """Symmetric normalized Laplacian ``D^{-1/2} (D - A) D^{-1/2}``.

    Zero-degree nodes get a zero row/column (their ``D^{-1/2}`` entry is
    taken as 0), so each isolated node contributes a zero eigenvalue, in
    line with components of the graph.
    """
    A = np.asarray(A, dtype=float)
    deg = A.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    pos = deg > 0
    inv_sqrt[pos] = 1.0 / np.sqrt(deg[pos])
    L = -(inv_sqrt[:, None] * A * inv_sqrt[None, :])
    L[np.diag_indices_from(L)] += np.where(pos, 1.0, 0.0)
    return L


def laplacian_spectrum(A, k=None):
    """Ascending eigenvalues (and eigenvectors) of the normalized Laplacian."""
    L = normalized_laplacian(A)
    n = L.shape[0]
    k = n if k is None else min(k, n)
    return sym_eigs_smallest(L, k)


def estimate_num_clusters_eigengap(A, max_clusters=None, eig_tol=1e-8):
    """Estimate the number of clusters from the normalized-Laplacian spectrum.

    A disconnected graph has one zero eigenvalue per connected component,
    and that count is returned directly (capped at ``max_clusters``). For a
    connected graph the estimate is the ``k`` in ``[1, max_clusters]`` with
    the largest gap ``lambda_{k+1} - lambda_k`` of the ascending spectrum;
    past the end of the spectrum the next eigenvalue is taken as 2, the
    upper edge of the Laplacian's range. Equal gaps resolve to the smallest
    ``k``.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if max_clusters is None:
        max_clusters = min(n, DEFAULT_MAX_CLUSTERS)
    if max_clusters < 1:
        raise ValueError("max_clusters must be >= 1")
    k_hi = min(max_clusters, n)
    w, _ = laplacian_spectrum(A, k=min(k_hi + 1, n))
    n_zero = int(np.sum(np.abs(w) <= eig_tol))
    if n_zero > 1:
        return min(n_zero, k_hi)
    gaps = np.empty(k_hi)
    for k in range(1, k_hi + 1):
        nxt = w[k] if k < n else 2.0
        gaps[k - 1] = nxt - w[k - 1]
    return int(np.argmax(gaps)) + 1
