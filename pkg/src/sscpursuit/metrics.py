"""Clustering and support-recovery performance measures.

True/false positives are counted on the supports of the representation
coefficient vectors (column ``j`` of B), not on the symmetrized graph: a
true positive of point ``j`` is a selected point from the same ground-truth
cluster, a false positive one from any other cluster.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import build_adjacency, check_nfc

EXHAUSTIVE_MATCH_LIMIT = 8


@dataclass
class TpFpReport:
    """Per-subspace average TP/FP counts and their normalized rates.

    ``tpr_dim``/``fpr_dim`` divide by the subspace dimension and its
    codimension; ``tpr_size``/``fpr_size`` divide by the cluster size and
    its complement, which keeps them in [0, 1].
    """

    tp_count: np.ndarray
    fp_count: np.ndarray
    tpr_dim: np.ndarray
    fpr_dim: np.ndarray
    tpr_size: np.ndarray
    fpr_size: np.ndarray


@dataclass
class MetricsReport:
    """Bundle of the measures computed for one clustering run."""

    ce: float | None
    nfc: bool | None
    tp_fp: TpFpReport | None
    tp_l1: float | None
    fp_l1: float | None


def evaluate_run(B, supports, pred, truth, dims=None, m=None):
    """Assemble a :class:`MetricsReport` for one clustering run.

    ``B`` is the coefficient matrix (column j represents point j),
    ``supports`` the per-point selected index sets, ``pred`` the predicted
    labels. The dimension-normalized TP/FP block needs the per-cluster
    subspace dimensions ``dims`` and the ambient dimension ``m``; when
    these are unknown (external data) it is left out.
    """
    ce = clustering_error(pred, truth)
    nfc, _ = check_nfc(build_adjacency(B), truth)
    tp_fp = None
    if dims is not None and m is not None:
        tp_fp = tp_fp_counts(supports, truth, dims, m)
    tp_l1, fp_l1 = l1_norms(B, truth)
    return MetricsReport(ce=ce, nfc=bool(nfc), tp_fp=tp_fp, tp_l1=tp_l1, fp_l1=fp_l1)


def _confusion(pred, truth):
    pred_ids, pred_inv = np.unique(pred, return_inverse=True)
    truth_ids, truth_inv = np.unique(truth, return_inverse=True)
    C = np.zeros((pred_ids.size, truth_ids.size), dtype=np.int64)
    np.add.at(C, (pred_inv, truth_inv), 1)
    return C


def _best_match_exhaustive(C):
    n_p, n_t = C.shape
    if n_p <= n_t:
        return max(
            sum(C[i, perm[i]] for i in range(n_p))
            for perm in itertools.permutations(range(n_t), n_p)
        )
    return max(
        sum(C[perm[j], j] for j in range(n_t))
        for perm in itertools.permutations(range(n_p), n_t)
    )


def clustering_error(pred, truth):
    """Fraction of misclustered points under the best injective label match.

    Exhaustive matching for at most 8 labels per side, Hungarian assignment
    beyond; both compute the same optimum.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError("label vectors must be 1-D and of equal length")
    n = pred.size
    if n == 0:
        raise ValueError("label vectors are empty")
    C = _confusion(pred, truth)
    if max(C.shape) <= EXHAUSTIVE_MATCH_LIMIT:
        matched = _best_match_exhaustive(C)
    else:
        rows, cols = linear_sum_assignment(-C)
        matched = int(C[rows, cols].sum())
    return float(1.0 - matched / n)


def tp_fp_counts(supports, truth, dims, m):
    """Per-subspace TP/FP averages and all four normalized rates.

    ``supports`` is one index array per point (same-cluster selections are
    TPs, the rest FPs); ``dims`` the subspace dimensions per cluster label
    in sorted label order; ``m`` the ambient dimension.
    """
    truth = np.asarray(truth)
    if len(supports) != truth.size:
        raise ValueError("one support per point required")
    labels = np.unique(truth)
    if labels.size != len(dims):
        raise ValueError("need one subspace dimension per cluster")
    n = truth.size
    tp = np.zeros(labels.size)
    fp = np.zeros(labels.size)
    counts = np.array([(truth == lab).sum() for lab in labels], dtype=float)
    label_pos = {lab: i for i, lab in enumerate(labels)}
    for j, supp in enumerate(supports):
        supp = np.asarray(supp, dtype=int)
        li = label_pos[truth[j]]
        same = truth[supp] == truth[j]
        tp[li] += int(same.sum())
        fp[li] += int(supp.size - same.sum())
    tp /= counts
    fp /= counts
    dims = np.asarray(dims, dtype=float)
    return TpFpReport(
        tp_count=tp,
        fp_count=fp,
        tpr_dim=tp / dims,
        fpr_dim=fp / (m - dims),
        tpr_size=tp / counts,
        fpr_size=fp / (n - counts),
    )


def point_tp_counts(supports, truth):
    """Per-point count of same-cluster support entries."""
    truth = np.asarray(truth)
    out = np.empty(len(supports), dtype=int)
    for j, supp in enumerate(supports):
        supp = np.asarray(supp, dtype=int)
        out[j] = int((truth[supp] == truth[j]).sum())
    return out


def l1_norms(B, truth):
    """Average l1 mass of coefficients on same-cluster and cross-cluster
    entries, both averaged over all points."""
    B = np.asarray(B, dtype=float)
    truth = np.asarray(truth)
    n = truth.size
    if B.shape != (n, n):
        raise ValueError("coefficient matrix shape does not match labels")
    same = truth[:, None] == truth[None, :]
    np.fill_diagonal(same, False)
    absB = np.abs(B)
    tp_l1 = float(absB[same].sum() / n)
    cross = truth[:, None] != truth[None, :]
    fp_l1 = float(absB[cross].sum() / n)
    return tp_l1, fp_l1
