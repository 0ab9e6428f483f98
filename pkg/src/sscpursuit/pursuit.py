"""Greedy self-representation engines (OMP and MP).

Each data point ``y_j`` of a dictionary ``Y`` (points as columns) is
approximated by a sparse combination of the *other* columns. OMP
re-orthogonalizes the residual against everything selected so far and
therefore picks a new column every iteration; MP orthogonalizes only
against the column picked in the current iteration and may revisit columns.

Stopping is the union of the configured criteria: an iteration budget
``s_max``, a target sparsity ``p_max`` (MP only), a residual threshold
``tau``, vanishing inner products, and a hard safety cap ``iter_cap`` that
guards against MP non-termination when ``tau`` is unreachable.
"""

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .numerics import least_squares

TIE_REL_TOL = 1e-12


class Method(str, enum.Enum):
    OMP = "omp"
    MP = "mp"


class StopReason(str, enum.Enum):
    MAX_ITERATIONS = "max_iterations"
    SPARSITY_REACHED = "sparsity_reached"
    RESIDUAL_BELOW_TAU = "residual_below_tau"
    ZERO_INNER_PRODUCTS = "zero_inner_products"
    ITER_CAP = "iter_cap"


@dataclass(frozen=True)
class PursuitConfig:
    """Stopping and selection parameters for a pursuit run.

    Parameters
    ----------
    method : {"omp", "mp"}
    s_max : int or None
        Maximum number of iterations; None means unbounded.
    p_max : int or None
        Target sparsity (number of nonzero coefficients), MP only.
    tau : float
        Residual-norm threshold; 0 disables residual-driven stopping except
        for exactly-zero residuals.
    alpha : float
        Weak-selection relaxation in (0, 1]; 1 is the plain argmax rule.
    zero_tol : float
        Absolute threshold under which inner products count as zero.
    iter_cap : int or None
        Hard iteration cap; defaults to ``10 * min(m, N - 1)`` at run time.
    """

    method: Method = Method.OMP
    s_max: int | None = None
    p_max: int | None = None
    tau: float = 0.0
    alpha: float = 1.0
    zero_tol: float = 1e-12
    iter_cap: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.zero_tol < 0:
            raise ValueError("zero_tol must be nonnegative")
        for name in ("s_max", "p_max", "iter_cap"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass
class PursuitResult:
    """Sparse representation of one data point.

    ``coefficients`` is the dense length-N vector with entry ``j`` zero,
    ``selection_order`` the column picked at each iteration, ``support``
    the distinct selected indices, and ``residual_norms`` the residual
    norm after each iteration.
    """

    index: int
    coefficients: np.ndarray
    selection_order: list
    support: np.ndarray
    residual_norm: float
    iterations: int
    stop_reason: StopReason
    residual_norms: np.ndarray = field(default_factory=lambda: np.empty(0))
    failure: str | None = None


def _empty_result(index, n, reason, residual_norm=0.0, failure=None):
    return PursuitResult(
        index=index,
        coefficients=np.zeros(n),
        selection_order=[],
        support=np.empty(0, dtype=int),
        residual_norm=float(residual_norm),
        iterations=0,
        stop_reason=reason,
        residual_norms=np.empty(0),
        failure=failure,
    )


def _select(scores, alpha):
    """Index of the accepted column: lowest index whose score reaches
    ``alpha`` times the maximum, with ties detected at relative 1e-12."""
    mx = scores.max()
    thr = alpha * mx * (1.0 - TIE_REL_TOL)
    return int(np.argmax(scores >= thr)), mx


def _effective_cap(cfg, m, n):
    if cfg.iter_cap is not None:
        return cfg.iter_cap
    return 10 * min(m, n - 1)


def _check_inputs(Y, j):
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValueError("Y must be a 2-D array (points as columns)")
    m, n = Y.shape
    if n < 2:
        raise ValueError("need at least two data points")
    if not 0 <= j < n:
        raise IndexError(f"column index {j} out of range [0, {n})")
    return Y, m, n


def omp_represent(Y, j, cfg, _yt=None):
    """Represent column ``j`` of ``Y`` in terms of the other columns by OMP.

    Selection maximizes ``|<y_i, r>|`` over unselected columns, the residual
    is updated against the component of the selected column orthogonal to the
    current span, and the final coefficients re-solve the least-squares
    problem on the selected support.
    """
    if cfg.method is not Method.OMP:
        raise ValueError("config method must be 'omp'")
    Y, m, n = _check_inputs(Y, j)
    yt = np.ascontiguousarray(Y.T) if _yt is None else _yt

    y = Y[:, j]
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        return _empty_result(j, n, StopReason.ZERO_INNER_PRODUCTS)

    cap = _effective_cap(cfg, m, n)
    Q = np.empty((m, max(1, min(cap, n - 1))))
    r = y.copy()
    rnorm = ynorm
    selected = []
    norms_hist = []
    excluded = np.zeros(n, dtype=bool)
    excluded[j] = True

    while True:
        if rnorm <= cfg.tau:
            reason = StopReason.RESIDUAL_BELOW_TAU
            break
        if cfg.s_max is not None and len(selected) >= cfg.s_max:
            reason = StopReason.MAX_ITERATIONS
            break
        if len(selected) >= cap:
            reason = StopReason.ITER_CAP
            break
        scores = np.abs(yt @ r)
        scores[excluded] = -1.0
        pick, mx = _select(scores, cfg.alpha)
        if mx <= cfg.zero_tol:
            reason = StopReason.ZERO_INNER_PRODUCTS
            break

        s = len(selected)
        v = Y[:, pick].copy()
        if s:
            Qs = Q[:, :s]
            v -= Qs @ (Qs.T @ v)
            v -= Qs @ (Qs.T @ v)  # second pass keeps Q orthonormal
        vn = float(np.linalg.norm(v))
        if vn <= cfg.zero_tol * max(1.0, float(np.linalg.norm(Y[:, pick]))):
            # selected column numerically inside the current span
            reason = StopReason.ZERO_INNER_PRODUCTS
            break
        q = v / vn
        r -= q * (q @ r)
        Q[:, s] = q
        selected.append(pick)
        excluded[pick] = True
        rnorm = float(np.linalg.norm(r))
        norms_hist.append(rnorm)

    support = np.array(sorted(selected), dtype=int)
    coef = np.zeros(n)
    if selected:
        coef[support] = least_squares(Y[:, support], y)
    return PursuitResult(
        index=j,
        coefficients=coef,
        selection_order=selected,
        support=support,
        residual_norm=rnorm,
        iterations=len(selected),
        stop_reason=reason,
        residual_norms=np.array(norms_hist),
    )


def mp_represent(Y, j, cfg, _yt=None):
    """Represent column ``j`` of ``Y`` in terms of the other columns by MP.

    Per iteration the residual is orthogonalized only against the column
    just selected, so columns may be picked repeatedly and coefficients
    accumulate.
    """
    if cfg.method is not Method.MP:
        raise ValueError("config method must be 'mp'")
    Y, m, n = _check_inputs(Y, j)
    yt = np.ascontiguousarray(Y.T) if _yt is None else _yt

    y = Y[:, j]
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        return _empty_result(j, n, StopReason.ZERO_INNER_PRODUCTS)

    cap = _effective_cap(cfg, m, n)
    sq_norms = np.einsum("ij,ij->j", Y, Y)
    coef = np.zeros(n)
    q = y.copy()
    qnorm = ynorm
    selected = []
    norms_hist = []
    mask = np.zeros(n, dtype=bool)
    mask[j] = True

    while True:
        if qnorm <= cfg.tau:
            reason = StopReason.RESIDUAL_BELOW_TAU
            break
        if cfg.s_max is not None and len(selected) >= cfg.s_max:
            reason = StopReason.MAX_ITERATIONS
            break
        if cfg.p_max is not None and np.count_nonzero(coef) >= cfg.p_max:
            reason = StopReason.SPARSITY_REACHED
            break
        if len(selected) >= cap:
            reason = StopReason.ITER_CAP
            break
        ips = yt @ q
        scores = np.abs(ips)
        scores[mask] = -1.0
        pick, mx = _select(scores, cfg.alpha)
        if mx <= cfg.zero_tol:
            reason = StopReason.ZERO_INNER_PRODUCTS
            break

        step = ips[pick] / sq_norms[pick]
        coef[pick] += step
        q -= step * Y[:, pick]
        selected.append(pick)
        qnorm = float(np.linalg.norm(q))
        norms_hist.append(qnorm)

    return PursuitResult(
        index=j,
        coefficients=coef,
        selection_order=selected,
        support=np.unique(np.array(selected, dtype=int)),
        residual_norm=qnorm,
        iterations=len(selected),
        stop_reason=reason,
        residual_norms=np.array(norms_hist),
    )


def represent_one(Y, j, cfg, _yt=None):
    """Dispatch to :func:`omp_represent` or :func:`mp_represent`."""
    if cfg.method is Method.OMP:
        return omp_represent(Y, j, cfg, _yt=_yt)
    return mp_represent(Y, j, cfg, _yt=_yt)


def represent_all(Y, cfg, n_jobs=1):
    """Sparse self-representation of every column of ``Y``.

    Points are independent, so the batch may fan out over a thread pool;
    the result list is always in column order and identical to sequential
    point-by-point calls. Per-point errors become failure records instead
    of aborting the batch.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[1] < 2:
        raise ValueError("Y must be 2-D with at least two columns")
    n = Y.shape[1]
    yt = np.ascontiguousarray(Y.T)

    def run(j):
        try:
            return represent_one(Y, j, cfg, _yt=yt)
        except Exception as exc:  # record, never abort the batch
            return _empty_result(
                j, n, StopReason.ZERO_INNER_PRODUCTS, failure=f"{type(exc).__name__}: {exc}"
            )

    if n_jobs == 1:
        return [run(j) for j in range(n)]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(run, range(n)))
