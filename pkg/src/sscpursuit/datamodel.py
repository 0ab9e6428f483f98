"""Synthetic union-of-subspaces data generation, affinity measures, CSV I/O.

Points of cluster l are ``y = U^(l) a + z`` with ``a`` uniform on the unit
sphere of the subspace and ``z ~ N(0, (sigma^2 / m) I)``, so noiseless
points have unit norm and ``E||z||^2 = sigma^2``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import NotOrthonormalError, ParseError
from .numerics import RngStream, random_orthonormal, singular_values, uniform_sphere

ORTHONORMAL_TOL = 1e-10


def _check_orthonormal(U, name="basis"):
    U = np.asarray(U, dtype=float)
    gram = U.T @ U
    err = np.abs(gram - np.eye(U.shape[1])).max()
    if err > ORTHONORMAL_TOL:
        raise NotOrthonormalError(f"{name} is not orthonormal (Gram error {err:.3e})")
    return U


@dataclass(frozen=True)
class SubspaceArrangement:
    """Orthonormal bases of the subspaces, all in the same ambient space."""

    bases: tuple

    def __post_init__(self):
        bases = tuple(np.asarray(U, dtype=float) for U in self.bases)
        if not bases:
            raise ValueError("need at least one subspace")
        m = bases[0].shape[0]
        for i, U in enumerate(bases):
            if U.shape[0] != m:
                raise ValueError("all bases must share the ambient dimension")
            _check_orthonormal(U, name=f"basis {i}")
        object.__setattr__(self, "bases", bases)

    @property
    def m(self):
        return self.bases[0].shape[0]

    @property
    def dims(self):
        return tuple(U.shape[1] for U in self.bases)

    @property
    def n_subspaces(self):
        return len(self.bases)


@dataclass(frozen=True)
class SyntheticConfig:
    """Sampling parameters: points per subspace, noise scale, randomness."""

    m: int
    counts: tuple
    sigma: float
    rng: RngStream

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if any(c < 1 for c in self.counts):
            raise ValueError("every subspace needs at least one point")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    def sampling_densities(self, dims):
        """Per-subspace densities ``(n_l - 1) / d_l``."""
        return tuple((n - 1) / d for n, d in zip(self.counts, dims))


@dataclass
class DataSet:
    """Point matrix (columns are points) with labels and provenance."""

    Y: np.ndarray
    truth: np.ndarray
    X: np.ndarray | None = None
    arrangement: SubspaceArrangement | None = None

    @property
    def m(self):
        return self.Y.shape[0]

    @property
    def n_points(self):
        return self.Y.shape[1]


def sample_arrangement_random(m, dims, rng):
    """Independent uniformly random orthonormal bases of the given dimensions."""
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or max(dims) > m:
        raise ValueError(f"subspace dimensions {dims} invalid for ambient dimension {m}")
    rng = rng if isinstance(rng, RngStream) else RngStream(rng)
    bases = tuple(random_orthonormal(m, d, rng.child(i)) for i, d in enumerate(dims))
    return SubspaceArrangement(bases)


def sample_arrangement_shared_intersection(m, n_subspaces, d, t, rng):
    """L equal-dimension subspaces sharing a t-dimensional intersection and
    mutually orthogonal on its complement.

    One ``m x (L (d - t) + t)`` orthonormal matrix is drawn; basis l takes
    the first ``t`` columns plus its own block of ``d - t`` columns, so
    every pairwise affinity equals ``sqrt(t / d)`` exactly.
    """
    if not 0 <= t <= d:
        raise ValueError(f"intersection dimension t={t} outside [0, {d}]")
    total = n_subspaces * (d - t) + t
    if total > m:
        raise ValueError(f"construction needs {total} dimensions but ambient space has {m}")
    U = random_orthonormal(m, total, rng)
    shared = U[:, :t]
    bases = []
    for l in range(n_subspaces):
        lo = t + l * (d - t)
        bases.append(np.hstack([shared, U[:, lo : lo + (d - t)]]))
    return SubspaceArrangement(tuple(bases))


def sample_arrangement_common_core(m, dims, t_core, rng):
    """Subspaces of possibly different dimensions all containing a common
    random ``t_core``-dimensional core.

    Each basis is the shared core extended by an independent random
    complement (orthonormalized against the core, which leaves the spanned
    subspace unchanged), so every pairwise affinity is at least
    ``sqrt(t_core / min(d_k, d_l))``.
    """
    dims = tuple(int(d) for d in dims)
    if t_core < 0 or t_core > min(dims):
        raise ValueError(f"core dimension {t_core} outside [0, {min(dims)}]")
    if max(dims) > m:
        raise ValueError(f"subspace dimensions {dims} invalid for ambient dimension {m}")
    rng = rng if isinstance(rng, RngStream) else RngStream(rng)
    core = random_orthonormal(m, t_core, rng.child(0)) if t_core else np.empty((m, 0))
    bases = []
    for i, d in enumerate(dims):
        extra = d - t_core
        if extra == 0:
            bases.append(core.copy())
            continue
        raw = random_orthonormal(m, extra, rng.child(i + 1))
        if t_core:
            raw = raw - core @ (core.T @ raw)
            raw, _ = np.linalg.qr(raw)
        bases.append(np.hstack([core, raw]))
    return SubspaceArrangement(tuple(bases))


def generate_points(arrangement, cfg):
    """Sample a noisy dataset from the arrangement under ``cfg``.

    Columns come out subspace-major: all points of subspace 0 first.
    """
    if cfg.m != arrangement.m:
        raise ValueError("config ambient dimension does not match the arrangement")
    if len(cfg.counts) != arrangement.n_subspaces:
        raise ValueError("need one point count per subspace")
    m = arrangement.m
    total = sum(cfg.counts)
    X = np.empty((m, total))
    truth = np.empty(total, dtype=int)
    col = 0
    sphere_rng = cfg.rng.child(0).generator()
    noise_rng = cfg.rng.child(1).generator()
    for l, (U, n_l) in enumerate(zip(arrangement.bases, cfg.counts)):
        d = U.shape[1]
        for _ in range(n_l):
            X[:, col] = U @ uniform_sphere(d, sphere_rng)
            truth[col] = l
            col += 1
    Z = noise_rng.standard_normal((m, total)) * (cfg.sigma / np.sqrt(m))
    Y = X + Z if cfg.sigma > 0 else X.copy()
    return DataSet(Y=Y, truth=truth, X=X, arrangement=arrangement)


def normalize_columns(Y):
    """Scale nonzero columns to unit l2-norm.

    Returns the normalized copy and the indices of zero columns, which are
    left untouched.
    """
    Y = np.asarray(Y, dtype=float)
    norms = np.linalg.norm(Y, axis=0)
    zero_cols = np.nonzero(norms == 0)[0]
    scale = np.where(norms == 0, 1.0, norms)
    return Y / scale, list(map(int, zero_cols))


def affinity(U_k, U_l):
    """Affinity ``||U_k^T U_l||_F / sqrt(min(d_k, d_l))`` between subspaces."""
    U_k = _check_orthonormal(U_k, "first basis")
    U_l = _check_orthonormal(U_l, "second basis")
    if U_k.shape[0] != U_l.shape[0]:
        raise ValueError("bases live in different ambient spaces")
    d_min = min(U_k.shape[1], U_l.shape[1])
    return float(np.linalg.norm(U_k.T @ U_l, "fro") / np.sqrt(d_min))


def principal_angles(U_k, U_l):
    """Ascending principal angles between two subspaces, in [0, pi/2].

    The cosines are the singular values of ``U_k^T U_l`` clamped to [0, 1]
    to absorb floating-point overshoot.
    """
    U_k = _check_orthonormal(U_k, "first basis")
    U_l = _check_orthonormal(U_l, "second basis")
    if U_k.shape[0] != U_l.shape[0]:
        raise ValueError("bases live in different ambient spaces")
    cosines = np.clip(singular_values(U_k.T @ U_l), 0.0, 1.0)
    return np.sort(np.arccos(cosines))


def load_points_csv(path):
    """Read a headerless CSV of one point per row into an m x N matrix."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(f"expected {width} values, found {len(fields)}", line=lineno)
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    if not rows:
        raise ParseError("file contains no data rows", line=1)
    Y = np.array(rows).T
    if not np.isfinite(Y).all():
        raise ParseError("file contains non-finite values")
    return Y


def load_labels_csv(path):
    """Read one integer label per row."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(float(line)))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    return np.array(labels, dtype=int)


def save_points_csv(Y, path):
    """Write points (columns of ``Y``) one per row."""
    Y = np.asarray(Y, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        for col in Y.T:
            fh.write(",".join(repr(float(v)) for v in col) + "\n")


def save_labels_csv(labels, path):
    with open(path, "w", encoding="utf-8") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")
