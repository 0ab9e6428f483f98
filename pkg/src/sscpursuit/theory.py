"""Closed-form evaluators for the clustering guarantees.

The guarantee for DI-stopping compares the worst pairwise subspace affinity
plus a noise term against ``1 / (8 log(N^3 s_max))``; success holds with
probability at least ``P*``. For DD-stopping there is a floor on the number
of same-subspace points selected, valid for thresholds ``tau`` up to
``2/3 - sqrt(d_max / m) * sigma``. All logarithms are natural.
"""

import math
import warnings
from dataclasses import dataclass

from .exceptions import DomainError

C_S_DEFAULT = 1.0 / 10.0
C_D_DEFAULT = 1.0 / 18.0
C_M_DEFAULT = 1.0 / 8.0


@dataclass(frozen=True)
class TheoryParams:
    """Problem description consumed by the evaluators.

    ``counts``/``dims`` are the per-subspace point counts and dimensions,
    ``max_aff`` the largest pairwise affinity, ``variant`` selects the
    OMP or MP noise constant. ``c_rho`` has no established numeric value
    and must be supplied by the caller to check the density hypothesis.
    """

    n_points: int
    m: int
    counts: tuple
    dims: tuple
    sigma: float
    s_max: int
    max_aff: float
    variant: str = "omp"
    c_s: float = C_S_DEFAULT
    c_d: float = C_D_DEFAULT
    c_m: float = C_M_DEFAULT
    c_rho: float | None = None

    def __post_init__(self):
        if self.variant not in ("omp", "mp"):
            raise ValueError("variant must be 'omp' or 'mp'")
        if not 0 < self.c_s <= 1 / 10:
            raise ValueError("c_s must lie in (0, 1/10]")
        if not 0 < self.c_d <= 1 / 18:
            raise ValueError("c_d must lie in (0, 1/18]")
        if not 0 < self.c_m <= 1 / 8:
            raise ValueError("c_m must lie in (0, 1/8]")
        if not 0 <= self.max_aff <= 1:
            raise ValueError("max_aff must lie in [0, 1]")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if len(self.counts) != len(self.dims):
            raise ValueError("counts and dims must have equal length")

    @property
    def d_max(self):
        return max(self.dims)

    @property
    def rho_min(self):
        return min((n - 1) / d for n, d in zip(self.counts, self.dims))


def noise_constant(sigma, variant="omp"):
    """The ``c(sigma)`` constant: ``10 + 13 sigma`` for OMP, ``22 + 29 sigma``
    for MP."""
    if variant == "omp":
        return 10.0 + 13.0 * sigma
    if variant == "mp":
        return 22.0 + 29.0 * sigma
    raise ValueError("variant must be 'omp' or 'mp'")


def clustering_condition(p):
    """Both sides of the DI-stopping clustering condition.

    Returns ``(lhs, rhs, satisfied)`` with

    ``lhs = max_aff + (10 sigma / sqrt(log(N^3 s_max)))
            * (sqrt(d_max / m) c(sigma) + sqrt(2 / rho_min) (1 + 3 sigma / 2))``

    ``rhs = 1 / (8 log(N^3 s_max))``.
    """
    if p.s_max < 1 or p.n_points < 2:
        raise DomainError("need s_max >= 1 and at least two points")
    arg = float(p.n_points) ** 3 * float(p.s_max)
    if arg <= 1.0:
        raise DomainError("N^3 * s_max must exceed 1")
    log_term = math.log(arg)
    c_sig = noise_constant(p.sigma, p.variant)
    noise = (10.0 * p.sigma / math.sqrt(log_term)) * (
        math.sqrt(p.d_max) / math.sqrt(p.m) * c_sig
        + math.sqrt(2.0) / math.sqrt(p.rho_min) * (1.0 + 1.5 * p.sigma)
    )
    lhs = p.max_aff + noise
    rhs = 1.0 / (8.0 * log_term)
    return lhs, rhs, lhs <= rhs


def success_probability_bound(p):
    """The probability floor ``P*``; may be negative (vacuous) and is
    returned unclamped so vacuity stays visible."""
    tail = sum(n * math.exp(-p.c_d * d) for n, d in zip(p.counts, p.dims))
    return 1.0 - 6.0 / p.n_points - 5.0 * p.n_points * math.exp(-p.c_m * p.m) - 6.0 * tail


def tau_admissible_range(d_max, m, sigma):
    """Upper end of the admissible threshold interval ``[0, upper]``.

    Returns ``(upper, conservative_upper)``; the conservative variant
    replaces ``sqrt(d_max / m)`` by 1 and needs no knowledge of ``d_max``.
    """
    if m < 1:
        raise DomainError("ambient dimension must be >= 1")
    upper = max(0.0, 2.0 / 3.0 - math.sqrt(d_max / m) * sigma)
    conservative = max(0.0, 2.0 / 3.0 - sigma)
    return upper, conservative


def dd_tp_lower_bound(d, n, m, sigma, tau, c_s=C_S_DEFAULT):
    """Guaranteed number of same-subspace points selected under DD-stopping.

    ``floor(d / log((n - 1) e) * min{(1/3) (2/3 - tau / (1 - (3/2) sqrt(d/m) sigma))^2, c_s})``,
    clamped at zero. Outside the admissible ``tau`` range (or when the
    denominator is nonpositive) the bound is vacuous; 0 is returned and a
    warning emitted.
    """
    if n <= 1:
        raise DomainError("need at least two points in the subspace")
    denom = 1.0 - 1.5 * math.sqrt(d / m) * sigma
    upper, _ = tau_admissible_range(d, m, sigma)
    if tau < 0 or tau > upper or denom <= 0:
        warnings.warn("tau outside the admissible range; bound is vacuous", stacklevel=2)
        return 0
    inner = (2.0 / 3.0 - tau / denom) ** 2 / 3.0
    value = d / math.log((n - 1) * math.e) * min(inner, c_s)
    return max(0, math.floor(value))


def admissible_smax(d, n, c_s=C_S_DEFAULT):
    """Largest iteration budget ``s`` with ``s <= c_s d / log((n - 1) e / s)``,
    scanning ``s = 1 .. d``; 0 when no budget qualifies."""
    if n < 2:
        raise DomainError("need at least two points in the subspace")
    best = 0
    for s in range(1, int(d) + 1):
        if s <= c_s * d / math.log((n - 1) * math.e / s):
            best = s
    return best


def curve_fit_rho_of_aff(c1, c2, aff):
    """Phase-boundary density as a function of affinity:
    ``rho = (c1 / (c2 - aff))^2``."""
    if c2 - aff <= 0:
        raise DomainError("fit requires c2 > aff")
    return (c1 / (c2 - aff)) ** 2


def curve_fit_rho_of_sigma(c3, c4, c5, c6, c7, sigma):
    """Phase-boundary density as a function of noise level:
    ``rho = (sigma (c5 + c6 sigma) / (c7 - sigma (c3 + c4 sigma)))^2``."""
    denom = c7 - sigma * (c3 + c4 * sigma)
    if denom <= 0:
        raise DomainError("fit requires c7 > sigma * (c3 + c4 * sigma)")
    return (sigma * (c5 + c6 * sigma) / denom) ** 2
