"""Count PGF/PMF machinery and kth contact / nearest-neighbor CDFs.

The count N of cluster-process points inside a ball of radius r has a
probability generating function exp(g(s)), with g a one-dimensional
integral over the lens volume between the probe ball and the cluster
ball.  Taylor coefficients h_k of g at s = 0 yield the PMF of N either
through the exp power-series recurrence (production path) or through the
Faa di Bruno partition sum (kept for cross-validation).  The kth contact
distance CDF is a partial PMF sum; nearest-neighbor distances follow by
convolving with the intra-cluster weights q_j under the reduced Palm
distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.special import gammainc, gammainccinv, logsumexp

from .geometry import intersection_volume, unit_ball_volume
from .quadrature import integrate

__all__ = [
    "CurveKind",
    "DistributionCurve",
    "McpParams",
    "PmfUnderflowError",
    "PmfVector",
    "cdf_contact",
    "cdf_nnd",
    "cdf_nnd_small_rd_limit",
    "corollary_contact_cdf",
    "corollary_nnd_cdf",
    "count_pmf",
    "count_pmf_partition",
    "distribution_curve",
    "enumerate_partitions",
    "h_coefficient",
    "log_pgf_count",
    "log_pgf_count_1d",
    "palm_count_pmf",
    "pgf_count",
    "pgf_count_1d",
    "pgf_count_palm",
    "ppp_cdf_contact",
    "q_weight",
    "quantile_radius",
]

# Tolerances for the h/q/g kernel integrals.  Tighter than the quadrature
# defaults so algebraically identical routes agree to ~1e-12.
_ABS_TOL = 1e-12
_REL_TOL = 1e-11

# Below this log-probability the PMF recurrence runs in log space.
_LOG_SPACE_CUTOFF = -700.0
# Adaptive truncation: stop once terms stay below _TAIL_RATIO * max for
# _TAIL_RUN consecutive orders.
_TAIL_RATIO = 1e-14
_TAIL_RUN = 5
_PMF_HARD_CAP = 4096

_CURVE_TAIL = 1e-4
_CURVE_POINTS = 512


class PmfUnderflowError(ArithmeticError):
    """The zero-count probability underflows double precision.

    Raised only when log-space evaluation was explicitly disabled.
    """


@dataclass(frozen=True)
class McpParams:
    """Parameters of an n-dimensional Matern cluster process.

    lambda_p: parent intensity (points per unit n-volume)
    mbar:     mean number of daughters per cluster
    rd:       radius of the cluster ball
    n:        spatial dimension
    """

    lambda_p: float
    mbar: float
    rd: float
    n: int = 2

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n!r}")
        for name in ("lambda_p", "mbar", "rd"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and positive, got {value!r}")
            object.__setattr__(self, name, float(value))

    @property
    def lambda_d(self) -> float:
        """Daughter intensity inside the cluster ball: mbar / (v_n rd^n)."""
        return self.mbar / (unit_ball_volume(self.n) * self.rd**self.n)


@dataclass(frozen=True, eq=False)
class PmfVector:
    """PMF values for orders 0..m_max plus the mass beyond the truncation."""

    probs: np.ndarray
    truncation_mass: float


class CurveKind(str, Enum):
    CONTACT = "contact_cd"
    NND = "nnd"
    PPP_CONTACT = "ppp_cd"
    NND_SMALL_RD_LIMIT = "nnd_small_rd_limit"


@dataclass(frozen=True, eq=False)
class DistributionCurve:
    """A CDF sampled on an ascending radius grid."""

    radii: np.ndarray
    values: np.ndarray
    kind: CurveKind
    k: int
    params: McpParams

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)
        if radii.ndim != 1 or radii.shape != values.shape or radii.size == 0:
            raise ValueError("radii and values must be matching 1-D arrays")
        if np.any(np.diff(radii) <= 0.0):
            raise ValueError("radii must be strictly increasing")
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise ValueError("CDF values must lie in [0, 1]")
        if np.any(np.diff(values) < -1e-9):
            raise ValueError("CDF values must be nondecreasing")


# ---------------------------------------------------------------------------
# PGF of the in-ball count and its Taylor coefficients
# ---------------------------------------------------------------------------


def h_coefficient(r: float, k: int, p: McpParams) -> float:
    """kth Taylor coefficient h_k(r) of the log-PGF exponent at s = 0.

    For k >= 1 this is (lambda_p n v_n / k!) * integral over x in
    [0, r + rd] of (lambda_d A)^k e^(-lambda_d A) x^(n-1), with A the lens
    volume at center separation x.  k = 0 drops the power factor entirely,
    giving the bare integral of e^(-lambda_d A) x^(n-1) times the same
    prefactor.
    """
    if r < 0.0 or not math.isfinite(r):
        raise ValueError(f"radius must be finite and nonnegative, got {r!r}")
    if k < 0:
        raise ValueError(f"order must be nonnegative, got {k!r}")
    return _h(float(r), int(k), p)


@lru_cache(maxsize=1 << 17)
def _h(r: float, k: int, p: McpParams) -> float:
    n = p.n
    v_n = unit_ball_volume(n)
    if r == 0.0:
        # Lens vanishes everywhere, so only k = 0 survives.
        return p.lambda_p * v_n * p.rd**n if k == 0 else 0.0
    ld = p.lambda_d
    rd = p.rd
    if k == 0:

        def f(x: float) -> float:
            return math.exp(-ld * intersection_volume(r, rd, x, n)) * x ** (n - 1)

    else:
        lg = math.lgamma(k + 1)

        def f(x: float) -> float:
            t = ld * intersection_volume(r, rd, x, n)
            if t <= 0.0:
                return 0.0
            # k! folded into the exponent so large orders cannot overflow
            return math.exp(k * math.log(t) - t - lg) * x ** (n - 1)

    res = integrate(f, 0.0, r + rd, breakpoints=(abs(r - rd),), abs_tol=_ABS_TOL, rel_tol=_REL_TOL)
    return p.lambda_p * n * v_n * res.value


def log_pgf_count(s: float, r: float, p: McpParams) -> float:
    """Exponent g(s) of the count PGF E[s^N] = exp(g(s)) for N in B(o, r).

    Evaluated as an expm1 integral, which is algebraically the h_0-style
    integral minus lambda_p v_n (r + rd)^n but free of the cancellation
    between those two terms when the window is much larger than r.
    """
    _check_pgf_args(s, r)
    return _log_pgf(float(s), float(r), p)


@lru_cache(maxsize=1 << 17)
def _log_pgf(s: float, r: float, p: McpParams) -> float:
    if r <= 0.0 or s == 1.0:
        return 0.0
    n = p.n
    ld = p.lambda_d
    rd = p.rd
    c = s - 1.0

    def f(x: float) -> float:
        return n * math.expm1(ld * intersection_volume(r, rd, x, n) * c) * x ** (n - 1)

    res = integrate(f, 0.0, r + rd, breakpoints=(abs(r - rd),), abs_tol=_ABS_TOL, rel_tol=_REL_TOL)
    return p.lambda_p * unit_ball_volume(n) * res.value


def pgf_count(s: float, r: float, p: McpParams) -> float:
    """PGF E[s^N] of the number of points in the ball of radius r."""
    return math.exp(log_pgf_count(s, r, p))


def log_pgf_count_1d(s: float, r: float, p: McpParams) -> float:
    """Closed-form g(s) for dimension one.

    On the line the lens is piecewise linear in the separation, so the
    integral evaluates in closed form:
    2 lambda_p [ |r - rd| e^z - (r + rd) + beta expm1(z)/z ] with
    beta = 2 min(r, rd) and z = lambda_d (s - 1) beta.
    """
    if p.n != 1:
        raise ValueError("closed form is only valid in dimension 1")
    _check_pgf_args(s, r)
    if r <= 0.0 or s == 1.0:
        return 0.0
    beta = 2.0 * min(r, p.rd)
    z = p.lambda_d * (s - 1.0) * beta
    ramp = beta if z == 0.0 else beta * math.expm1(z) / z
    return 2.0 * p.lambda_p * (abs(r - p.rd) * math.exp(z) - (r + p.rd) + ramp)


def pgf_count_1d(s: float, r: float, p: McpParams) -> float:
    return math.exp(log_pgf_count_1d(s, r, p))


def pgf_count_palm(s: float, r: float, p: McpParams) -> float:
    """Count PGF under the reduced Palm distribution.

    The stationary PGF times the radial average of e^((s-1) lambda_d A)
    over the typical point's own cluster-center offset.
    """
    _check_pgf_args(s, r)
    if r <= 0.0 or s == 1.0:
        return 1.0
    n = p.n
    ld = p.lambda_d
    rd = p.rd
    c = s - 1.0

    def f(y: float) -> float:
        return math.exp(c * ld * intersection_volume(r, rd, y, n)) * n * y ** (n - 1) / rd**n

    res = integrate(f, 0.0, rd, breakpoints=(abs(r - rd),), abs_tol=_ABS_TOL, rel_tol=_REL_TOL)
    return pgf_count(s, r, p) * res.value


def _check_pgf_args(s: float, r: float) -> None:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"PGF argument must lie in [0, 1], got {s!r}")
    if r < 0.0 or not math.isfinite(r):
        raise ValueError(f"radius must be finite and nonnegative, got {r!r}")


# ---------------------------------------------------------------------------
# PMF extraction
# ---------------------------------------------------------------------------


def enumerate_partitions(m: int) -> list[tuple[int, ...]]:
    """All multiplicity tuples (b_1, ..., b_m) with sum i * b_i = m.

    Each tuple encodes one integer partition of m by part multiplicities;
    m = 0 yields the single empty tuple (the empty product).
    """
    if m < 0:
        raise ValueError(f"order must be nonnegative, got {m!r}")
    if m == 0:
        return [()]
    out: list[tuple[int, ...]] = []
    b = [0] * m

    def fill(part: int, remaining: int) -> None:
        if remaining == 0:
            out.append(tuple(b))
            return
        if part == 0:
            return
        for count in range(remaining // part, -1, -1):
            b[part - 1] = count
            fill(part - 1, remaining - count * part)
        b[part - 1] = 0

    fill(m, m)
    return out


def count_pmf(
    r: float,
    p: McpParams,
    m_max: int | None = None,
    log_space: bool | None = None,
) -> PmfVector:
    """PMF of the point count in B(o, r), orders 0..m_max.

    Production path: the power-series recurrence m p_m = sum_j j h_j p_(m-j)
    with p_0 = e^(g(0)).  With m_max None the vector is extended until five
    consecutive orders fall below 1e-14 of the running maximum.  When g(0)
    is too negative for p_0 to be representable the recurrence runs on
    log-ratios; pass log_space=False to get PmfUnderflowError instead.
    """
    if r < 0.0 or not math.isfinite(r):
        raise ValueError(f"radius must be finite and nonnegative, got {r!r}")
    if m_max is not None and m_max < 0:
        raise ValueError(f"m_max must be nonnegative, got {m_max!r}")
    r = float(r)
    log_p0 = _log_pgf(0.0, r, p)
    use_log = log_p0 < _LOG_SPACE_CUTOFF if log_space is None else log_space
    if not use_log and log_p0 < _LOG_SPACE_CUTOFF:
        raise PmfUnderflowError(
            f"log P[N=0] = {log_p0:.1f} underflows double precision; "
            "use log_space=True (or the default auto mode)"
        )
    probs = _pmf_recurrence(r, p, m_max, log_p0, use_log)
    return PmfVector(probs, 1.0 - float(probs.sum()))


def _pmf_recurrence(
    r: float, p: McpParams, m_max: int | None, log_p0: float, use_log: bool
) -> np.ndarray:
    if use_log:
        return _pmf_recurrence_log(r, p, m_max, log_p0)
    probs = [math.exp(log_p0)]
    h = [0.0]  # h[0] unused by the recurrence
    peak = probs[0]
    below = 0
    m = 0
    while True:
        if m_max is not None:
            if m == m_max:
                break
        elif m >= _TAIL_RUN and below >= _TAIL_RUN:
            break
        elif m >= _PMF_HARD_CAP:
            raise RuntimeError(f"PMF tail did not decay within {_PMF_HARD_CAP} orders")
        m += 1
        h.append(_h(r, m, p))
        acc = 0.0
        for j in range(1, m + 1):
            acc += j * h[j] * probs[m - j]
        probs.append(acc / m)
        peak = max(peak, probs[m])
        below = below + 1 if probs[m] < _TAIL_RATIO * peak else 0
    return np.asarray(probs)


def _pmf_recurrence_log(r: float, p: McpParams, m_max: int | None, log_p0: float) -> np.ndarray:
    log_t = [0.0]  # log of p_m / p_0
    log_h = [-math.inf]
    peak = 0.0
    below = 0
    m = 0
    while True:
        if m_max is not None:
            if m == m_max:
                break
        elif m >= _TAIL_RUN and below >= _TAIL_RUN:
            break
        elif m >= _PMF_HARD_CAP:
            raise RuntimeError(f"PMF tail did not decay within {_PMF_HARD_CAP} orders")
        m += 1
        h_m = _h(r, m, p)
        log_h.append(math.log(h_m) if h_m > 0.0 else -math.inf)
        terms = [
            math.log(j) + log_h[j] + log_t[m - j]
            for j in range(1, m + 1)
            if log_h[j] > -math.inf and log_t[m - j] > -math.inf
        ]
        log_t.append(float(logsumexp(terms)) - math.log(m) if terms else -math.inf)
        peak = max(peak, log_t[m])
        below = below + 1 if log_t[m] < peak + math.log(_TAIL_RATIO) else 0
    with np.errstate(under="ignore"):
        return np.exp(log_p0 + np.asarray(log_t))


def count_pmf_partition(r: float, p: McpParams, m_max: int) -> PmfVector:
    """PMF via the Faa di Bruno partition sum (cross-validation path).

    P[N=m] = e^(g(0)) * sum over multiplicity tuples of
    prod_i h_i^(b_i) / b_i!.  Cost grows with the partition function, so
    this is only meant for moderate m.
    """
    if r < 0.0 or m_max < 0:
        raise ValueError("radius and m_max must be nonnegative")
    r = float(r)
    base = math.exp(_log_pgf(0.0, r, p))
    h = [0.0] + [_h(r, j, p) for j in range(1, m_max + 1)]
    probs = np.empty(m_max + 1)
    for m in range(m_max + 1):
        acc = 0.0
        for b in enumerate_partitions(m):
            term = 1.0
            for i, b_i in enumerate(b, start=1):
                if b_i:
                    term *= h[i] ** b_i / math.factorial(b_i)
            acc += term
        probs[m] = base * acc
    return PmfVector(probs, 1.0 - float(probs.sum()))


# ---------------------------------------------------------------------------
# Contact distance CDF
# ---------------------------------------------------------------------------


def cdf_contact(r: float, k: int, p: McpParams) -> float:
    """CDF of the kth contact distance: P[at least k points within r]."""
    _check_order(k)
    if r <= 0.0:
        return 0.0
    probs = count_pmf(r, p, m_max=k - 1).probs
    return _clip01(1.0 - float(probs.sum()))


def corollary_contact_cdf(r: float, k: int, p: McpParams) -> float:
    """Explicit low-order contact CDF expressions (k = 1, 2, 3)."""
    if k not in (1, 2, 3):
        raise ValueError("explicit expressions cover k = 1, 2, 3 only")
    if r <= 0.0:
        return 0.0
    e = math.exp(_log_pgf(0.0, float(r), p))
    if k == 1:
        return _clip01(1.0 - e)
    h1 = _h(float(r), 1, p)
    if k == 2:
        return _clip01(1.0 - e * (1.0 + h1))
    h2 = _h(float(r), 2, p)
    return _clip01(1.0 - e * (1.0 + h1) - e * (h2 + h1 * h1 / 2.0))


def ppp_cdf_contact(r: float, k: int, intensity: float, n: int) -> float:
    """kth contact distance CDF of a homogeneous Poisson process."""
    _check_order(k)
    if not math.isfinite(intensity) or intensity <= 0.0:
        raise ValueError(f"intensity must be finite and positive, got {intensity!r}")
    if r <= 0.0:
        return 0.0
    mu = intensity * unit_ball_volume(n) * r**n
    # P[Poisson(mu) >= k] via the regularized lower incomplete gamma.
    return float(gammainc(k, mu))


# ---------------------------------------------------------------------------
# Reduced Palm: intra-cluster weights and nearest-neighbor CDF
# ---------------------------------------------------------------------------


def q_weight(r: float, j: int, p: McpParams) -> float:
    """Probability that exactly j cluster co-members lie within distance r.

    Radial average over the typical point's offset y in the cluster ball:
    (1/j!) integral of (lambda_d A)^j e^(-lambda_d A) n y^(n-1) / rd^n dy.
    """
    if r < 0.0 or not math.isfinite(r):
        raise ValueError(f"radius must be finite and nonnegative, got {r!r}")
    if j < 0:
        raise ValueError(f"order must be nonnegative, got {j!r}")
    return _q(float(r), int(j), p)


@lru_cache(maxsize=1 << 17)
def _q(r: float, j: int, p: McpParams) -> float:
    n = p.n
    rd = p.rd
    if r == 0.0:
        return 1.0 if j == 0 else 0.0
    ld = p.lambda_d
    if j == 0:

        def f(y: float) -> float:
            t = ld * intersection_volume(r, rd, y, n)
            return math.exp(-t) * n * y ** (n - 1) / rd**n

    else:
        lg = math.lgamma(j + 1)

        def f(y: float) -> float:
            t = ld * intersection_volume(r, rd, y, n)
            if t <= 0.0:
                return 0.0
            return math.exp(j * math.log(t) - t - lg) * n * y ** (n - 1) / rd**n

    res = integrate(f, 0.0, rd, breakpoints=(abs(r - rd),), abs_tol=_ABS_TOL, rel_tol=_REL_TOL)
    return res.value


def palm_count_pmf(r: float, p: McpParams, m_max: int | None = None) -> PmfVector:
    """PMF of the in-ball count under the reduced Palm distribution.

    Discrete convolution of the stationary count PMF with the q weights.
    """
    stationary = count_pmf(r, p, m_max=m_max)
    m_top = stationary.probs.size - 1
    q = np.array([q_weight(r, j, p) for j in range(m_top + 1)])
    probs = np.convolve(stationary.probs, q)[: m_top + 1]
    return PmfVector(probs, 1.0 - float(probs.sum()))


def cdf_nnd(r: float, k: int, p: McpParams) -> float:
    """CDF of the kth nearest-neighbor distance of the typical point.

    1 - sum_{i=1..k} q_(k-i)(r) * ccdf_contact_i(r); the convolution with
    the stationary PMF telescopes down to this k-term form.
    """
    _check_order(k)
    if r <= 0.0:
        return 0.0
    probs = count_pmf(r, p, m_max=k - 1).probs
    ccdf = np.cumsum(probs)  # ccdf[i-1] = P[N < i] = 1 - F_{R_i}
    q = np.array([q_weight(r, j, p) for j in range(k)])
    return _clip01(1.0 - float(np.dot(q[::-1], ccdf)))


def corollary_nnd_cdf(r: float, k: int, p: McpParams) -> float:
    """Explicit low-order nearest-neighbor CDF expressions (k = 1, 2, 3)."""
    if k not in (1, 2, 3):
        raise ValueError("explicit expressions cover k = 1, 2, 3 only")
    if r <= 0.0:
        return 0.0
    r = float(r)
    e = math.exp(_log_pgf(0.0, r, p))
    q0 = _q(r, 0, p)
    if k == 1:
        return _clip01(1.0 - e * q0)
    h1 = _h(r, 1, p)
    fbar1 = e
    fbar2 = e * (1.0 + h1)
    q1 = _q(r, 1, p)
    if k == 2:
        return _clip01(1.0 - q1 * fbar1 - q0 * fbar2)
    h2 = _h(r, 2, p)
    fbar3 = e * (1.0 + h1 + h2 + h1 * h1 / 2.0)
    q2 = _q(r, 2, p)
    return _clip01(1.0 - q2 * fbar1 - q1 * fbar2 - q0 * fbar3)


def cdf_nnd_small_rd_limit(r: float, k: int, p: McpParams) -> float:
    """Vanishing-cluster-radius limit of the kth nearest-neighbor CDF.

    1 - e^(-mbar) sum_{i=1..k} mbar^(k-i) ccdf_contact_i(r) / (k-i)!.
    The formula keeps its mass at r = 0 (co-located siblings), so r = 0 is
    deliberately not special-cased to zero.
    """
    _check_order(k)
    if r < 0.0 or not math.isfinite(r):
        raise ValueError(f"radius must be finite and nonnegative, got {r!r}")
    probs = count_pmf(float(r), p, m_max=k - 1).probs
    ccdf = np.cumsum(probs)
    acc = 0.0
    for i in range(1, k + 1):
        acc += p.mbar ** (k - i) / math.factorial(k - i) * ccdf[i - 1]
    return _clip01(1.0 - math.exp(-p.mbar) * acc)


# ---------------------------------------------------------------------------
# Sampled curves
# ---------------------------------------------------------------------------


def _cdf_eval(kind: CurveKind, r: float, k: int, p: McpParams) -> float:
    if kind is CurveKind.CONTACT:
        return cdf_contact(r, k, p)
    if kind is CurveKind.NND:
        return cdf_nnd(r, k, p)
    if kind is CurveKind.PPP_CONTACT:
        return ppp_cdf_contact(r, k, p.lambda_p * p.mbar, p.n)
    return cdf_nnd_small_rd_limit(r, k, p)


def quantile_radius(
    kind: CurveKind, k: int, p: McpParams, tail: float = _CURVE_TAIL
) -> float:
    """Doubling search for the radius where the CDF reaches 1 - tail."""
    _check_order(k)
    # Start from the matching Poisson quantile and double/halve from there.
    mu = float(gammainccinv(k, tail))
    r = (mu / (p.lambda_p * p.mbar * unit_ball_volume(p.n))) ** (1.0 / p.n)
    target = 1.0 - tail
    if _cdf_eval(kind, r, k, p) < target:
        for _ in range(200):
            r *= 2.0
            if _cdf_eval(kind, r, k, p) >= target:
                return r
        raise RuntimeError("doubling search did not reach the CDF tail")
    for _ in range(200):
        if r <= 0.0 or _cdf_eval(kind, r / 2.0, k, p) < target:
            return r
        r /= 2.0
    return r


def distribution_curve(
    kind: CurveKind,
    k: int,
    p: McpParams,
    r_max: float | None = None,
    num: int = _CURVE_POINTS,
) -> DistributionCurve:
    """Sample a CDF on a uniform grid from 0 to r_max.

    With r_max None the grid extends to the radius found by quantile_radius;
    r_max = 0 degenerates to the single point r = 0.
    """
    kind = CurveKind(kind)
    if r_max is None:
        r_max = quantile_radius(kind, k, p)
    if r_max < 0.0:
        raise ValueError(f"r_max must be nonnegative, got {r_max!r}")
    if num < 2:
        raise ValueError(f"grid needs at least 2 points, got {num!r}")
    if r_max == 0.0:
        grid = np.array([0.0])
    else:
        grid = np.linspace(0.0, float(r_max), num)
    values = np.array([_cdf_eval(kind, float(r), k, p) for r in grid])
    return DistributionCurve(grid, values, kind, k, p)


def _check_order(k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")


def _clip01(value: float) -> float:
    return min(1.0, max(0.0, value))
