"""Exact n-ball and two-ball intersection (lens) volumes.

Every distribution in this package reduces to one-dimensional integrals
whose kernel is the volume of the intersection of two n-balls.  The
general-n lens is assembled from two hyperspherical caps split at the
radical hyperplane; dimensions 1-3 use closed forms.
"""

from __future__ import annotations

import math

from scipy.special import betainc

__all__ = ["unit_ball_volume", "ball_volume", "intersection_volume"]


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in n dimensions: pi^(n/2) / Gamma(n/2 + 1).

    Evaluated through the two-step recurrence v_n = (2 pi / n) v_(n-2),
    which is exact in floating point for the low dimensions used most.
    """
    _check_dimension(n)
    if n % 2 == 0:
        volume, start = 1.0, 2
    else:
        volume, start = 2.0, 3
    for i in range(start, n + 1, 2):
        volume *= 2.0 * math.pi / i
    return volume


def ball_volume(radius: float, n: int) -> float:
    """Volume of an n-ball of the given radius."""
    return unit_ball_volume(n) * radius**n


def intersection_volume(r: float, r_d: float, x: float, n: int) -> float:
    """Volume of B(o, r) intersected with a ball of radius r_d centered x away.

    Piecewise: the smaller ball's volume when one ball contains the other
    (x <= |r - r_d|), zero when they are disjoint (x >= r + r_d), and the
    sum of the two hyperspherical caps cut off by the radical hyperplane in
    between.  When the radical plane lies beyond one center the cap exceeds
    a hemisphere and is evaluated as ball minus complementary cap, keeping
    the incomplete-beta argument inside [0, 1].
    """
    _check_dimension(n)
    if not (math.isfinite(r) and math.isfinite(r_d) and math.isfinite(x)):
        raise ValueError("lens arguments must be finite")
    if r < 0.0 or x < 0.0 or r_d <= 0.0:
        raise ValueError(f"invalid lens geometry: r={r}, r_d={r_d}, x={x}")

    if r == 0.0 or x >= r + r_d:
        return 0.0
    if x <= abs(r - r_d):
        return ball_volume(min(r, r_d), n)
    if n == 1:
        return r + r_d - x

    # Cap heights measured from the radical hyperplane.  The
    # difference-of-squares product form avoids the cancellation that the
    # naive (x^2 + r^2 - r_d^2)/(2x) offset suffers when one ball is tiny
    # next to the other; heights above the ball radius mean the cap
    # exceeds a hemisphere, which every formula below handles directly.
    h1 = (r_d - x + r) * (r_d + x - r) / (2.0 * x)
    h2 = (r + r_d - x) * (r + x - r_d) / (2.0 * x)
    return _cap_volume(r, h1, n) + _cap_volume(r_d, h2, n)


def _cap_volume(radius: float, height: float, n: int) -> float:
    # Hyperspherical cap of the given height, 0 <= height <= 2 * radius.
    h = min(max(height, 0.0), 2.0 * radius)
    if n == 2:
        # Circular segment: (R^2/2)(theta - sin theta) rearranged so only
        # well-conditioned atan2/sqrt evaluations appear.
        a = radius - h
        s = math.sqrt(h * (2.0 * radius - h))
        return radius * radius * math.atan2(s, a) - s * a
    if n == 3:
        return math.pi * h * h * (3.0 * radius - h) / 3.0
    z = h * (2.0 * radius - h) / (radius * radius)
    half = 0.5 * ball_volume(radius, n) * float(betainc((n + 1) / 2, 0.5, min(z, 1.0)))
    if h <= radius:
        return half
    return ball_volume(radius, n) - half


def _check_dimension(n: int) -> None:
    if not isinstance(n, (int,)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
