"""Network metrics built on the distance distributions.

k-connectivity for macro-diversity (can a user reach at least k base
stations within range R?) and cache-hit probability for D2D networks
(does a typical device see at least k neighbors within range R?), with
cluster-radius sweeps at constant mean cluster size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .analytic import McpParams, cdf_contact, cdf_nnd, ppp_cdf_contact, unit_ball_volume

__all__ = [
    "SweepMetric",
    "SweepRow",
    "SweepSpec",
    "cache_hit_probability",
    "connectivity_probability",
    "sweep",
]


class SweepMetric(str, Enum):
    CONNECTIVITY = "connectivity"
    CACHE_HIT = "cache_hit"


@dataclass(frozen=True)
class SweepSpec:
    """A cluster-radius sweep at fixed parent intensity and mean cluster size."""

    base: McpParams
    rd_grid: tuple[float, ...]
    connect_range: float
    k_values: tuple[int, ...]
    include_ppp_reference: bool = True

    def __post_init__(self):
        object.__setattr__(self, "rd_grid", tuple(float(r) for r in self.rd_grid))
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        if not self.rd_grid or any(r <= 0.0 for r in self.rd_grid):
            raise ValueError("rd_grid must be nonempty and positive")
        if any(b >= a for b, a in zip(self.rd_grid, self.rd_grid[1:])):
            raise ValueError("rd_grid must be strictly increasing")
        if not math.isfinite(self.connect_range) or self.connect_range <= 0.0:
            raise ValueError("connect_range must be finite and positive")
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ValueError("k_values must be positive integers")


@dataclass(frozen=True)
class SweepRow:
    rd: float  # inf marks the PPP reference row
    k: int
    value: float


def connectivity_probability(R: float, k: int, p: McpParams) -> float:
    """Probability of reaching at least k stations within range R."""
    if not math.isfinite(R) or R <= 0.0:
        raise ValueError(f"range must be finite and positive, got {R!r}")
    return cdf_contact(R, k, p)


def cache_hit_probability(R: float, k: int, p: McpParams) -> float:
    """Probability that a typical node sees at least k neighbors within R."""
    if not math.isfinite(R) or R <= 0.0:
        raise ValueError(f"range must be finite and positive, got {R!r}")
    return cdf_nnd(R, k, p)


def sweep(spec: SweepSpec, metric: SweepMetric, hold: str = "mbar") -> list[SweepRow]:
    """Evaluate a metric across the cluster-radius grid.

    By default mbar is held fixed, so the daughter intensity rescales as
    mbar / (v_n rd^n) at every grid point; hold="lambda_d" instead keeps
    the base daughter intensity and lets mbar grow with the cluster.
    PPP reference rows (rd = inf, density lambda_p * mbar) are appended
    when requested, and rows come out sorted by (rd, k).
    """
    metric = SweepMetric(metric)
    if hold not in ("mbar", "lambda_d"):
        raise ValueError(f"hold must be 'mbar' or 'lambda_d', got {hold!r}")
    base = spec.base
    rows: list[SweepRow] = []
    for rd in spec.rd_grid:
        if hold == "mbar":
            params = replace(base, rd=rd)
        else:
            mbar = base.lambda_d * unit_ball_volume(base.n) * rd**base.n
            params = replace(base, rd=rd, mbar=mbar)
        for k in spec.k_values:
            if metric is SweepMetric.CONNECTIVITY:
                value = connectivity_probability(spec.connect_range, k, params)
            else:
                value = cache_hit_probability(spec.connect_range, k, params)
            rows.append(SweepRow(rd, k, value))
    if spec.include_ppp_reference:
        density = base.lambda_p * base.mbar
        for k in spec.k_values:
            rows.append(
                SweepRow(math.inf, k, ppp_cdf_contact(spec.connect_range, k, density, base.n))
            )
    rows.sort(key=lambda row: (row.rd, row.k))
    return rows
