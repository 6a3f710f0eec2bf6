"""kth contact and nearest-neighbor distance distributions of n-D Matern
cluster processes, with a Monte Carlo validation harness."""

__version__ = "0.1.0"

from .analytic import (
    CurveKind,
    DistributionCurve,
    McpParams,
    PmfUnderflowError,
    PmfVector,
    cdf_contact,
    cdf_nnd,
    cdf_nnd_small_rd_limit,
    count_pmf,
    distribution_curve,
    enumerate_partitions,
    h_coefficient,
    palm_count_pmf,
    pgf_count,
    pgf_count_palm,
    ppp_cdf_contact,
    q_weight,
    quantile_radius,
)
from .apps import (
    SweepMetric,
    SweepSpec,
    cache_hit_probability,
    connectivity_probability,
    sweep,
)
from .geometry import ball_volume, intersection_volume, unit_ball_volume
from .quadrature import QuadratureError, QuadratureResult, integrate
from .simulator import (
    CensoringError,
    EmpiricalCdf,
    SimConfig,
    kth_distances,
    ks_distance,
    sample_mcp,
    sample_mcp_palm,
    sample_uniform_ball,
    simulate_kth_distances,
    validate_against_analytic,
)

__all__ = [
    "CensoringError",
    "CurveKind",
    "DistributionCurve",
    "EmpiricalCdf",
    "McpParams",
    "PmfUnderflowError",
    "PmfVector",
    "QuadratureError",
    "QuadratureResult",
    "SimConfig",
    "SweepMetric",
    "SweepSpec",
    "__version__",
    "ball_volume",
    "cache_hit_probability",
    "cdf_contact",
    "cdf_nnd",
    "cdf_nnd_small_rd_limit",
    "connectivity_probability",
    "count_pmf",
    "distribution_curve",
    "enumerate_partitions",
    "h_coefficient",
    "integrate",
    "intersection_volume",
    "ks_distance",
    "kth_distances",
    "palm_count_pmf",
    "pgf_count",
    "pgf_count_palm",
    "ppp_cdf_contact",
    "q_weight",
    "quantile_radius",
    "sample_mcp",
    "sample_mcp_palm",
    "sample_uniform_ball",
    "simulate_kth_distances",
    "sweep",
    "unit_ball_volume",
    "validate_against_analytic",
]
