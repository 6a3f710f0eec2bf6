import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mcpdist import McpParams, ball_volume

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def fig1_params():
    # n=2, lambda_p=2e-5, mbar=5, rd=50: the parameter set used throughout
    # the validation figures.
    return McpParams(lambda_p=2e-5, mbar=5.0, rd=50.0, n=2)


def mc_ball_points(rng, n, radius, size):
    """Uniform points in an n-ball (Gaussian direction, U^(1/n) radius)."""
    g = rng.standard_normal((size, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * rng.random(size) ** (1.0 / n))[:, None]


def mc_lens_volume(rng, r, r_d, x, n, size=200_000):
    """Brute-force lens volume: sample the smaller ball, count hits in the
    other.  Returns (estimate, standard_error)."""
    small, big = (r, r_d) if r <= r_d else (r_d, r)
    pts = mc_ball_points(rng, n, small, size)
    pts[:, 0] -= x
    hits = (pts * pts).sum(axis=1) <= big * big
    frac = float(np.mean(hits))
    vol = ball_volume(small, n)
    return vol * frac, vol * math.sqrt(max(frac * (1.0 - frac), 1e-12) / size)
