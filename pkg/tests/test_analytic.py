import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcpdist import (
    McpParams,
    PmfUnderflowError,
    cdf_contact,
    count_pmf,
    enumerate_partitions,
    h_coefficient,
    pgf_count,
    ppp_cdf_contact,
    unit_ball_volume,
)
from mcpdist.analytic import (
    corollary_contact_cdf,
    count_pmf_partition,
    log_pgf_count,
    log_pgf_count_1d,
    pgf_count_1d,
)

LINE = McpParams(lambda_p=0.1, mbar=1.0, rd=1.0, n=1)  # lambda_d = 0.5


def closed_form_g_1d(s, r, lambda_p, lambda_d, rd):
    """Independent transcription of the 1-D closed-form exponent."""
    beta = 2.0 * min(r, rd)
    z = lambda_d * (s - 1.0) * beta
    tail = beta if z == 0.0 else (math.exp(z) - 1.0) / (lambda_d * (s - 1.0))
    return 2.0 * lambda_p * (abs(r - rd) * math.exp(z) - (r + rd) + tail)


class TestParams:
    def test_lambda_d_accessor(self):
        p = McpParams(lambda_p=2e-5, mbar=5.0, rd=50.0, n=2)
        assert p.lambda_d == pytest.approx(5.0 / (math.pi * 2500.0), rel=1e-15)
        assert LINE.lambda_d == 0.5

    def test_validation(self):
        with pytest.raises(ValueError):
            McpParams(lambda_p=0.0, mbar=1.0, rd=1.0, n=2)
        with pytest.raises(ValueError):
            McpParams(lambda_p=1.0, mbar=-1.0, rd=1.0, n=2)
        with pytest.raises(ValueError):
            McpParams(lambda_p=1.0, mbar=1.0, rd=math.inf, n=2)
        with pytest.raises(ValueError):
            McpParams(lambda_p=1.0, mbar=1.0, rd=1.0, n=0)


class TestHCoefficients:
    def test_zero_radius(self):
        p = McpParams(lambda_p=0.3, mbar=2.0, rd=1.5, n=2)
        assert h_coefficient(0.0, 1, p) == 0.0
        assert h_coefficient(0.0, 3, p) == 0.0
        # k = 0 integrand degenerates to x^(n-1)
        assert h_coefficient(0.0, 0, p) == pytest.approx(
            0.3 * unit_ball_volume(2) * 1.5**2, rel=1e-12
        )

    def test_h0_line_closed_form(self):
        # oracle: g(0) + lambda_p * v_1 * (r + rd) from the closed form
        oracle = closed_form_g_1d(0.0, 2.0, 0.1, 0.5, 1.0) + 2.0 * 0.1 * 3.0
        value = h_coefficient(2.0, 0, LINE)
        assert value == pytest.approx(oracle, abs=1e-9)
        assert value == pytest.approx(0.32642411176571153, abs=1e-12)  # frozen

    def test_invalid(self):
        with pytest.raises(ValueError):
            h_coefficient(-1.0, 0, LINE)
        with pytest.raises(ValueError):
            h_coefficient(1.0, -1, LINE)


class TestPgf:
    def test_trivial_values(self):
        p = McpParams(lambda_p=0.02, mbar=3.0, rd=2.0, n=3)
        assert pgf_count(1.0, 7.0, p) == 1.0
        assert pgf_count(0.4, 0.0, p) == 1.0

    def test_line_closed_form(self):
        for s in (0.0, 0.3, 0.7, 1.0):
            for r in (0.4, 2.0):  # r < rd and r > rd
                oracle = closed_form_g_1d(s, r, 0.1, 0.5, 1.0)
                assert log_pgf_count(s, r, LINE) == pytest.approx(oracle, abs=1e-9)
                assert log_pgf_count_1d(s, r, LINE) == pytest.approx(oracle, abs=1e-12)
        assert pgf_count_1d(0.3, 2.0, LINE) == pytest.approx(
            pgf_count(0.3, 2.0, LINE), abs=1e-9
        )

    def test_closed_form_rejects_other_dimensions(self):
        with pytest.raises(ValueError):
            log_pgf_count_1d(0.5, 1.0, McpParams(0.1, 1.0, 1.0, 2))

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            pgf_count(1.5, 1.0, LINE)
        with pytest.raises(ValueError):
            pgf_count(0.5, -1.0, LINE)


class TestPartitions:
    def test_low_orders(self):
        assert enumerate_partitions(0) == [()]
        assert set(enumerate_partitions(1)) == {(1,)}
        assert set(enumerate_partitions(2)) == {(2, 0), (0, 1)}

    def test_count_matches_brute_force(self):
        # oracle: exhaustive scan over all bounded tuples
        def brute(m):
            if m == 0:
                return 1
            count = 0
            tuples = [[]]
            for i in range(1, m + 1):
                tuples = [t + [b] for t in tuples for b in range(m // i + 1)]
            for t in tuples:
                if sum(i * b for i, b in enumerate(t, start=1)) == m:
                    count += 1
            return count

        for m in range(0, 9):
            parts = enumerate_partitions(m)
            assert len(parts) == brute(m)
            assert len(set(parts)) == len(parts)
        assert len(enumerate_partitions(4)) == 5  # partition number p(4)

    @given(m=st.integers(min_value=0, max_value=12))
    def test_tuples_satisfy_weight_identity(self, m):
        for b in enumerate_partitions(m):
            assert len(b) == m
            assert all(b_i >= 0 for b_i in b)
            assert sum(i * b_i for i, b_i in enumerate(b, start=1)) == m


class TestCountPmf:
    def test_empty_ball(self):
        p = McpParams(lambda_p=0.2, mbar=2.0, rd=1.0, n=2)
        pmf = count_pmf(0.0, p, m_max=4)
        assert pmf.probs[0] == 1.0
        assert np.all(pmf.probs[1:] == 0.0)

    def test_vanishing_parent_intensity(self):
        p = McpParams(lambda_p=1e-12, mbar=5.0, rd=1.0, n=2)
        pmf = count_pmf(3.0, p, m_max=2)
        assert pmf.probs[0] == pytest.approx(1.0, abs=1e-6)

    def test_validity_and_truncation(self, fig1_params):
        pmf = count_pmf(60.0, fig1_params)
        assert np.all(pmf.probs >= 0.0)
        assert np.all(pmf.probs <= 1.0)
        assert pmf.truncation_mass == pytest.approx(0.0, abs=1e-9)
        assert -1e-9 <= pmf.truncation_mass
        # truncation mass shrinks with m_max
        masses = [count_pmf(60.0, fig1_params, m_max=m).truncation_mass for m in (5, 10, 20)]
        assert masses[0] >= masses[1] >= masses[2]
        # the stated parameter point keeps less than 1e-6 beyond order 40
        assert count_pmf(60.0, fig1_params, m_max=40).truncation_mass < 1e-6

    def test_pgf_consistency(self, fig1_params):
        pmf = count_pmf(60.0, fig1_params)
        assert pmf.truncation_mass < 1e-8
        for s in (0.0, 0.25, 0.5, 0.75):
            series = float(sum(pr * s**m for m, pr in enumerate(pmf.probs)))
            assert pgf_count(s, 60.0, fig1_params) == pytest.approx(series, abs=1e-6)

    def test_partition_sum_matches_recurrence(self):
        for lam_p in (1e-5, 1e-4, 1e-3):
            for mbar in (1.0, 5.0, 10.0):
                p = McpParams(lambda_p=lam_p, mbar=mbar, rd=50.0, n=2)
                rec = count_pmf(75.0, p, m_max=12).probs
                fdb = count_pmf_partition(75.0, p, 12).probs
                rel = np.abs(rec - fdb) / np.maximum(np.maximum(rec, fdb), 1e-300)
                assert float(rel.max()) < 1e-10

    def test_log_space_matches_linear(self, fig1_params):
        lin = count_pmf(60.0, fig1_params, m_max=12, log_space=False).probs
        log = count_pmf(60.0, fig1_params, m_max=12, log_space=True).probs
        np.testing.assert_allclose(log, lin, rtol=1e-12)

    def test_underflow_signal_and_log_space_rescue(self):
        # log P[N=0] ~ -800, far below the double-precision floor
        p = McpParams(lambda_p=350.0, mbar=0.2, rd=0.2, n=2)
        with pytest.raises(PmfUnderflowError):
            count_pmf(2.0, p, m_max=3, log_space=False)
        pmf = count_pmf(2.0, p)  # auto log-space
        assert np.all(np.isfinite(pmf.probs))
        assert pmf.truncation_mass == pytest.approx(0.0, abs=1e-9)
        # Campbell: the expected count in B(o, r) is lambda_p mbar v_n r^n
        mean = float(np.dot(np.arange(pmf.probs.size), pmf.probs))
        assert mean == pytest.approx(350.0 * 0.2 * math.pi * 4.0, rel=1e-9)


class TestContactCdf:
    def test_zero_radius(self, fig1_params):
        for k in (1, 2, 5):
            assert cdf_contact(0.0, k, fig1_params) == 0.0

    def test_first_order_formula(self, fig1_params):
        # k = 1 must reduce to 1 - exp(h_0 - lambda_p v_n (r + rd)^n)
        for r in (20.0, 60.0, 150.0):
            h0 = h_coefficient(r, 0, fig1_params)
            window = fig1_params.lambda_p * unit_ball_volume(2) * (r + 50.0) ** 2
            assert cdf_contact(r, 1, fig1_params) == pytest.approx(
                1.0 - math.exp(h0 - window), abs=1e-9
            )
            assert cdf_contact(r, 1, fig1_params) == pytest.approx(
                1.0 - pgf_count(0.0, r, fig1_params), abs=1e-12
            )

    def test_corollary_cross_check(self, fig1_params):
        params = [
            fig1_params,
            McpParams(lambda_p=0.05, mbar=2.0, rd=1.0, n=2),
            McpParams(lambda_p=0.02, mbar=3.0, rd=2.0, n=3),
        ]
        for p in params:
            top = 5.0 * p.rd
            for r in np.linspace(0.0, top, 25):
                for k in (1, 2, 3):
                    assert cdf_contact(r, k, p) == pytest.approx(
                        corollary_contact_cdf(r, k, p), abs=1e-12
                    )

    def test_monotone_in_radius_and_order(self, fig1_params):
        grid = np.linspace(0.0, 250.0, 40)
        for k in (1, 2, 3, 4):
            vals = [cdf_contact(r, k, fig1_params) for r in grid]
            assert all(b - a >= -1e-12 for a, b in zip(vals, vals[1:]))
        for r in (30.0, 90.0, 200.0):
            by_k = [cdf_contact(r, k, fig1_params) for k in range(1, 7)]
            assert all(b - a <= 1e-12 for a, b in zip(by_k, by_k[1:]))

    def test_rejects_bad_order(self, fig1_params):
        with pytest.raises(ValueError):
            cdf_contact(1.0, 0, fig1_params)


class TestPppCdf:
    def test_trivial(self):
        assert ppp_cdf_contact(0.0, 3, 1.0, 2) == 0.0
        assert ppp_cdf_contact(1.0, 1, 1.0, 2) == pytest.approx(
            1.0 - math.exp(-math.pi), rel=1e-12
        )

    def test_matches_direct_poisson_sum(self):
        for lam, r, n in ((0.5, 2.0, 2), (3.0, 1.0, 3)):
            mu = lam * unit_ball_volume(n) * r**n
            for k in (1, 2, 5):
                direct = 1.0 - sum(math.exp(-mu) * mu**m / math.factorial(m) for m in range(k))
                assert ppp_cdf_contact(r, k, lam, n) == pytest.approx(direct, abs=1e-12)
