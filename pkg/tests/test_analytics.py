"""
Gaussian analytics tests
Run with: pytest tests/test_analytics.py -v
"""
import math

import pytest
from scipy import integrate

from app.analytics import (
    SQRT_2_OVER_PI,
    analytics_table,
    big_b,
    big_g,
    breakdown_curve,
    breakdown_threshold,
    dense_lower_bound_constant,
    eta0,
    eta0_closed_form,
    expected_gap_per_sample,
    inv_erf,
    uniform_recovery_margin,
    mean_abs_moment,
    sample_complexity_bound,
    sparse_lower_bound_margin,
    std_normal_cdf,
    std_normal_quantile,
    tail_moments_p,
    tail_threshold,
)
from app.analytics.schemas import AnalyticsTable
from app.core.exceptions import DomainError

GRID = [i / 100 for i in range(101)]


class TestSpecialFunctions:
    """Φ, Φ⁻¹ and erf⁻¹"""

    def test_cdf_values(self):
        assert std_normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
        assert std_normal_cdf(1.17741) == pytest.approx(0.8805, abs=1e-4)
        assert std_normal_cdf(-3.0) + std_normal_cdf(3.0) == pytest.approx(1.0, abs=1e-14)

    def test_cdf_rejects_non_finite(self):
        with pytest.raises(DomainError):
            std_normal_cdf(math.nan)

    def test_quantile_inverts_cdf(self):
        for p in (1e-10, 0.001, 0.1, 0.5, 0.8805, 0.999):
            assert std_normal_cdf(std_normal_quantile(p)) == pytest.approx(p, abs=1e-10)
        assert std_normal_quantile(0.5) == 0.0
        assert std_normal_quantile(0.8805) == pytest.approx(1.17741, abs=1e-4)
        assert std_normal_quantile(0.2) == pytest.approx(-std_normal_quantile(0.8), abs=1e-14)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            std_normal_quantile(p)

    def test_inv_erf(self):
        assert inv_erf(0.0) == 0.0
        assert inv_erf(0.5) == pytest.approx(0.476936, abs=1e-6)
        assert inv_erf(-0.3) == pytest.approx(-inv_erf(0.3), abs=1e-15)
        for y in (-0.999, -0.5, 0.1, 0.9, 0.999999):
            assert math.erf(inv_erf(y)) == pytest.approx(y, abs=1e-10)

    @pytest.mark.parametrize("y", [1.0, -1.0, 2.0])
    def test_inv_erf_domain(self, y):
        with pytest.raises(DomainError):
            inv_erf(y)

    def test_tail_threshold_endpoints(self):
        assert tail_threshold(0.0) == math.inf
        assert tail_threshold(1.0) == 0.0
        assert tail_threshold(0.05) == pytest.approx(1.959964, abs=1e-6)


class TestTailMasses:
    """B(γ), G(γ) and η₀"""

    def test_endpoints(self):
        assert big_b(0.0) == 0.0
        assert big_b(1.0) == pytest.approx(0.797885, abs=1e-6)
        assert big_g(0.0) == pytest.approx(SQRT_2_OVER_PI, abs=1e-15)
        assert big_g(1.0) == 0.0

    def test_partition_identity_on_grid(self):
        for gamma in GRID:
            assert big_g(gamma) + big_b(gamma) == pytest.approx(SQRT_2_OVER_PI, abs=1e-10)

    def test_half(self):
        assert big_b(0.5) == pytest.approx(0.635553, abs=1e-6)
        assert big_g(0.5) == pytest.approx(0.162331, abs=1e-6)

    def test_monotone(self):
        inner = GRID[1:-1]
        for a, b in zip(inner, inner[1:]):
            assert big_b(b) > big_b(a)
            assert big_g(b) < big_g(a)

    def test_closed_form_matches_quadrature(self):
        for gamma in GRID[1:-1]:
            t = tail_threshold(gamma)
            tail, _ = integrate.quad(lambda z: 2.0 * z * math.exp(-z * z / 2.0) / math.sqrt(2 * math.pi), t, math.inf)
            assert big_b(gamma) == pytest.approx(tail, abs=1e-9)

    def test_range_check(self):
        with pytest.raises(DomainError):
            big_b(1.5)
        with pytest.raises(DomainError):
            big_g(-0.1)

    def test_eta0(self):
        value = eta0()
        assert 0.2385 <= value <= 0.2395
        assert value == pytest.approx(0.23906, abs=5e-4)
        assert value == pytest.approx(eta0_closed_form(), abs=1e-8)
        assert value == pytest.approx(2.0 * (1.0 - std_normal_cdf(math.sqrt(2.0 * math.log(2.0)))), abs=1e-8)
        assert abs(big_g(value) - big_b(value)) <= 1e-8
        assert big_b(value) == pytest.approx(0.398942, abs=1e-6)

    def test_expected_gap_sign(self):
        assert expected_gap_per_sample(0.1) > 0.0
        assert expected_gap_per_sample(0.3) < 0.0


class TestMoments:
    """p-th moment tails and the ℓp breakdown curve"""

    def test_mean_abs_moment(self):
        assert mean_abs_moment(1.0) == pytest.approx(SQRT_2_OVER_PI, abs=1e-15)
        assert mean_abs_moment(2.0) == pytest.approx(1.0, abs=1e-14)

    def test_p1_matches_closed_form(self):
        for gamma in (0.05, 0.239, 0.5, 0.9):
            g, b = tail_moments_p(gamma, 1.0)
            assert g == pytest.approx(big_g(gamma), abs=1e-9)
            assert b == pytest.approx(big_b(gamma), abs=1e-9)

    def test_empty_tail(self):
        g, b = tail_moments_p(0.0, 0.5)
        assert g == pytest.approx(mean_abs_moment(0.5), abs=1e-12)
        assert b == 0.0

    def test_sum_is_full_moment(self):
        g, b = tail_moments_p(0.3, 0.5)
        full, _ = integrate.quad(lambda z: 2.0 * z ** 0.5 * math.exp(-z * z / 2.0) / math.sqrt(2 * math.pi), 0, math.inf)
        assert g + b == pytest.approx(full, abs=1e-8)

    @pytest.mark.parametrize("p", [0.0, 1.5, -1.0])
    def test_exponent_domain(self, p):
        with pytest.raises(DomainError):
            tail_moments_p(0.1, p)

    def test_breakdown_threshold(self):
        assert breakdown_threshold(1.0) == pytest.approx(eta0(), abs=1e-6)
        assert breakdown_threshold(0.05) > 0.45
        assert eta0() < breakdown_threshold(0.5) < 0.5

    def test_breakdown_strictly_decreasing(self):
        curve = breakdown_curve([i / 10 for i in range(1, 11)])
        values = [value for _, value in curve]
        assert all(b < a for a, b in zip(values, values[1:]))


class TestTable:
    """AnalyticsTable construction and CSV form"""

    def test_table_csv(self):
        table = analytics_table([0.0, 0.1, 0.5], 1.0)
        lines = table.to_csv().splitlines()
        assert lines[0] == "gamma,p,g,b"
        assert len(lines) == 4
        assert lines[1].startswith("0,1,")

    def test_table_p_half(self):
        table = analytics_table([0.1, 0.2], 0.5)
        assert table.p == 0.5
        assert all(g > 0 for g in table.g_values)

    def test_table_rejects_unsorted_grid(self):
        with pytest.raises(ValueError):
            AnalyticsTable(grid=[0.2, 0.1], p=1.0, g_values=[big_g(0.2), big_g(0.1)], b_values=[big_b(0.2), big_b(0.1)])

    def test_table_rejects_broken_identity(self):
        with pytest.raises(ValueError):
            AnalyticsTable(grid=[0.1], p=1.0, g_values=[0.1], b_values=[0.1])


class TestCalculators:
    """Lower-bound margins and the sample-size formula"""

    def test_sparse_margin_sign(self):
        assert sparse_lower_bound_margin(0.30, 0.01) > 0.0
        assert sparse_lower_bound_margin(0.15, 0.01) < 0.0

    def test_dense_constant(self):
        value = dense_lower_bound_constant(0.1)
        assert value == pytest.approx(big_g(eta0() - 0.05) - 0.1, abs=1e-12)
        assert value > 0.0

    def test_uniform_recovery_margin(self):
        assert uniform_recovery_margin(0.1, 0.01, 100.0) > 0.0
        with pytest.raises(DomainError):
            uniform_recovery_margin(0.1, 0.01, 1.0)

    def test_sample_complexity_grows_with_k(self):
        assert sample_complexity_bound(8, 512, 2.0, 0.1) < sample_complexity_bound(16, 512, 2.0, 0.1)
        with pytest.raises(DomainError):
            sample_complexity_bound(0, 512, 2.0, 0.1)
