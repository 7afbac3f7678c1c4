"""Distribution-function tests against closed forms and scipy."""

import math

import numpy as np
import pytest
from scipy.stats import chi2, norm

from tariffglm import (
    DomainError,
    chi_square_quantile,
    chi_square_sf,
    standard_normal_sf,
)


class TestChiSquareSF:
    def test_reference_values(self):
        # frozen from scipy.stats.chi2.sf
        assert chi_square_sf(41.93, 46) == pytest.approx(0.6433506242568285, abs=1e-12)
        assert chi_square_sf(43.755, 47) == pytest.approx(0.6077625099645646, abs=1e-12)
        assert chi_square_sf(44.94, 49) == pytest.approx(0.6383855283958594, abs=1e-12)

    def test_df2_closed_form(self):
        # for two degrees of freedom the tail is exp(-x/2)
        x = 2 * math.log(2)
        assert chi_square_sf(x, 2) == pytest.approx(0.5, abs=1e-14)
        for x in (0.1, 1.0, 7.3, 40.0):
            assert chi_square_sf(x, 2) == pytest.approx(math.exp(-x / 2), abs=1e-13)

    def test_against_scipy_over_contract_domain(self):
        worst = 0.0
        for df in (1, 2, 3, 4, 5, 7, 10, 20, 46, 50, 100, 150, 200):
            for x in (1e-3, 0.1, 0.5, 1, 2, 5, 10, 20, 50, 100, 199, 201, 500, 1000):
                worst = max(worst, abs(chi_square_sf(x, df) - chi2.sf(x, df)))
        assert worst <= 1e-10

    def test_even_df_poisson_sum_closed_form(self):
        for df in range(2, 61, 2):
            k = df // 2
            for x in (0.1, 1.0, 5.0, 10.0, 25.0, 60.0, 120.0):
                t = x / 2.0
                closed = math.exp(-t) * sum(t**j / math.factorial(j) for j in range(k))
                assert chi_square_sf(x, df) == pytest.approx(closed, abs=1e-10)

    def test_at_zero_and_monotone(self):
        for df in (1, 3, 10, 60):
            assert chi_square_sf(0.0, df) == 1.0
            xs = np.linspace(0.01, 200, 300)
            values = [chi_square_sf(x, df) for x in xs]
            assert all(a >= b for a, b in zip(values, values[1:]))
            # strictly decreasing wherever 1 - sf is representable
            interior = [v for v in values if v < 1.0 - 1e-15]
            assert all(a > b for a, b in zip(interior, interior[1:]))
            assert len(interior) > 200

    def test_domain(self):
        with pytest.raises(DomainError):
            chi_square_sf(-0.1, 4)
        with pytest.raises(DomainError):
            chi_square_sf(1.0, 0)


class TestChiSquareQuantile:
    def test_reference_values(self):
        # frozen from inverting the survival function (scipy.stats.chi2.isf)
        assert chi_square_quantile(0.05, 1) == pytest.approx(3.8414588206941285, abs=1e-8)
        assert chi_square_quantile(0.05, 4) == pytest.approx(9.487729036781158, abs=1e-8)

    def test_df2_closed_form(self):
        assert chi_square_quantile(0.5, 2) == pytest.approx(2 * math.log(2), abs=1e-8)

    def test_round_trip_with_sf(self):
        for df in range(1, 61):
            for alpha in (0.01, 0.05, 0.5, 0.95):
                x = chi_square_quantile(alpha, df)
                assert abs(chi_square_sf(x, df) - alpha) <= 1e-7

    def test_domain(self):
        with pytest.raises(DomainError):
            chi_square_quantile(0.0, 3)
        with pytest.raises(DomainError):
            chi_square_quantile(1.0, 3)
        with pytest.raises(DomainError):
            chi_square_quantile(0.05, 0)


class TestStandardNormalSF:
    def test_center(self):
        assert standard_normal_sf(0.0) == 0.5

    def test_reference_tail_values(self):
        assert 2 * standard_normal_sf(4.809) == pytest.approx(1.51e-06, abs=2e-8)
        assert 2 * standard_normal_sf(1.350) == pytest.approx(0.1771, abs=1e-4)

    def test_against_scipy(self):
        for z in np.linspace(-8, 8, 161):
            assert abs(standard_normal_sf(z) - norm.sf(z)) <= 1e-12

    def test_symmetry(self):
        for z in (0.1, 1.0, 2.5, 6.0):
            assert standard_normal_sf(z) + standard_normal_sf(-z) == pytest.approx(
                1.0, abs=1e-14
            )
