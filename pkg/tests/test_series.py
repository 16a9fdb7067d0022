"""
Tests for truncated Taylor series.
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dunklsb.core.series import (
    CoeffSeries,
    dilate_series,
    evaluate,
    from_rank_one,
    g_inverse,
    g_map,
    gaussian_multiply,
    multi_index_norms,
)
from dunklsb.errors import DimensionMismatchError
from dunklsb.models import MultiplicitySetup


def exp_series(dim, degree):
    """Truncation of e^(z_1 + ... + z_N)."""
    one = np.array([1.0 / math.factorial(n) for n in range(degree + 1)])
    return from_rank_one([one] * dim)


class TestCoeffSeries:
    """Tests for construction and arithmetic."""

    def test_cube_required(self):
        """Test that non-cubic coefficient arrays are rejected."""
        with pytest.raises(ValueError):
            CoeffSeries(np.zeros((3, 4)))

    def test_monomial(self):
        """Test a monomial and its evaluation."""
        s = CoeffSeries.monomial((1, 2), 4, 3.0)

        assert s.dim == 2
        assert s.degree == 4
        assert_allclose(evaluate(s, [2.0, 1.0j]), -6.0)

    def test_monomial_outside_cap(self):
        """Test that a monomial above the degree cap is rejected."""
        with pytest.raises(ValueError):
            CoeffSeries.monomial((5,), 4)

    def test_arithmetic(self):
        """Test addition, subtraction and scaling."""
        a = CoeffSeries.monomial((1,), 3, 2.0)
        b = CoeffSeries.constant(1, 3, 1.0)

        assert_allclose(evaluate(a + b, [0.5]), 2.0)
        assert_allclose(evaluate(a - b, [0.5]), 0.0)
        assert_allclose(evaluate(a.scaled(1j), [0.5]), 1j)
        assert (a - a).max_abs_difference(CoeffSeries.zeros(1, 3)) == 0.0

    def test_incompatible(self):
        """Test that series of different shapes cannot be combined."""
        with pytest.raises(DimensionMismatchError):
            CoeffSeries.zeros(1, 3) + CoeffSeries.zeros(1, 4)

    def test_with_degree(self):
        """Test padding and truncation; truncation feeds the tail flag."""
        s = CoeffSeries(np.array([1.0, -2.0, 3.0, 0.5]))

        padded = s.with_degree(6)
        assert padded.degree == 6
        assert padded.tail_flag == 0.0
        truncated = s.with_degree(1)
        assert truncated.degree == 1
        assert_allclose(truncated.tail_flag, 3.5)

    def test_evaluate_exponential(self):
        """Test the exponential series in one and two variables."""
        assert_allclose(evaluate(exp_series(1, 30), [1.0]), math.e, rtol=1e-14)
        assert_allclose(
            evaluate(exp_series(2, 30), [0.5, -0.3 + 0.2j]),
            np.exp(0.2 + 0.2j),
            rtol=1e-14,
        )

    def test_evaluate_many_points(self):
        """Test evaluation over a leading axis."""
        z = np.array([[0.0], [1.0], [-1.0]])
        values = evaluate(exp_series(1, 30), z)
        assert values.shape == (3,)
        assert_allclose(values, np.exp(z[:, 0]), rtol=1e-14)

    def test_evaluate_dimension(self):
        """Test that points of the wrong dimension are rejected."""
        with pytest.raises(DimensionMismatchError):
            evaluate(exp_series(2, 5), [1.0])

    def test_from_rank_one(self):
        """Test a tensor product series."""
        s = from_rank_one([np.array([1.0, 2.0]), np.array([0.0, 1.0, 1.0])])
        assert s.coeffs.shape == (3, 3)
        assert_allclose(evaluate(s, [1.0, 2.0]), 3.0 * 6.0)

    def test_multi_index_norms(self):
        """Test |n| over the coefficient cube."""
        assert np.array_equal(multi_index_norms(2, 2), [[0, 1, 2], [1, 2, 3], [2, 3, 4]])


class TestGaussianMultiply:
    """Tests for multiplication by e^(a z^2)."""

    def test_matches_exponential(self):
        """Test that 1 * e^(a z^2) evaluates to the exponential."""
        s = gaussian_multiply(CoeffSeries.constant(1, 30), 0.5)
        assert_allclose(evaluate(s, [0.7]), np.exp(0.5 * 0.49), rtol=1e-14)

    def test_two_variables(self):
        """Test the holomorphic square in two variables."""
        s = gaussian_multiply(exp_series(2, 30), -0.25)
        z = np.array([0.4, -0.6j])
        assert_allclose(evaluate(s, z), np.exp(np.sum(z) - 0.25 * np.sum(z * z)), rtol=1e-13)

    def test_tail_flag(self):
        """Test that the discarded part of the product is recorded."""
        s = gaussian_multiply(CoeffSeries.constant(1, 4), 1.0)
        assert_allclose(s.tail_flag, 1.0 / 6.0 + 1.0 / 24.0)

    def test_zero_exponent(self):
        """Test that a = 0 is the identity."""
        s = exp_series(1, 5)
        assert gaussian_multiply(s, 0.0) is s


class TestGMap:
    """Tests for dilation and the maps G, G^-1."""

    def test_dilate(self):
        """Test D_lam f(z) = f(lam z)."""
        s = dilate_series(exp_series(1, 30), 2.0)
        assert_allclose(evaluate(s, [0.5]), math.e, rtol=1e-14)

    def test_g_map_value(self):
        """Test Gf(w) = 2^(gamma/2 + N/4) f(2w) e^(w^2/t) on f = 1."""
        setup = MultiplicitySetup.of(1.0, 2.0)
        s = g_map(setup, CoeffSeries.constant(1, 30))
        assert_allclose(evaluate(s, [0.3]), 2.0**0.75 * np.exp(0.09 / 2.0), rtol=1e-14)

    def test_inverse(self):
        """Test G^-1 G = 1 coefficientwise."""
        setup = MultiplicitySetup.of((0.5, 1.5), 1.0)
        s = exp_series(2, 12)
        back = g_inverse(setup, g_map(setup, s))
        assert back.max_abs_difference(s) < 1e-12

    def test_dimension(self):
        """Test that a series of the wrong dimension is rejected."""
        with pytest.raises(DimensionMismatchError):
            g_map(MultiplicitySetup.of(1.0), CoeffSeries.constant(2, 4))
