"""
Property-based tests for the kernel and the series layer.
"""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from dunklsb.core.kernel import (
    dunkl_kernel,
    gamma_factor,
    gamma_ratio,
    kernel_bound_margin,
    rank_one_series,
)
from dunklsb.core.series import CoeffSeries, dilate_series, evaluate
from dunklsb.models import MultiplicitySetup

multiplicities = st.floats(min_value=0.0, max_value=5.0, allow_nan=False)
coordinates = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)
complex_numbers = st.builds(complex, coordinates, coordinates)


@settings(max_examples=50, deadline=None)
@given(k=multiplicities, z=complex_numbers, w=complex_numbers)
def test_symmetry(k, z, w):
    """E_k(z, w) = E_k(w, z)."""
    setup = MultiplicitySetup.of(k)
    assert abs(dunkl_kernel(setup, [z], [w]) - dunkl_kernel(setup, [w], [z])) <= 1e-12 * math.exp(abs(z) * abs(w))


@settings(max_examples=50, deadline=None)
@given(z=complex_numbers, w=complex_numbers)
def test_k_zero_is_exponential(z, w):
    """E_0(z, w) = e^(zw)."""
    setup = MultiplicitySetup.of(0.0)
    assert abs(dunkl_kernel(setup, [z], [w]) - np.exp(z * w)) <= 1e-12 * math.exp(abs(z) * abs(w))


@settings(max_examples=50, deadline=None)
@given(x=st.floats(min_value=0.05, max_value=4.0))
def test_e1_closed_form(x):
    """E_1(x) = sinh x / x + (x cosh x - sinh x) / x^2."""
    closed = math.sinh(x) / x + (x * math.cosh(x) - math.sinh(x)) / x**2
    assert math.isclose(rank_one_series(1.0, x).real, closed, rel_tol=1e-11)


@settings(max_examples=50, deadline=None)
@given(k=multiplicities, z=complex_numbers, w=complex_numbers)
def test_bound(k, z, w):
    """|E_k(z, w)| <= e^(|z||w|)."""
    setup = MultiplicitySetup.of(k)
    assert kernel_bound_margin(setup, [z], [w]) >= -1e-12 * math.exp(abs(z) * abs(w))


@given(k=multiplicities, n=st.integers(min_value=1, max_value=60))
def test_gamma_ratio(k, n):
    """gamma_n(k) / gamma_(n-1)(k) = n + 2k [n odd]."""
    ratio = gamma_factor(k, n) / gamma_factor(k, n - 1)
    assert math.isclose(ratio, gamma_ratio(k, n), rel_tol=1e-10)


@given(
    coeffs=st.lists(coordinates, min_size=4, max_size=4),
    lam=st.floats(min_value=-1.5, max_value=1.5),
    z=coordinates,
)
def test_dilation(coeffs, lam, z):
    """D_lam f(z) = f(lam z) for a cubic polynomial."""
    s = CoeffSeries(np.array(coeffs))
    assert abs(evaluate(dilate_series(s, lam), [z]) - evaluate(s, [lam * z])) <= 1e-12
