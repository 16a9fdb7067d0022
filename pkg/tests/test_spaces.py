"""
Tests for L^2(omega), the B-space and the C-space.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from dunklsb.core.quadrature import gauss_rule_1d
from dunklsb.core.series import CoeffSeries, evaluate, g_inverse
from dunklsb.core.spaces import (
    SpaceKind,
    SpaceTag,
    b_inner,
    b_kernel,
    b_monomial_norms,
    basis_indices,
    c_basis,
    c_coordinates,
    c_inner,
    c_kernel,
    dilation_l2,
    gs_orthonormal_basis,
    hermite_basis,
    hermite_function_values,
    l2_inner,
    l2_norm,
    orthonormal_polynomials,
    space_inner,
)
from dunklsb.errors import DimensionMismatchError
from dunklsb.models import MultiplicitySetup


def gram(inner, functions):
    return np.array([[inner(f, g) for g in functions] for f in functions])


class TestL2:
    """Tests for the Hermite basis of L^2(omega)."""

    def test_basis_indices(self):
        """Test the ordering of multi-indices."""
        assert basis_indices(2, 2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
        assert basis_indices(1, 3) == [(0,), (1,), (2,), (3,)]

    def test_orthonormal_one_dimension(self, setup_k1, rule_k1):
        """Test <h_m, h_n> = delta_mn."""
        basis = hermite_basis(setup_k1, 8, rule_k1)
        g = gram(lambda f, h: l2_inner(setup_k1, f, h, rule_k1), basis)
        assert_allclose(g, np.eye(9), atol=1e-12)

    def test_orthonormal_two_dimensions(self, setup_2d, rule_2d):
        """Test orthonormality of the tensor Hermite functions."""
        basis = hermite_basis(setup_2d, 4, rule_2d)
        g = gram(lambda f, h: l2_inner(setup_2d, f, h, rule_2d), basis)
        assert_allclose(g, np.eye(len(basis_indices(2, 4))), atol=1e-12)

    def test_orthonormal_polynomials(self, setup_k1, rule_k1):
        """Test that p_n are orthonormal for the Gaussian-weighted measure the rule integrates."""
        polys = orthonormal_polynomials(setup_k1, 6)
        values = np.array([p(rule_k1.nodes) for p in polys])
        g = (values.conj() * rule_k1.weights) @ values.T

        assert [p.label for p in polys] == [f"p{n}" for n in basis_indices(1, 6)]
        assert_allclose(g, np.eye(7), atol=1e-12)

    def test_function_values_table(self, setup_2d):
        """Test that the table of values agrees with the basis functions."""
        q = np.array([[0.3, -1.2], [2.0, 0.5]])
        table = hermite_function_values(setup_2d, 3, q)
        basis = hermite_basis(setup_2d, 3)
        for row, h in zip(table, basis):
            assert_allclose(row, h(q).real, rtol=1e-13)

    def test_rule_too_small(self, setup_k1):
        """Test that a rule which cannot resolve the basis is rejected."""
        with pytest.raises(ValueError):
            hermite_basis(setup_k1, 8, gauss_rule_1d(1.0, 1.0, 8))

    def test_rule_for_other_k(self, setup_k1, rule_k0):
        """Test that a rule for another multiplicity is rejected."""
        with pytest.raises(ValueError):
            hermite_basis(setup_k1, 4, rule_k0)

    def test_dilation_unitary(self, setup_k1):
        """Test that the L^2 dilation preserves the norm."""
        lam = 1.5
        h = hermite_basis(setup_k1, 3)[3]
        rule = gauss_rule_1d(1.0, 1.0 / lam**2, 40)
        assert_allclose(l2_norm(setup_k1, dilation_l2(setup_k1, lam, h), rule), 1.0, rtol=1e-12)

    def test_dilation_factor(self, setup_k1):
        """Test that a nonpositive factor is rejected."""
        with pytest.raises(ValueError):
            dilation_l2(setup_k1, 0.0, hermite_basis(setup_k1, 0)[0])


class TestBSpace:
    """Tests for the Segal-Bargmann space B."""

    def test_monomial_norms(self):
        """Test ||z^n||^2 = t^n gamma_n(k)."""
        setup = MultiplicitySetup.of(1.0, 2.0)
        assert_allclose(b_monomial_norms(setup, 3), [1.0, 6.0, 24.0, 240.0], rtol=1e-13)

    def test_reproducing(self):
        """Test <K_z, f> = f(z) for a polynomial."""
        setup = MultiplicitySetup.of((0.5, 1.5), 1.5)
        coeffs = np.zeros((6, 6), dtype=complex)
        coeffs[0, 0], coeffs[2, 1], coeffs[1, 3] = 1.0, 2.0 - 1.0j, 0.5j
        f = CoeffSeries(coeffs)
        z = np.array([0.4 + 0.3j, -1.1])
        assert_allclose(b_inner(setup, b_kernel(setup, z, 5), f), evaluate(f, z), rtol=1e-13)

    def test_gram_schmidt_monomials(self):
        """Test that Gram-Schmidt in B only normalizes the monomials."""
        setup = MultiplicitySetup.of(0.0, 1.0)
        basis = gs_orthonormal_basis(setup, SpaceTag(SpaceKind.B, setup), 4, degree=10)
        norms = b_monomial_norms(setup, 10)
        for n, e in enumerate(basis):
            expected = CoeffSeries.monomial((n,), 10, 1.0 / np.sqrt(norms[n]))
            assert e.max_abs_difference(expected) < 1e-14

    def test_dimension(self):
        """Test that series of the wrong dimension are rejected."""
        setup = MultiplicitySetup.of(1.0)
        with pytest.raises(DimensionMismatchError):
            b_inner(setup, CoeffSeries.zeros(2, 3), CoeffSeries.zeros(2, 3))


class TestCSpace:
    """Tests for the space C = G^-1 B."""

    def test_kernel_at_origin(self, setup_k1):
        """Test <L_0, L_0> = 2^-(gamma+N/2)."""
        l0 = c_kernel(setup_k1, [0.0], 40)
        assert_allclose(c_inner(setup_k1, l0, l0), 2.0**-setup_k1.homogeneity, rtol=1e-12)

    def test_reproducing(self, setup_k1):
        """Test <L_z, f>_C = f(z)."""
        poly = CoeffSeries.monomial((3,), 40) + CoeffSeries.constant(1, 40, 2.0)
        f = g_inverse(setup_k1, poly)
        z = np.array([0.6 + 0.3j])
        value = c_inner(setup_k1, c_kernel(setup_k1, z, 40), f)
        assert_allclose(value, evaluate(f, z), rtol=1e-10)

    def test_basis_orthonormal(self, setup_2d):
        """Test that the closed-form C basis is orthonormal."""
        basis = c_basis(setup_2d, 3, 24)
        g = gram(lambda f, h: c_inner(setup_2d, f, h), basis)
        assert_allclose(g, np.eye(len(basis)), atol=1e-10)

    def test_gram_schmidt_matches_closed_form(self, setup_k1):
        """Test that Gram-Schmidt on damped monomials gives the closed-form basis."""
        found = gs_orthonormal_basis(setup_k1, SpaceTag(SpaceKind.C, setup_k1), 5, degree=30)
        expected = c_basis(setup_k1, 5, 30)
        for e, f in zip(found, expected):
            assert e.max_abs_difference(f) < 1e-10

    def test_coordinates(self, setup_k1):
        """Test that the coordinates of a basis element are a unit vector."""
        basis = c_basis(setup_k1, 4, 30)
        assert_allclose(np.abs(c_coordinates(setup_k1, basis[2], 4)), [0, 0, 1, 0, 0], atol=1e-12)

    def test_no_l2_gram_schmidt(self, setup_k1):
        """Test that L^2 has no coefficient inner product."""
        with pytest.raises(ValueError):
            space_inner(SpaceTag(SpaceKind.L2, setup_k1))
