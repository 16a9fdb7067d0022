"""
Integral operators between L^2(omega_{mu,t}) and the holomorphic spaces.

Transform outputs are CoeffSeries. By default their coefficients come from the
generating function

    e^(-z^2/2t) E_k(zq/t) = sum_n P_n(q) z^n / (t^n gamma_n(k)),

with P_n the monic orthogonal polynomials of nu_{k,t}, so each coefficient is
one quadrature of psi against an orthonormal polynomial. The raw moment
pipeline (moments, diagonal division, Gaussian convolution) is kept as
method="moments"; it loses digits to cancellation at high degree.
"""

import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from dunklsb.core.coxeter import mms_constant
from dunklsb.core.kernel import (
    dunkl_kernel,
    heat_kernel,
    log_heat_kernel_real,
    rank_one_imag,
)
from dunklsb.core.quadrature import QuadratureRule, orthonormal_polynomial_values
from dunklsb.core.series import (
    CoeffSeries,
    dilate_series,
    evaluate,
    gaussian_multiply,
)
from dunklsb.core.spaces import (
    SampledFunction,
    b_monomial_norms,
    dilation_l2,
    log_omega_weights,
)
from dunklsb.errors import NumericalWarning, QuadratureError, UnsupportedParameterError
from dunklsb.models.results import DiagramReport, KernelIdentityReport
from dunklsb.models.setup import MultiplicitySetup

METHODS = ("recurrence", "moments")

# headroom between the degree cap and the rule order
ORDER_HEADROOM = 10


def _square(z: NDArray) -> NDArray:
    return np.sum(z * z, axis=-1)


def a_kernel(setup: MultiplicitySetup, z: ArrayLike, q: ArrayLike):
    """A_{mu,t}(z, q) = e^(-z^2/2t - q^2/4t) E_mu(z/sqrt(t), q/sqrt(t))."""
    z = np.asarray(z, dtype=complex)
    q = np.asarray(q, dtype=float)
    t = setup.t
    return np.exp(-_square(z) / (2.0 * t) - _square(q) / (4.0 * t)) * dunkl_kernel(setup, z, q / t)


def c_integral_kernel(setup: MultiplicitySetup, z: ArrayLike, q: ArrayLike):
    """C_{mu,t}(z, q) = rho_{mu,t}(z, q)."""
    return heat_kernel(setup, z, q, setup.t)


def _einsum_box(weighted: NDArray, tables: Sequence[NDArray]) -> NDArray:
    letters = "abcdefgh"[: len(tables)]
    spec = "i," + ",".join(f"{c}i" for c in letters) + "->" + letters
    return np.einsum(spec, weighted, *tables, optimize=True)


def _weighted_samples(
    setup: MultiplicitySetup, psi: SampledFunction, rule: QuadratureRule, damping: float
) -> NDArray:
    """omega_i e^(-damping q_i^2 / t) psi(q_i), with zero weights kept exactly zero."""
    log_w = log_omega_weights(setup, rule) - damping * _square(rule.nodes) / setup.t
    weights = np.exp(log_w)
    values = psi(rule.nodes)
    bad = np.flatnonzero(~np.isfinite(values) & (weights > 0))
    if bad.size:
        index = int(bad[0])
        raise QuadratureError(f"{psi.label or 'integrand'} not finite at node {index}", node_index=index)
    return np.where(weights > 0, weights * np.nan_to_num(values), 0.0)


def _project(
    setup: MultiplicitySetup,
    psi: SampledFunction,
    rule: QuadratureRule,
    degree: int,
    damping: float,
    method: str,
) -> CoeffSeries:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    if rule.order < degree + ORDER_HEADROOM:
        warnings.warn(
            f"rule of order {rule.order} for degree cap {degree}; "
            f"high coefficients are not integrated exactly",
            NumericalWarning,
            stacklevel=3,
        )
    weighted = _weighted_samples(setup, psi, rule, damping)
    norms = b_monomial_norms(setup, degree)
    if method == "recurrence":
        tables = [
            orthonormal_polynomial_values(kj, setup.t, degree, rule.nodes[:, j])
            for j, kj in enumerate(setup.k)
        ]
        return CoeffSeries(_einsum_box(weighted, tables) / np.sqrt(norms))
    powers = np.arange(degree + 1)[:, None]
    tables = [rule.nodes[:, j][None, :] ** powers for j in range(setup.N)]
    raw = CoeffSeries(_einsum_box(weighted, tables) / norms)
    return gaussian_multiply(raw, -1.0 / (2.0 * setup.t))


def transform_A(
    setup: MultiplicitySetup,
    psi: SampledFunction,
    rule: QuadratureRule,
    degree: int,
    method: str = "recurrence",
) -> CoeffSeries:
    """
    The Segal-Bargmann transform A_{mu,t} psi as a Taylor series.

    Args:
        setup: multiplicity context
        psi: function in L^2(omega_{mu,t})
        rule: quadrature rule with the multiplicities of setup
        degree: per-variable degree cap D of the output
        method: "recurrence" (orthogonal polynomials) or "moments"

    Returns:
        Coefficients of z -> int d omega(q) A(z, q) psi(q)
    """
    return _project(setup, psi, rule, degree, 0.25, method)


def transform_C(
    setup: MultiplicitySetup,
    psi: SampledFunction,
    rule: QuadratureRule,
    degree: int,
    method: str = "recurrence",
) -> CoeffSeries:
    """C_{mu,t} psi(z) = int d omega(q) rho_{mu,t}(z, q) psi(q) as a Taylor series."""
    return _project(setup, psi, rule, degree, 0.5, method)


def transform_pointwise(
    setup: MultiplicitySetup,
    psi: SampledFunction,
    rule: QuadratureRule,
    z: ArrayLike,
    kind: str = "C",
) -> NDArray:
    """Direct quadrature of A psi or C psi at each point z, without a series."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    weights = np.exp(log_omega_weights(setup, rule))
    values = np.where(weights > 0, weights * psi(rule.nodes), 0.0)
    zz = z[:, None, :]
    qq = rule.nodes[None, :, :]
    if kind == "A":
        kernel = a_kernel(setup, zz, qq)
    elif kind == "C":
        kernel = c_integral_kernel(setup, zz, qq)
    else:
        raise ValueError(f"kind must be 'A' or 'C', got {kind!r}")
    return np.asarray(kernel) @ values


def heat_apply(
    setup: MultiplicitySetup, s: float, psi: SampledFunction, rule: QuadratureRule
) -> SampledFunction:
    """
    e^(s Delta_mu / 2) psi(x) = int d omega_{mu,s}(q) rho_{mu,s}(x, q) psi(q).

    The kernel is evaluated on the real Bessel path in log form, so far nodes
    neither overflow nor produce nan.
    """
    if s <= 0:
        raise ValueError(f"heat time must be positive, got {s}")
    at_s = setup.at_time(s)
    log_w = log_omega_weights(at_s, rule)
    live = np.isfinite(log_w)
    nodes = rule.nodes[live]
    log_w = log_w[live]
    samples = psi(nodes)

    def evaluator(x: NDArray) -> NDArray:
        log_kernel = log_heat_kernel_real(at_s, x[:, None, :], nodes[None, :, :], s)
        return np.exp(log_kernel + log_w[None, :]) @ samples

    return SampledFunction(evaluator, label=f"heat[{s:g}]{psi.label}")


def heat_gaussian(setup: MultiplicitySetup, a: float, s: float) -> SampledFunction:
    """
    Closed form of the heat flow of a Gaussian:
    e^(s Delta_mu / 2) e^(-a x^2) = (1 + 2as)^-(gamma+N/2) e^(-a x^2 / (1 + 2as)).
    """
    if a <= 0 or s < 0:
        raise ValueError(f"need a > 0 and s >= 0, got a={a}, s={s}")
    spread = 1.0 + 2.0 * a * s
    amplitude = spread ** (-setup.homogeneity)

    def evaluator(x: NDArray) -> NDArray:
        return amplitude * np.exp(-a * np.sum(x**2, axis=-1) / spread)

    return SampledFunction(evaluator, label=f"heat[{s:g}]gauss[{a:g}]")


def gaussian_function(a: float) -> SampledFunction:
    """e^(-a x^2)."""

    def evaluator(x: NDArray) -> NDArray:
        return np.exp(-a * np.sum(x**2, axis=-1))

    return SampledFunction(evaluator, label=f"gauss[{a:g}]")


def dunkl_transform(
    setup: MultiplicitySetup, s: float, phi: SampledFunction, rule: QuadratureRule
) -> SampledFunction:
    """
    F_{mu,s} phi(x) = int d omega_{mu,s}(q) E_mu(-ix/sqrt(s), q/sqrt(s)) phi(q).

    The kernel is evaluated on the imaginary axis through Bessel functions.
    """
    at_s = setup.at_time(s)
    weights = np.exp(log_omega_weights(at_s, rule))
    live = weights > 0
    nodes = rule.nodes[live]
    weighted = weights[live] * phi(nodes)

    def evaluator(x: NDArray) -> NDArray:
        kernel = np.ones((x.shape[0], nodes.shape[0]), dtype=complex)
        for j, kj in enumerate(setup.k):
            kernel = kernel * rank_one_imag(kj, -np.multiply.outer(x[:, j], nodes[:, j]) / s)
        return kernel @ weighted

    return SampledFunction(evaluator, label=f"dunkl[{s:g}]{phi.label}")


def restrict(s: CoeffSeries) -> SampledFunction:
    """The restriction R: the series evaluated on R^N."""

    def evaluator(x: NDArray) -> NDArray:
        return np.asarray(evaluate(s, x.astype(complex)))

    return SampledFunction(evaluator, label="R")


def restrict_adjoint(
    setup: MultiplicitySetup,
    psi: SampledFunction,
    rule2t: QuadratureRule,
    degree: int,
    method: str = "recurrence",
) -> CoeffSeries:
    """R* psi(z) = int d omega_{mu,2t}(q) rho_{mu,2t}(z, q) psi(q), i.e. C at time 2t."""
    return transform_C(setup.at_time(2.0 * setup.t), psi, rule2t, degree, method)


def _half_homogeneity(setup: MultiplicitySetup) -> float:
    return setup.gamma / 2.0 + setup.N / 4.0


def f1_op(setup: MultiplicitySetup, psi: SampledFunction) -> SampledFunction:
    """F1 psi(x) = 2^-(gamma/2+N/4) psi(x/sqrt(2)), unitary on L^2(omega_{mu,t})."""
    return dilation_l2(setup, 2.0**-0.5, psi)


def f1_adjoint(setup: MultiplicitySetup, psi: SampledFunction) -> SampledFunction:
    """F1* = F1^-1: psi -> 2^(gamma/2+N/4) psi(sqrt(2) x)."""
    return dilation_l2(setup, 2.0**0.5, psi)


def f2_op(setup: MultiplicitySetup, s: CoeffSeries) -> CoeffSeries:
    """F2 f(z) = 2^(gamma/2+N/4) e^(z^2/2t) f(sqrt(2) z), from C_{mu,t} onto B_{mu,t}."""
    dilated = dilate_series(s, 2.0**0.5)
    return gaussian_multiply(dilated, 1.0 / (2.0 * setup.t)).scaled(2.0 ** _half_homogeneity(setup))


def f2_adjoint(setup: MultiplicitySetup, s: CoeffSeries) -> CoeffSeries:
    """F2* = F2^-1: g -> 2^-(gamma/2+N/4) e^(-z^2/4t) g(z/sqrt(2))."""
    dilated = dilate_series(s, 2.0**-0.5)
    return gaussian_multiply(dilated, -1.0 / (4.0 * setup.t)).scaled(2.0 ** -_half_homogeneity(setup))


def not_restriction_op(setup: MultiplicitySetup, f: CoeffSeries) -> SampledFunction:
    """F1 R F2* f(x) = 2^-(gamma+N/2) e^(-x^2/8t) f(x/2)."""
    scale = 2.0 ** (-setup.homogeneity)

    def evaluator(x: NDArray) -> NDArray:
        damping = np.exp(-np.sum(x**2, axis=-1) / (8.0 * setup.t))
        return scale * damping * np.asarray(evaluate(f, (x / 2.0).astype(complex)))

    return SampledFunction(evaluator, label="F1RF2*")


def sbso_adjoint(setup: MultiplicitySetup, f: CoeffSeries) -> SampledFunction:
    """
    S* f(x) = c_mu^(-1/2) e^(-x^2/2) f(x).

    Raises:
        UnsupportedParameterError: unless t = 1
    """
    if setup.t != 1.0:
        raise UnsupportedParameterError(f"S* is only defined for t = 1, got t = {setup.t}")
    scale = mms_constant(setup) ** -0.5

    def evaluator(x: NDArray) -> NDArray:
        damping = np.exp(-np.sum(x**2, axis=-1) / 2.0)
        return scale * damping * np.asarray(evaluate(f, x.astype(complex)))

    return SampledFunction(evaluator, label="S*")


def _probe_grid(setup: MultiplicitySetup) -> Tuple[NDArray, NDArray]:
    """A 5 x 5 grid of (z, q) pairs with all coordinates equal."""
    re = np.linspace(-1.0, 1.0, 5)
    z_vals = re + 0.5j * re[::-1]
    q_vals = np.linspace(-1.5, 1.5, 5)
    zz, qq = np.meshgrid(z_vals, q_vals, indexing="ij")
    z = np.repeat(zz.reshape(-1, 1), setup.N, axis=1)
    q = np.repeat(qq.reshape(-1, 1), setup.N, axis=1)
    return z, q


def _relative(lhs: ArrayLike, rhs: ArrayLike) -> float:
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-300)))


def diagram_check(
    setup: MultiplicitySetup,
    psi: SampledFunction,
    rule: QuadratureRule,
    degree: int,
    sample_points: Optional[ArrayLike] = None,
) -> DiagramReport:
    """
    Compare A psi with F2 C F1* psi and check the kernel relations
    C(sqrt(2) z, q) = e^(-z^2/2t) A(z, sqrt(2) q) and A_{lam^2 t}(lam z, lam q) = A_t(z, q).

    Coefficients are compared up to total degree D/2, where the sqrt(2)
    dilation inside F2 has not yet amplified quadrature noise.
    """
    direct = transform_A(setup, psi, rule, degree)
    composed = f2_op(setup, transform_C(setup, f1_adjoint(setup, psi), rule, degree))
    low = np.indices(direct.coeffs.shape).sum(axis=0) <= degree // 2
    scale = max(float(np.max(np.abs(direct.coeffs))), 1e-300)
    coeff_err = float(np.max(np.abs(direct.coeffs - composed.coeffs)[low])) / scale
    if sample_points is None:
        sample_points = np.array([[0.3 + 0.2j], [-0.7 + 0.5j], [1.1 - 0.4j]]) * np.ones(setup.N)
    points = np.asarray(sample_points, dtype=complex)
    point_err = _relative(evaluate(composed, points), evaluate(direct, points))

    z, q = _probe_grid(setup)
    root2 = np.sqrt(2.0)
    lhs = c_integral_kernel(setup, root2 * z, q)
    rhs = np.exp(-_square(z) / (2.0 * setup.t)) * a_kernel(setup, z, root2 * q)
    ca_err = _relative(lhs, rhs)
    scaled = a_kernel(setup.at_time(2.0 * setup.t), root2 * z, root2 * q)
    scaling_err = _relative(scaled, a_kernel(setup, z, q))
    return DiagramReport(
        max_coeff_err=coeff_err,
        max_point_err=point_err,
        ca_relation_err=ca_err,
        scaling_err=scaling_err,
    )


def kernel_identities_check(
    setup: MultiplicitySetup,
    grid: Sequence[Tuple[ArrayLike, ArrayLike]],
    rule: QuadratureRule,
) -> KernelIdentityReport:
    """
    Relative errors over (z, w) pairs of

      A(z, q) = rho(z, q) / rho(0, q)^(1/2)                 (q = Re w)
      K(z, w) = int d omega(q) rho(w, q) conj(rho(z, q)) / rho(q, 0)
      K(z, w) = rho(z*, w) / (rho(z*, 0) rho(0, w))

    where K(z, w) = E_mu(z*/sqrt(t), w/sqrt(t)) is the B kernel.
    """
    t = setup.t
    zero = np.zeros(setup.N)
    weights = np.exp(log_omega_weights(setup, rule))
    live = weights > 0
    nodes = rule.nodes[live]
    weights = weights[live]
    a_err = k_int_err = k_rho_err = 0.0
    for z, w in grid:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        q = w.real
        rho_zq = heat_kernel(setup, z, q, t)
        rho_0q = heat_kernel(setup, zero, q, t)
        a_err = max(a_err, _relative(a_kernel(setup, z, q), rho_zq / np.sqrt(rho_0q)))

        target = dunkl_kernel(setup, np.conj(z) / t, w)
        integrand = (
            heat_kernel(setup, w[None, :], nodes, t)
            * np.conj(heat_kernel(setup, z[None, :], nodes, t))
            / np.exp(-_square(nodes) / (2.0 * t))
        )
        k_int_err = max(k_int_err, _relative(np.sum(weights * integrand), target))

        zs = np.conj(z)
        ratio = heat_kernel(setup, zs, w, t) / (heat_kernel(setup, zs, zero, t) * heat_kernel(setup, zero, w, t))
        k_rho_err = max(k_rho_err, _relative(ratio, target))
    return KernelIdentityReport(
        a_from_rho_err=a_err,
        b_kernel_integral_err=k_int_err,
        b_kernel_rho_err=k_rho_err,
        points=len(grid),
    )
