"""
The three Hilbert spaces: L^2(omega_{mu,t}), the Segal-Bargmann space B_{mu,t}
and the space C_{mu,t} of holomorphic functions with <f, g>_C = <Gf, Gg>_B
at time t/2.

B is realized through its diagonal monomial norms
||z^n||^2 = s^|n| prod_j gamma_{n_j}(k_j), which is the inner product forced
by the kernel K_{mu,s}(z, w) = E_mu(z*/sqrt(s), w/sqrt(s)).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from dunklsb.core.kernel import log_gamma_factor
from dunklsb.core.quadrature import (
    QuadratureRule,
    integrate,
    orthonormal_polynomial_values,
    tensor_orthonormal_values,
)
from dunklsb.core.series import CoeffSeries, from_rank_one, g_map, gaussian_multiply
from dunklsb.errors import DimensionMismatchError, RankDeficiencyError
from dunklsb.models.setup import MultiplicitySetup

# Gram-Schmidt pivots below this are treated as numerical rank loss
PIVOT_FLOOR = 1e-12


@dataclass(frozen=True)
class SampledFunction:
    """
    A function on R^N known through its values.

    The evaluator receives points of shape (M, N) and returns M complex values.
    """

    evaluator: Callable[[NDArray], ArrayLike]
    label: str = ""

    def __call__(self, q: ArrayLike) -> NDArray:
        q = np.atleast_2d(np.asarray(q, dtype=float))
        return np.asarray(self.evaluator(q), dtype=complex).reshape(q.shape[0])


class SpaceKind(str, Enum):
    L2 = "L2"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class SpaceTag:
    """Which space, with the setup whose time parameter the space uses."""

    which: SpaceKind
    setup: MultiplicitySetup


def basis_indices(dim: int, max_deg: int) -> List[Tuple[int, ...]]:
    """Multi-indices with |n| <= max_deg, by total degree then lexicographically."""
    grid = np.indices((max_deg + 1,) * dim).reshape(dim, -1).T
    keep = [tuple(int(v) for v in row) for row in grid if row.sum() <= max_deg]
    return sorted(keep, key=lambda n: (sum(n), n))


def _check_rule(setup: MultiplicitySetup, rule: QuadratureRule) -> None:
    if rule.dim != setup.N:
        raise DimensionMismatchError(f"rule of dimension {rule.dim} for setup with N={setup.N}")
    if tuple(rule.k) != tuple(setup.k):
        raise ValueError(f"rule built for k={rule.k}, setup has k={setup.k}")


def log_omega_weights(setup: MultiplicitySetup, rule: QuadratureRule) -> NDArray:
    """
    Log of the effective weights of d omega_{mu,t} on the nodes of a rule for nu_{mu,t_r}.

    d omega_t = (t_r/t)^(gamma+N/2) e^(q^2/2t_r) d nu_{t_r}; the product is
    formed in log space so that tiny weights at far nodes do not meet an
    overflowing Gaussian.
    """
    _check_rule(setup, rule)
    with np.errstate(divide="ignore"):
        log_w = (
            np.log(rule.weights)
            + np.sum(rule.nodes**2, axis=-1) / (2.0 * rule.t)
            + setup.homogeneity * np.log(rule.t / setup.t)
        )
    return log_w


def omega_weights(setup: MultiplicitySetup, rule: QuadratureRule) -> NDArray:
    return np.exp(log_omega_weights(setup, rule))


def l2_inner(
    setup: MultiplicitySetup,
    f: SampledFunction,
    g: SampledFunction,
    rule: QuadratureRule,
) -> complex:
    """
    <f, g> in L^2(omega_{mu,t}), anti-linear in f.

    Exact when f* g e^(-q^2/2t_r) is a polynomial of degree < 2 * rule.order.
    """
    weights = omega_weights(setup, rule)
    fv = f(rule.nodes)
    gv = g(rule.nodes)
    values = np.conj(fv) * gv
    # zero weights at far nodes must not turn overflowed values into nan
    values = np.where(weights > 0, values, 0.0)
    lifted = QuadratureRule(
        dim=rule.dim, nodes=rule.nodes, weights=weights, order=rule.order, k=rule.k, t=rule.t
    )
    return integrate(lifted, lambda _: values)


def l2_norm(setup: MultiplicitySetup, f: SampledFunction, rule: QuadratureRule) -> float:
    return float(np.sqrt(max(l2_inner(setup, f, f, rule).real, 0.0)))


def log_b_monomial_norms(setup: MultiplicitySetup, degree: int) -> NDArray:
    """log ||z^n||^2_B over the coefficient cube, at time setup.t."""
    n = np.arange(degree + 1)
    per_axis = [log_gamma_factor(kj, n) + n * np.log(setup.t) for kj in setup.k]
    out = per_axis[0]
    for axis in per_axis[1:]:
        out = np.add.outer(out, axis)
    return np.asarray(out)


def b_monomial_norms(setup: MultiplicitySetup, degree: int) -> NDArray:
    """s^|n| prod_j gamma_{n_j}(k_j) over the coefficient cube, with s = setup.t."""
    return np.exp(log_b_monomial_norms(setup, degree))


def _check_series(setup: MultiplicitySetup, *series: CoeffSeries) -> None:
    for s in series:
        if s.dim != setup.N:
            raise DimensionMismatchError(f"series in {s.dim} variables for setup with N={setup.N}")
    shapes = {s.coeffs.shape for s in series}
    if len(shapes) > 1:
        raise DimensionMismatchError(f"series of different degree caps: {sorted(shapes)}")


def b_inner(setup: MultiplicitySetup, f: CoeffSeries, g: CoeffSeries) -> complex:
    """sum_n conj(f_n) g_n s^|n| prod_j gamma_{n_j}(k_j)."""
    _check_series(setup, f, g)
    norms = b_monomial_norms(setup, f.degree)
    return complex(np.sum(np.conj(f.coeffs) * g.coeffs * norms))


def b_kernel(setup: MultiplicitySetup, z: ArrayLike, degree: int) -> CoeffSeries:
    """
    Coefficients of w -> K_{mu,s}(z, w) = prod_j E_{k_j}(conj(z_j) w_j / s).

    Reproduces polynomials of degree <= degree exactly under b_inner.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (setup.N,):
        raise DimensionMismatchError(f"point of shape {z.shape} for setup with N={setup.N}")
    n = np.arange(degree + 1)
    return from_rank_one(
        [
            np.conj(z[j]) ** n * np.exp(-(log_gamma_factor(kj, n) + n * np.log(setup.t)))
            for j, kj in enumerate(setup.k)
        ]
    )


def c_inner_with_tail(
    setup: MultiplicitySetup, f: CoeffSeries, g: CoeffSeries
) -> Tuple[complex, float]:
    """<f, g>_C together with the accumulated truncation estimate of both G images."""
    _check_series(setup, f, g)
    gf = g_map(setup, f)
    gg = g_map(setup, g)
    value = b_inner(setup.at_time(setup.t / 2.0), gf, gg)
    return value, gf.tail_flag + gg.tail_flag


def c_inner(setup: MultiplicitySetup, f: CoeffSeries, g: CoeffSeries) -> complex:
    """<f, g>_C = <Gf, Gg>_B at time t/2."""
    return c_inner_with_tail(setup, f, g)[0]


def c_kernel(setup: MultiplicitySetup, z: ArrayLike, degree: int) -> CoeffSeries:
    """
    Coefficients of w -> L_z(w) = 2^-(gamma+N/2) rho_{mu,2t}(z*, w).

    rho_{2t}(z*, w) = e^(-(z*)^2/4t) e^(-w^2/4t) K_{mu,2t}(z, w), so the series
    is the B kernel at time 2t times a constant and a Gaussian.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    kernel = b_kernel(setup.at_time(2.0 * setup.t), z, degree)
    prefactor = 2.0 ** (-setup.homogeneity) * np.exp(-np.sum(np.conj(z) ** 2) / (4.0 * setup.t))
    return gaussian_multiply(kernel, -1.0 / (4.0 * setup.t)).scaled(complex(prefactor))


def damped_monomial(setup: MultiplicitySetup, n: Sequence[int], degree: int) -> CoeffSeries:
    """e^(-z^2/4t) z^n, the preimage under G of a multiple of the monomial w^n."""
    return gaussian_multiply(CoeffSeries.monomial(n, degree), -1.0 / (4.0 * setup.t))


def orthonormal_polynomials(setup: MultiplicitySetup, max_deg: int) -> List[SampledFunction]:
    """
    Products of the orthonormal polynomials of nu_{mu,t}, indexed by basis_indices.

    These are orthonormal for e^(-q^2/2t) d omega, not in L^2(omega) itself.
    """
    out = []
    for n in basis_indices(setup.N, max_deg):
        out.append(SampledFunction(_polynomial_evaluator(setup, n), label=f"p{n}"))
    return out


def _polynomial_evaluator(setup: MultiplicitySetup, n: Tuple[int, ...]) -> Callable[[NDArray], NDArray]:
    def evaluator(q: NDArray) -> NDArray:
        value = np.ones(q.shape[0])
        for j, kj in enumerate(setup.k):
            value = value * orthonormal_polynomial_values(kj, setup.t, n[j], q[:, j])[n[j]]
        return value

    return evaluator


def hermite_basis(
    setup: MultiplicitySetup, max_deg: int, rule: Optional[QuadratureRule] = None
) -> List[SampledFunction]:
    """
    Orthonormal basis h_n(q) = p_n(q) e^(-q^2/4t) of L^2(omega_{mu,t}), |n| <= max_deg.

    Args:
        setup: multiplicity context
        max_deg: largest total degree
        rule: if given, must have more nodes per axis than max_deg so that
            l2_inner is exact on the basis

    Returns:
        Generalized Hermite functions in the order of basis_indices
    """
    if rule is not None:
        _check_rule(setup, rule)
        if rule.order <= max_deg:
            raise ValueError(f"rule of order {rule.order} cannot resolve degree {max_deg}")
    polys = orthonormal_polynomials(setup, max_deg)
    return [
        SampledFunction(_damped(setup, p), label=f"h{n}")
        for n, p in zip(basis_indices(setup.N, max_deg), polys)
    ]


def _damped(setup: MultiplicitySetup, poly: Callable[[NDArray], NDArray]) -> Callable[[NDArray], NDArray]:
    def evaluator(q: NDArray) -> NDArray:
        return poly(q) * np.exp(-np.sum(q**2, axis=-1) / (4.0 * setup.t))

    return evaluator


def hermite_function_values(setup: MultiplicitySetup, max_deg: int, q: ArrayLike) -> NDArray:
    """All h_n at once, shape (len(basis_indices), M)."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    box = tensor_orthonormal_values(setup, max_deg, q)
    damping = np.exp(-np.sum(q**2, axis=-1) / (4.0 * setup.t))
    return np.array([box[n] * damping for n in basis_indices(setup.N, max_deg)])


def space_inner(space: SpaceTag) -> Callable[[CoeffSeries, CoeffSeries], complex]:
    if space.which == SpaceKind.B:
        return lambda f, g: b_inner(space.setup, f, g)
    if space.which == SpaceKind.C:
        return lambda f, g: c_inner(space.setup, f, g)
    raise ValueError("Gram-Schmidt on coefficient series needs the B or C space")


def gs_orthonormal_basis(
    setup: MultiplicitySetup, space: SpaceTag, max_deg: int, degree: Optional[int] = None
) -> List[CoeffSeries]:
    """
    Modified Gram-Schmidt, run twice, on the natural spanning set of the space.

    For B the candidates are the monomials z^n; for C, where polynomials have
    infinite norm, they are the damped monomials e^(-z^2/4t) z^n.

    Raises:
        RankDeficiencyError: if a pivot norm drops below PIVOT_FLOOR
    """
    if space.setup.N != setup.N:
        raise DimensionMismatchError(f"space over N={space.setup.N} for setup with N={setup.N}")
    setup = space.setup
    degree = degree if degree is not None else max(2 * max_deg, 20)
    if max_deg > degree // 2:
        raise ValueError(f"max_deg {max_deg} needs a degree cap of at least {2 * max_deg}")
    inner = space_inner(space)
    if space.which == SpaceKind.B:
        candidates = [CoeffSeries.monomial(n, degree) for n in basis_indices(setup.N, max_deg)]
    else:
        candidates = [damped_monomial(setup, n, degree) for n in basis_indices(setup.N, max_deg)]
    basis: List[CoeffSeries] = []
    for candidate in candidates:
        v = candidate
        for _ in range(2):
            for e in basis:
                v = v - e.scaled(inner(e, v))
        norm = np.sqrt(max(inner(v, v).real, 0.0))
        if norm < PIVOT_FLOOR:
            raise RankDeficiencyError(f"Gram-Schmidt pivot {norm:.3e} below {PIVOT_FLOOR}", sigma_min=norm)
        basis.append(v.scaled(1.0 / norm))
    return basis


def b_coordinates(setup: MultiplicitySetup, f: CoeffSeries, max_deg: int) -> NDArray:
    """<e_n, f>_B for the normalized monomials e_n, |n| <= max_deg."""
    norms = b_monomial_norms(setup, f.degree)
    return np.array([np.sqrt(norms[n]) * f.coeffs[n] for n in basis_indices(setup.N, max_deg)])


def c_coordinates(setup: MultiplicitySetup, f: CoeffSeries, max_deg: int) -> NDArray:
    """
    <e_n, f>_C for the orthonormal C basis e_n = G^-1(w^n / ||w^n||_B), |n| <= max_deg.

    Equal to ||w^n||_{B,t/2} [Gf]_n, so no tail sum is involved.
    """
    return b_coordinates(setup.at_time(setup.t / 2.0), g_map(setup, f), max_deg)


def c_basis(setup: MultiplicitySetup, max_deg: int, degree: int) -> List[CoeffSeries]:
    """The orthonormal C basis in closed form, in the order of basis_indices."""
    half = setup.at_time(setup.t / 2.0)
    norms = b_monomial_norms(half, degree)
    scale = 2.0 ** (-setup.homogeneity / 2.0)
    out = []
    for n in basis_indices(setup.N, max_deg):
        factor = scale * 2.0 ** (-sum(n)) / np.sqrt(norms[n])
        out.append(damped_monomial(setup, n, degree).scaled(factor))
    return out


def dilation_l2(setup: MultiplicitySetup, lam: float, psi: SampledFunction) -> SampledFunction:
    """lam^(gamma+N/2) psi(lam q), unitary on L^2(omega_{mu,t})."""
    if lam <= 0:
        raise ValueError(f"dilation factor must be positive, got {lam}")
    factor = lam**setup.homogeneity

    def evaluator(q: NDArray) -> NDArray:
        return factor * psi(lam * q)

    return SampledFunction(evaluator, label=f"D[{lam:g}]{psi.label}")
