"""
Truncated operator matrices, their SVD and polar factors, and the checks
that the polar factor of the restriction adjoint R* is the transform C.

Matrices are taken between orthonormal bases: the generalized Hermite
functions h_n of L^2(omega_{mu,t}), the orthonormal C basis
e_n = G^-1(w^n / ||w^n||) and the normalized monomials of B.
"""

import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from dunklsb.core.quadrature import QuadratureRule
from dunklsb.core.series import CoeffSeries
from dunklsb.core.spaces import (
    SampledFunction,
    b_coordinates,
    b_monomial_norms,
    basis_indices,
    c_coordinates,
    hermite_basis,
    l2_inner,
    omega_weights,
)
from dunklsb.core.transforms import (
    f1_adjoint,
    f1_op,
    f2_op,
    gaussian_function,
    heat_apply,
    heat_gaussian,
    restrict_adjoint,
    sbso_adjoint,
    transform_C,
)
from dunklsb.errors import ConvergenceError, NumericalWarning, RankDeficiencyError
from dunklsb.models.results import PolarComparisonReport, RestrictionReport
from dunklsb.models.setup import MultiplicitySetup

# extra codomain degrees kept beyond the domain truncation
CODOMAIN_PAD = 8
# pad at which the RR* and factorization residuals of a degree-10 block settle near 1e-6
CERTIFICATE_PAD = 40
SIGMA_FLOOR = 1e-12
MAX_SWEEPS = 60


@dataclass(frozen=True)
class OperatorMatrix:
    """Entries M[i, j] = <codomain_i, Op(domain_j)> with basis provenance."""

    entries: NDArray
    row_labels: List[str] = field(default_factory=list)
    col_labels: List[str] = field(default_factory=list)
    gram_deviation: float = 0.0

    def __post_init__(self) -> None:
        entries = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if not np.all(np.isfinite(entries)):
            raise ValueError("operator matrix has non-finite entries")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape  # type: ignore[return-value]

    def scaled(self, factor: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.entries * factor, self.row_labels, self.col_labels, self.gram_deviation)


def operator_matrix(
    op: Callable,
    domain_basis: Sequence,
    codomain_basis: Sequence,
    pairing: Callable,
    gram_deviation: float = 0.0,
) -> OperatorMatrix:
    """
    The matrix of op between two orthonormal families.

    Args:
        op: maps a domain element to a codomain element
        domain_basis: orthonormal family in the domain
        codomain_basis: orthonormal family in the codomain
        pairing: the codomain inner product, anti-linear in its first argument
        gram_deviation: orthonormality certificate of the bases, carried along

    Returns:
        M with M[i, j] = pairing(codomain_i, op(domain_j))
    """
    images = [op(b) for b in domain_basis]
    entries = np.array([[pairing(e, image) for image in images] for e in codomain_basis], dtype=complex)
    return OperatorMatrix(
        entries,
        row_labels=[_label(e) for e in codomain_basis],
        col_labels=[_label(b) for b in domain_basis],
        gram_deviation=gram_deviation,
    )


def _label(element) -> str:
    return getattr(element, "label", "") or type(element).__name__


def _complete_columns(q: NDArray, filled: NDArray) -> NDArray:
    """Replace unfilled columns of q by unit vectors orthogonal to the rest."""
    m = q.shape[0]
    basis = [q[:, j] for j in range(q.shape[1]) if filled[j]]
    candidates = iter(np.eye(m, dtype=complex))
    for j in range(q.shape[1]):
        if filled[j]:
            continue
        for e in candidates:
            v = e.copy()
            for _ in range(2):
                for b in basis:
                    v = v - np.vdot(b, v) * b
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                q[:, j] = v / norm
                basis.append(q[:, j])
                break
    return q


def _one_sided_jacobi(a: NDArray, tol: float) -> Tuple[NDArray, NDArray, NDArray]:
    """Hestenes iteration on the columns of a tall matrix."""
    a = a.copy()
    n = a.shape[1]
    v = np.eye(n, dtype=complex)
    for _ in range(MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = float(np.real(np.vdot(a[:, p], a[:, p])))
                beta = float(np.real(np.vdot(a[:, q], a[:, q])))
                gamma = np.vdot(a[:, p], a[:, q])
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or abs(gamma) == 0.0:
                    continue
                rotated = True
                phase = gamma / abs(gamma)
                a[:, q] *= np.conj(phase)
                v[:, q] *= np.conj(phase)
                zeta = (beta - alpha) / (2.0 * abs(gamma))
                tan = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta)) if zeta != 0 else 1.0
                cos = 1.0 / np.sqrt(1.0 + tan * tan)
                sin = cos * tan
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = cos * ap - sin * aq
                a[:, q] = sin * ap + cos * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = cos * vp - sin * vq
                v[:, q] = sin * vp + cos * vq
        if not rotated:
            sigma = np.linalg.norm(a, axis=0)
            order = np.argsort(-sigma, kind="stable")
            return a[:, order], sigma[order], v[:, order]
    raise ConvergenceError(f"one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")


def svd(m: OperatorMatrix, tol: float = 0.0) -> Tuple[NDArray, NDArray, NDArray]:
    """
    Thin SVD M = U diag(sigma) V^H by one-sided Jacobi rotations.

    Returns U (rows x r), sigma (r, nonincreasing) and V (cols x r) with
    r = min(rows, cols); columns of U for zero singular values are completed
    to an orthonormal set.

    Raises:
        ConvergenceError: if the sweeps do not converge or the reconstruction
            error exceeds 1e-11 ||M||
    """
    a = m.entries
    wide = a.shape[1] > a.shape[0]
    work = a.conj().T if wide else a
    tol = tol or work.shape[0] * float(np.finfo(float).eps)
    rotated, sigma, v = _one_sided_jacobi(work, tol)
    filled = sigma > 0.0
    u = np.zeros_like(rotated)
    u[:, filled] = rotated[:, filled] / sigma[filled]
    u = _complete_columns(u, filled)
    if wide:
        u, v = v, u
    norm = float(np.linalg.norm(a))
    residual = float(np.linalg.norm(u @ np.diag(sigma) @ v.conj().T - a))
    if residual > 1e-11 * max(norm, 1e-300) and norm > 0:
        raise ConvergenceError(f"SVD reconstruction residual {residual:.3e}", residual=residual)
    return u, sigma, v


def polar_factor(m: OperatorMatrix) -> OperatorMatrix:
    """
    The isometric polar factor U V^H of M.

    Raises:
        RankDeficiencyError: if sigma_min <= SIGMA_FLOOR, including M = 0
    """
    u, sigma, v = svd(m)
    sigma_min = float(np.min(sigma)) if sigma.size else 0.0
    if sigma_min <= SIGMA_FLOOR:
        raise RankDeficiencyError(
            f"polar factor refused: sigma_min = {sigma_min:.3e}", sigma_min=sigma_min
        )
    return OperatorMatrix(u @ v.conj().T, m.row_labels, m.col_labels, m.gram_deviation)


def polar_modulus(m: OperatorMatrix) -> NDArray:
    """|M| = V diag(sigma) V^H."""
    _, sigma, v = svd(m)
    return v @ np.diag(sigma) @ v.conj().T


def _c_matrix(setup: MultiplicitySetup, images: Sequence[CoeffSeries], rows_deg: int) -> NDArray:
    return np.stack([c_coordinates(setup, image, rows_deg) for image in images], axis=1)


def _l2_matrix(
    setup: MultiplicitySetup,
    rows: Sequence[SampledFunction],
    cols: Sequence[SampledFunction],
    rule: QuadratureRule,
) -> NDArray:
    """All pairings <rows_i, cols_j> in L^2(omega_{mu,t}), each function sampled once."""
    weights = omega_weights(setup, rule)
    live = weights > 0
    nodes = rule.nodes[live]
    left = np.array([r(nodes) for r in rows])
    right = np.array([c(nodes) for c in cols])
    return (left.conj() * weights[live]) @ right.T


def _isometry_error(w: NDArray) -> float:
    return float(np.max(np.abs(w.conj().T @ w - np.eye(w.shape[1]))))


def verify_restriction_principle(
    setup: MultiplicitySetup,
    max_deg: int,
    rule: QuadratureRule,
    rule2t: QuadratureRule,
    degree: int,
    pad: int = CODOMAIN_PAD,
) -> RestrictionReport:
    """
    Polar factor of the truncated R* against the matrix of C.

    Builds M = [R*] from {h_n, |n| <= max_deg} to {e_n, |n| <= max_deg + pad},
    W = polar_factor(M) and M_C = [C] in the same bases, and reports
    max|W - M_C| over the block and its first column, the isometry defect of
    W, the singular value range of M, max|M^H M - [e^(t Delta)]| and the
    factorization residual max|M - [C][e^(t Delta / 2)]|.

    The last two certify R* = C |R*| with |R*| = e^(t Delta / 2). They shrink
    as pad grows, while W - M_C is limited by the domain truncation itself.
    """
    rows_deg = max_deg + pad
    if degree < rows_deg:
        raise ValueError(f"degree cap {degree} below the codomain truncation {rows_deg}")
    domain = hermite_basis(setup, max_deg, rule)
    wide_domain = hermite_basis(setup, rows_deg, rule)

    r_star = [restrict_adjoint(setup, h, rule2t, degree) for h in domain]
    m = OperatorMatrix(
        _c_matrix(setup, r_star, rows_deg),
        row_labels=[f"e{n}" for n in basis_indices(setup.N, rows_deg)],
        col_labels=[h.label for h in domain],
    )
    u, sigma, v = svd(m)
    w = polar_factor(m).entries
    c_images = [transform_C(setup, h, rule, degree) for h in wide_domain]
    m_c_wide = _c_matrix(setup, c_images, rows_deg)
    m_c = m_c_wide[:, : len(domain)]

    heat_full = [heat_apply(setup, 2.0 * setup.t, h, rule) for h in domain]
    rr_star = _l2_matrix(setup, domain, heat_full, rule)
    gram = m.entries.conj().T @ m.entries

    heat_half = [heat_apply(setup, setup.t, h, rule) for h in domain]
    half = _l2_matrix(setup, wide_domain, heat_half, rule)
    factorization = m_c_wide @ half

    return RestrictionReport(
        max_deg=max_deg,
        full_block_err=float(np.max(np.abs(w - m_c))),
        leading_column_err=float(np.max(np.abs(w[:, 0] - m_c[:, 0]))),
        isometry_err=_isometry_error(w),
        sigma_max=float(sigma[0]),
        sigma_min=float(sigma[-1]),
        rr_star_err=float(np.max(np.abs(gram - rr_star))),
        factorization_err=float(np.max(np.abs(m.entries - factorization))),
        singular_values=[float(s) for s in sigma],
    )


def verify_a_version_polar(
    setup: MultiplicitySetup,
    max_deg: int,
    rule: QuadratureRule,
    rule2t: QuadratureRule,
    degree: int,
    pad: int = CODOMAIN_PAD,
) -> PolarComparisonReport:
    """
    Polar factor of the truncated B = F2 R* F1* against the matrix of A.

    In the bases {h_n} and the normalized monomials of B_{mu,t} the matrix
    of A is the identity block, since A h_n = z^n / ||z^n||. The modulus
    |B| = F1 e^(t Delta / 2) F1* is compared with its L^2 matrix.
    """
    rows_deg = max_deg + pad
    if degree < rows_deg:
        raise ValueError(f"degree cap {degree} below the codomain truncation {rows_deg}")
    domain = hermite_basis(setup, max_deg, rule)
    images = [f2_op(setup, restrict_adjoint(setup, f1_adjoint(setup, h), rule2t, degree)) for h in domain]
    m = OperatorMatrix(np.stack([b_coordinates(setup, image, rows_deg) for image in images], axis=1))
    w = polar_factor(m).entries
    _, sigma, _ = svd(m)
    target = np.eye(w.shape[0], w.shape[1], dtype=complex)

    conjugated = [f1_op(setup, heat_apply(setup, setup.t, f1_adjoint(setup, h), rule)) for h in domain]
    modulus_target = _l2_matrix(setup, domain, conjugated, rule)
    return PolarComparisonReport(
        max_deg=max_deg,
        full_block_err=float(np.max(np.abs(w - target))),
        leading_column_err=float(np.max(np.abs(w[:, 0] - target[:, 0]))),
        modulus_err=float(np.max(np.abs(polar_modulus(m) - modulus_target))),
        sigma_max=float(sigma[0]),
        sigma_min=float(sigma[-1]),
    )


def operator_norm_probe(
    setup: MultiplicitySetup, sigma_width: float, rule_wide: QuadratureRule
) -> float:
    """
    Rayleigh quotient <psi, e^(t Delta) psi> / ||psi||^2 for psi = e^(-x^2 / 2 sigma^2).

    The quotient is (1 + t / sigma^2)^-(gamma+N/2), tending to ||R||^2 = 1
    from below as the width grows. Warns when the rule's nodes span less
    than 4 sigma_width.
    """
    if sigma_width <= 0:
        raise ValueError(f"width must be positive, got {sigma_width}")
    if rule_wide.span < 4.0 * sigma_width:
        warnings.warn(
            f"rule nodes reach {rule_wide.span:.1f}, less than 4 x width {sigma_width:g}",
            NumericalWarning,
            stacklevel=2,
        )
    a = 1.0 / (2.0 * sigma_width**2)
    psi = gaussian_function(a)
    flowed = heat_gaussian(setup, a, 2.0 * setup.t)
    numerator = l2_inner(setup, psi, flowed, rule_wide).real
    denominator = l2_inner(setup, psi, psi, rule_wide).real
    return float(numerator / denominator)


def polar_of_scaled(m: OperatorMatrix, factor: float) -> float:
    """max|polar(factor M) - polar(M)| for a positive factor."""
    if factor <= 0:
        raise ValueError(f"factor must be positive, got {factor}")
    return float(np.max(np.abs(polar_factor(m.scaled(factor)).entries - polar_factor(m).entries)))


def sbso_adjoint_matrix(setup: MultiplicitySetup, max_deg: int, rule: QuadratureRule, degree: int) -> OperatorMatrix:
    """Matrix of S* from the normalized monomials of B_{mu,1} into span{h_n}."""
    norms = np.sqrt(b_monomial_norms(setup, degree))
    domain = [CoeffSeries.monomial(n, degree, 1.0 / norms[n]) for n in basis_indices(setup.N, max_deg)]
    rows = hermite_basis(setup, max_deg + CODOMAIN_PAD, rule)
    return operator_matrix(
        lambda f: sbso_adjoint(setup, f),
        domain,
        rows,
        lambda e, image: l2_inner(setup, e, image, rule),
    )
