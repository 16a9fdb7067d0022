"""
Numerical checks run by the verification suites.

Each check is a function of a CheckContext registered under a dotted id
whose first part names its suite. A check returns the records it produced;
run_point times it, captures NumericalWarning and turns exceptions into an
ErrorRecord plus a failed CheckRecord.
"""

import math
import time
import warnings
import zlib
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import poch

from dunklsb.core.coxeter import mms_constant, mms_constant_check
from dunklsb.core.kernel import (
    dunkl_kernel,
    gamma_factor,
    heat_kernel,
    kernel_bound_margin,
    log_rank_one_real,
    rank_one_imag,
    rank_one_series,
)
from dunklsb.core.polar import (
    CERTIFICATE_PAD,
    OperatorMatrix,
    operator_norm_probe,
    polar_factor,
    polar_of_scaled,
    sbso_adjoint_matrix,
    svd,
    verify_a_version_polar,
    verify_restriction_principle,
)
from dunklsb.core.quadrature import (
    QuadratureRule,
    gauss_rule_1d,
    moment_oracle,
    tensor_rule,
)
from dunklsb.core.series import (
    CoeffSeries,
    dilate_series,
    evaluate,
    g_inverse,
    g_map,
    multi_index_norms,
)
from dunklsb.core.spaces import (
    SampledFunction,
    SpaceKind,
    SpaceTag,
    b_inner,
    b_kernel,
    basis_indices,
    c_basis,
    c_inner,
    c_kernel,
    damped_monomial,
    dilation_l2,
    gs_orthonormal_basis,
    hermite_basis,
    hermite_function_values,
    l2_norm,
    omega_weights,
    space_inner,
)
from dunklsb.core.transforms import (
    ORDER_HEADROOM,
    diagram_check,
    dunkl_transform,
    f1_adjoint,
    f1_op,
    f2_adjoint,
    f2_op,
    gaussian_function,
    heat_apply,
    heat_gaussian,
    kernel_identities_check,
    not_restriction_op,
    restrict,
    restrict_adjoint,
    transform_A,
    transform_C,
    transform_pointwise,
)
from dunklsb.errors import NumericalWarning
from dunklsb.models import (
    BaseRecord,
    CheckMode,
    CheckRecord,
    ErrorRecord,
    InfoRecord,
    MultiplicitySetup,
    WarningRecord,
)

if TYPE_CHECKING:
    from dunklsb.api.suites import SuiteConfig

SUITE_NAMES = ("kernels", "quadrature", "spaces", "transforms", "polar")

CheckFn = Callable[["CheckContext"], List[BaseRecord]]

_REGISTRY: Dict[str, List[Tuple[str, CheckFn]]] = {name: [] for name in SUITE_NAMES}

# number of random (z, w) pairs for the kernel axioms
AXIOM_SAMPLES = 1000
# normalization of the kernel axiom errors
AXIOM_SCALE = "exp(|z||w|)"

# codomain pad of the polar comparisons for N > 1, where the domain stops at degree 4
NDIM_CERTIFICATE_PAD = 24


def leading_column_tol(max_deg: int) -> float:
    """
    Tolerance on the first column of a truncated polar factor.

    The heat flow leaks h_0 out of a degree-max_deg truncation at a rate of
    about 1/5 per two degrees.
    """
    return 10.0 * 5.0 ** (-(max_deg + 2) / 2.0)


def check(check_id: str) -> Callable[[CheckFn], CheckFn]:
    """Register a check under its suite, the first part of check_id."""
    suite = check_id.split(".")[0]
    if suite not in _REGISTRY:
        raise ValueError(f"unknown suite in check id {check_id!r}")

    def register(fn: CheckFn) -> CheckFn:
        _REGISTRY[suite].append((check_id, fn))
        return fn

    return register


def registered_checks(suite: str) -> List[str]:
    return [check_id for check_id, _ in _REGISTRY[suite]]


def _as_number(value: Any):
    """Report-friendly form: a float, [re, im] for a complex scalar, None for arrays."""
    if value is None:
        return None
    array = np.asarray(value)
    if array.ndim == 0:
        if np.iscomplexobj(array) and array.imag != 0:
            return [float(array.real), float(array.imag)]
        return float(array.real)
    if array.size <= 8 and not np.iscomplexobj(array):
        return [float(v) for v in array.ravel()]
    return None


@dataclass
class CheckContext:
    """Shared state of all checks at one parameter point."""

    config: "SuiteConfig"
    setup: MultiplicitySetup
    check_id: str = ""
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    _rules: Dict[Tuple[float, int], QuadratureRule] = field(default_factory=dict)

    @property
    def params(self) -> Dict[str, Any]:
        return {"N": self.setup.N, "k": list(self.setup.k), "t": self.setup.t}

    def tol(self, base: float) -> float:
        return base * self.config.tol_scale

    def rule_at(self, s: float, nodes: Optional[int] = None) -> QuadratureRule:
        """Tensor rule for the setup's multiplicities at time s, built once."""
        n = nodes or self.config.nodes
        key = (float(s), n)
        if key not in self._rules:
            self._rules[key] = tensor_rule(self.setup.at_time(s), n, use_cache=True)
        return self._rules[key]

    @property
    def rule(self) -> QuadratureRule:
        return self.rule_at(self.setup.t)

    @property
    def rule2t(self) -> QuadratureRule:
        return self.rule_at(2.0 * self.setup.t)

    def compare(
        self,
        value: ArrayLike,
        reference: ArrayLike,
        tol: float,
        mode: CheckMode = CheckMode.EITHER,
        check_id: Optional[str] = None,
        **params: Any,
    ) -> CheckRecord:
        """
        Record max|value - reference| and its ratio to max|reference|.
        """
        v = np.asarray(value)
        r = np.asarray(reference)
        abs_err = float(np.max(np.abs(v - r))) if v.size else 0.0
        scale = float(np.max(np.abs(r))) if r.size else 0.0
        if scale > 0:
            rel_err = abs_err / scale
        else:
            rel_err = 0.0 if abs_err == 0 else math.inf
        if not math.isfinite(abs_err):
            abs_err = rel_err = math.inf
        return CheckRecord(
            check_id=check_id or self.check_id,
            params={**self.params, **params},
            value=_as_number(v),
            reference=_as_number(r),
            abs_err=abs_err,
            rel_err=rel_err,
            tol=tol,
            mode=mode,
        )

    def deviation(self, err: float, tol: float, check_id: Optional[str] = None, **params: Any) -> CheckRecord:
        """Record an already computed error against an absolute tolerance."""
        err = float(err) if math.isfinite(err) else math.inf
        return CheckRecord(
            check_id=check_id or self.check_id,
            params={**self.params, **params},
            value=err,
            reference=0.0,
            abs_err=err,
            rel_err=err,
            tol=tol,
            mode=CheckMode.ABS,
        )

    def info(self, message: str, check_id: Optional[str] = None, **data: Any) -> InfoRecord:
        return InfoRecord(
            message=message, check_id=check_id or self.check_id, params=self.params, data=data
        )


def _constant(value: float = 1.0) -> SampledFunction:
    return SampledFunction(lambda q: np.full(q.shape[0], value), label=f"{value:g}")


def _diagonal_points(setup: MultiplicitySetup, radii: ArrayLike) -> np.ndarray:
    """Points r (1, ..., 1) / sqrt(N), so that |x| = r."""
    radii = np.asarray(radii, dtype=float)
    return np.outer(radii, np.ones(setup.N)) / np.sqrt(setup.N)


def _complex_ball(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    """Uniform radii up to radius, uniformly random complex directions."""
    direction = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    return direction * radius * rng.uniform(0.0, 1.0, size=(count, 1))


# ---- kernels -----------------------------------------------------------------


@check("kernels.gamma_factor")
def _gamma_factor(ctx: CheckContext) -> List[BaseRecord]:
    records: List[BaseRecord] = []
    for kj in sorted(set(ctx.setup.k)):
        n = np.arange(31)
        m = n // 2
        closed = np.where(
            n % 2 == 0,
            2.0**n * poch(1.0, m) * poch(kj + 0.5, m),
            2.0**n * poch(1.0, m) * poch(kj + 0.5, m + 1),
        )
        computed = np.array([gamma_factor(kj, int(i)) for i in n])
        records.append(ctx.compare(computed, closed, ctx.tol(1e-12), CheckMode.REL, kj=kj))
    return records


@check("kernels.axioms")
def _kernel_axioms(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    z = _complex_ball(ctx.rng, AXIOM_SAMPLES, setup.N, 4.0)
    w = _complex_ball(ctx.rng, AXIOM_SAMPLES, setup.N, 4.0)
    lam = _complex_ball(ctx.rng, AXIOM_SAMPLES, 1, 1.0)
    # errors are measured against the bound e^(|z||w|) of |E|
    scale = np.exp(np.linalg.norm(z, axis=-1) * np.linalg.norm(w, axis=-1))
    e_zw = dunkl_kernel(setup, z, w)
    e_scaled = dunkl_kernel(setup, lam * z, w)
    tol = ctx.tol(1e-12)

    # check id -> (|difference|, value it is a difference from)
    diffs = {
        "kernels.symmetry": (np.abs(e_zw - dunkl_kernel(setup, w, z)), e_zw),
        "kernels.scaling": (np.abs(e_scaled - dunkl_kernel(setup, z, lam * w)), e_scaled),
        "kernels.conjugation": (np.abs(np.conj(e_zw) - dunkl_kernel(setup, np.conj(z), np.conj(w))), e_zw),
    }
    records: List[BaseRecord] = [
        ctx.compare(dunkl_kernel(setup, z, np.zeros_like(w)), np.ones(AXIOM_SAMPLES), tol, CheckMode.ABS, "kernels.E_at_zero"),
    ]
    for check_id, (diff, _) in diffs.items():
        records.append(ctx.deviation(np.max(diff / scale), tol, check_id, error_scale=AXIOM_SCALE))
    margin = kernel_bound_margin(setup, z, w) / scale
    records.append(ctx.deviation(max(0.0, -float(np.min(margin))), tol, "kernels.bound", error_scale=AXIOM_SCALE))
    if all(kj == 0.0 for kj in setup.k):
        exp_err = np.max(np.abs(e_zw - np.exp(np.sum(z * w, axis=-1))) / scale)
        records.append(ctx.deviation(exp_err, tol, "kernels.E0_exp", error_scale=AXIOM_SCALE))

    plain = {
        check_id.split(".")[1]: float(np.max(diff / (1.0 + np.abs(value))))
        for check_id, (diff, value) in diffs.items()
    }
    records.append(
        ctx.info(
            "axiom errors relative to 1 + |E|: "
            + ", ".join(f"{name} {err:.2e}" for name, err in plain.items()),
            error_scale="1+|E|",
            **plain,
        )
    )
    return records


@check("kernels.E1_cosh")
def _e1_cosh(ctx: CheckContext) -> List[BaseRecord]:
    if 1.0 not in ctx.setup.k:
        return []
    value = rank_one_series(1.0, np.array(1.0 + 0j))
    return [ctx.compare(value, math.cosh(1.0), ctx.tol(1e-12), CheckMode.REL)]


@check("kernels.bessel_path")
def _bessel_path(ctx: CheckContext) -> List[BaseRecord]:
    records: List[BaseRecord] = []
    x = np.linspace(-4.0, 20.0, 97)
    y = np.linspace(-6.0, 6.0, 49)
    for kj in sorted(set(ctx.setup.k)):
        series = np.real(rank_one_series(kj, x.astype(complex)))
        bessel = np.exp(log_rank_one_real(kj, x))
        records.append(
            ctx.deviation(np.max(np.abs(bessel / series - 1.0)), ctx.tol(1e-10), axis="real", kj=kj)
        )
        imag_series = rank_one_series(kj, 1j * y)
        records.append(
            ctx.compare(rank_one_imag(kj, y), imag_series, ctx.tol(1e-10), CheckMode.ABS, axis="imag", kj=kj)
        )
    return records


@check("kernels.heat_mass")
def _heat_mass(ctx: CheckContext) -> List[BaseRecord]:
    x = _diagonal_points(ctx.setup, [0.0, 0.7, 2.3, 3.0])
    mass = heat_apply(ctx.setup, ctx.setup.t, _constant(), ctx.rule)(x)
    return [ctx.compare(mass, np.ones(len(x)), ctx.tol(1e-9), CheckMode.REL)]


@check("kernels.gaussian_reduction")
def _gaussian_reduction(ctx: CheckContext) -> List[BaseRecord]:
    if any(kj != 0.0 for kj in ctx.setup.k):
        return []
    t = ctx.setup.t
    x = _diagonal_points(ctx.setup, np.linspace(-2.0, 2.0, 9))
    q = _diagonal_points(ctx.setup, np.linspace(1.5, -1.0, 9))
    reference = np.exp(-np.sum((x - q) ** 2, axis=-1) / (2.0 * t))
    return [ctx.compare(np.real(heat_kernel(ctx.setup, x, q, t)), reference, ctx.tol(1e-12), CheckMode.REL)]


# ---- quadrature --------------------------------------------------------------


@check("quadrature.weights")
def _weights(ctx: CheckContext) -> List[BaseRecord]:
    rule = ctx.rule
    records: List[BaseRecord] = [ctx.compare(np.sum(rule.weights), 1.0, ctx.tol(1e-12), CheckMode.ABS)]
    records.append(
        ctx.deviation(max(0.0, -float(np.min(rule.weights))), 0.0, "quadrature.positive_weights")
    )
    records.append(
        ctx.compare(np.sort(rule.nodes[:, 0]), -np.sort(rule.nodes[:, 0])[::-1], ctx.tol(1e-14), CheckMode.ABS, "quadrature.symmetry")
    )
    return records


@check("quadrature.exactness")
def _exactness(ctx: CheckContext) -> List[BaseRecord]:
    records: List[BaseRecord] = []
    t = ctx.setup.t
    sizes = sorted({5, 10, 20, 40, ctx.config.nodes})
    for kj in sorted(set(ctx.setup.k)):
        for n in sizes:
            rule = gauss_rule_1d(kj, t, n, use_cache=True)
            x = rule.nodes[:, 0]
            j = np.arange(n)
            even = np.array([np.sum(rule.weights * x ** (2 * i)) for i in j])
            oracle = np.array([moment_oracle(kj, t, int(i)) for i in j])
            records.append(
                ctx.deviation(float(np.max(np.abs(even / oracle - 1.0))), ctx.tol(1e-11), kj=kj, n=n)
            )
            # odd moments through degree 2n - 1, against the neighbouring even ones
            odd = np.array([np.sum(rule.weights * x ** (2 * i + 1)) for i in j])
            bound = np.sqrt(oracle * np.array([moment_oracle(kj, t, int(i) + 1) for i in j]))
            records.append(
                ctx.deviation(float(np.max(np.abs(odd) / bound)), ctx.tol(1e-13), "quadrature.odd_moments", kj=kj, n=n)
            )
    return records


@check("quadrature.gaussian_integral")
def _gaussian_integral(ctx: CheckContext) -> List[BaseRecord]:
    # int e^(-q^2/2t) d nu_t = 2^-(gamma+N/2)
    t = ctx.setup.t
    values = np.exp(-np.sum(ctx.rule.nodes**2, axis=-1) / (2.0 * t))
    integral = float(np.sum(ctx.rule.weights * values))
    return [ctx.compare(integral, 2.0 ** (-ctx.setup.homogeneity), ctx.tol(1e-10), CheckMode.REL)]


@check("quadrature.mms_constant")
def _mms(ctx: CheckContext) -> List[BaseRecord]:
    # a reference weight with the fractional part of k leaves a polynomial ratio
    fractional = tuple(kj - math.floor(kj) for kj in ctx.setup.k)
    reference = MultiplicitySetup(N=ctx.setup.N, k=fractional, t=ctx.setup.t)
    rule = tensor_rule(reference, min(ctx.config.nodes, 40), use_cache=True)
    value = mms_constant_check(ctx.setup, rule)
    return [ctx.compare(value, mms_constant(ctx.setup), ctx.tol(1e-10), CheckMode.REL)]


# ---- spaces ------------------------------------------------------------------


def _basis_degree(ctx: CheckContext, cap: int) -> int:
    """Basis truncation for dense checks; smaller in two or more variables."""
    return min(ctx.config.basis, cap if ctx.setup.N == 1 else max(cap // 2, 2))


def _random_polynomial(ctx: CheckContext, max_deg: int, degree: int) -> CoeffSeries:
    coeffs = ctx.rng.standard_normal((degree + 1,) * ctx.setup.N) + 1j * ctx.rng.standard_normal(
        (degree + 1,) * ctx.setup.N
    )
    coeffs[multi_index_norms(degree, ctx.setup.N) > max_deg] = 0.0
    return CoeffSeries(coeffs)


@check("spaces.hermite_orthonormal")
def _hermite_orthonormal(ctx: CheckContext) -> List[BaseRecord]:
    m = _basis_degree(ctx, 10)
    values = hermite_function_values(ctx.setup, m, ctx.rule.nodes)
    weights = omega_weights(ctx.setup, ctx.rule)
    live = weights > 0
    gram = (values[:, live] * weights[live]) @ values[:, live].T
    return [ctx.deviation(np.max(np.abs(gram - np.eye(len(gram)))), ctx.tol(1e-10), max_deg=m)]


@check("spaces.b_reproducing")
def _b_reproducing(ctx: CheckContext) -> List[BaseRecord]:
    degree = ctx.config.degree
    f = _random_polynomial(ctx, 10, degree)
    z = _complex_ball(ctx.rng, 20, ctx.setup.N, 2.0)
    recovered = np.array([b_inner(ctx.setup, b_kernel(ctx.setup, zi, degree), f) for zi in z])
    return [ctx.compare(recovered, evaluate(f, z), ctx.tol(1e-10))]


@check("spaces.c_reproducing")
def _c_reproducing(ctx: CheckContext) -> List[BaseRecord]:
    degree = ctx.config.degree
    # G^-1 of a polynomial lies in C, unlike the polynomial itself
    f = g_inverse(ctx.setup, _random_polynomial(ctx, 10, degree))
    z = _complex_ball(ctx.rng, 20, ctx.setup.N, 1.5)
    recovered = np.array([c_inner(ctx.setup, c_kernel(ctx.setup, zi, degree), f) for zi in z])
    return [ctx.compare(recovered, evaluate(f, z), ctx.tol(1e-8))]


@check("spaces.c_kernel_transfer")
def _c_kernel_transfer(ctx: CheckContext) -> List[BaseRecord]:
    # G L_z = 2^-(gamma/2+N/4) e^(-(z*)^2/4t) K_{t/2}(z/2, .)
    setup = ctx.setup
    degree = ctx.config.degree
    records: List[BaseRecord] = []
    for z in _complex_ball(ctx.rng, 3, setup.N, 1.5):
        transferred = g_map(setup, c_kernel(setup, z, degree))
        factor = 2.0 ** (-setup.homogeneity / 2.0) * np.exp(-np.sum(np.conj(z) ** 2) / (4.0 * setup.t))
        target = b_kernel(setup.at_time(setup.t / 2.0), z / 2.0, degree).scaled(complex(factor))
        records.append(ctx.compare(transferred.coeffs, target.coeffs, ctx.tol(1e-10), CheckMode.REL, z=str(np.round(z, 6).tolist())))
    return records


@check("spaces.c_kernel_norm")
def _c_kernel_norm(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    l0 = c_kernel(setup, np.zeros(setup.N), ctx.config.degree)
    records: List[BaseRecord] = [
        ctx.compare(c_inner(setup, l0, l0), 2.0 ** (-setup.homogeneity), ctx.tol(1e-10), CheckMode.REL)
    ]
    odd = damped_monomial(setup, (1,) + (0,) * (setup.N - 1), ctx.config.degree)
    even = damped_monomial(setup, (2,) + (0,) * (setup.N - 1), ctx.config.degree)
    records.append(ctx.compare(c_inner(setup, odd, even), 0.0, ctx.tol(1e-15), CheckMode.ABS, "spaces.c_parity"))
    return records


@check("spaces.gram_schmidt")
def _gram_schmidt(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    m = _basis_degree(ctx, 6)
    records: List[BaseRecord] = []
    for which in (SpaceKind.B, SpaceKind.C):
        space = SpaceTag(which=which, setup=setup)
        basis = gs_orthonormal_basis(setup, space, m)
        inner = space_inner(space)
        gram = np.array([[inner(a, b) for b in basis] for a in basis])
        records.append(ctx.deviation(np.max(np.abs(gram - np.eye(len(basis)))), ctx.tol(1e-9), space=which.value))
        if which == SpaceKind.C:
            closed = c_basis(setup, m, basis[0].degree)
            err = max(a.max_abs_difference(b) for a, b in zip(basis, closed))
            records.append(ctx.deviation(err, ctx.tol(1e-9), "spaces.c_basis_closed_form"))
    return records


@check("spaces.dilation_unitarity")
def _dilation(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    h = hermite_basis(setup, 3)[-1]
    records: List[BaseRecord] = []
    for lam in (0.5, 2.0, 3.0):
        # a rule at time t / lam^2 integrates |h(lam q)|^2 exactly
        rule = ctx.rule_at(setup.t / lam**2, min(ctx.config.nodes, 40))
        norm = l2_norm(setup, dilation_l2(setup, lam, h), rule)
        records.append(ctx.compare(norm, 1.0, ctx.tol(1e-10), CheckMode.REL, lam=lam))
    return records


# ---- transforms --------------------------------------------------------------


@check("transforms.A_unitarity")
def _a_unitarity(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    basis = hermite_basis(setup, _basis_degree(ctx, 8), ctx.rule)
    images = [transform_A(setup, h, ctx.rule, ctx.config.degree) for h in basis]
    gram = np.array([[b_inner(setup, a, b) for b in images] for a in images])
    return [ctx.deviation(np.max(np.abs(gram - np.eye(len(images)))), ctx.tol(1e-7))]


@check("transforms.C_unitarity")
def _c_unitarity(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    half = setup.at_time(setup.t / 2.0)
    m = _basis_degree(ctx, 8)
    basis = hermite_basis(setup, m, ctx.rule)
    transferred = [g_map(setup, transform_C(setup, h, ctx.rule, ctx.config.degree)) for h in basis]
    gram = np.array([[b_inner(half, a, b) for b in transferred] for a in transferred])
    records: List[BaseRecord] = [ctx.deviation(np.max(np.abs(gram - np.eye(len(basis)))), ctx.tol(1e-6))]

    coeffs = ctx.rng.standard_normal(len(basis)) + 1j * ctx.rng.standard_normal(len(basis))
    combination = SampledFunction(
        lambda q: coeffs @ hermite_function_values(setup, m, q), label="random"
    )
    image = transform_C(setup, combination, ctx.rule, ctx.config.degree)
    norm = np.sqrt(c_inner(setup, image, image).real)
    records.append(
        ctx.compare(norm, np.linalg.norm(coeffs), ctx.tol(1e-6), CheckMode.REL, "transforms.C_isometry_random")
    )
    return records


def _sample_x(setup: MultiplicitySetup) -> np.ndarray:
    return _diagonal_points(setup, [0.0, 0.5, 1.2])


@check("transforms.restriction_of_C")
def _restriction_of_c(ctx: CheckContext) -> List[BaseRecord]:
    # R C = e^(t Delta / 2)
    setup = ctx.setup
    x = _sample_x(setup)
    records: List[BaseRecord] = []
    for h in hermite_basis(setup, 3, ctx.rule)[:4]:
        lhs = restrict(transform_C(setup, h, ctx.rule, ctx.config.degree))(x)
        rhs = heat_apply(setup, setup.t, h, ctx.rule)(x)
        records.append(ctx.compare(lhs, rhs, ctx.tol(1e-8), psi=h.label))
    return records


@check("transforms.RR_star")
def _rr_star(ctx: CheckContext) -> List[BaseRecord]:
    # R R* = e^(t Delta)
    setup = ctx.setup
    x = _sample_x(setup)
    records: List[BaseRecord] = []
    for h in hermite_basis(setup, 4, ctx.rule)[:5]:
        lhs = restrict(restrict_adjoint(setup, h, ctx.rule2t, ctx.config.degree))(x)
        rhs = heat_apply(setup, 2.0 * setup.t, h, ctx.rule)(x)
        records.append(ctx.compare(lhs, rhs, ctx.tol(1e-8), psi=h.label))
    return records


@check("transforms.heat_gaussian")
def _heat_gaussian(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    a = 1.0 / (2.0 * setup.t)
    x = _diagonal_points(setup, [0.0, 0.8, 1.6, 2.4])
    flowed = heat_apply(setup, setup.t, gaussian_function(a), ctx.rule)(x)
    return [ctx.compare(flowed, heat_gaussian(setup, a, setup.t)(x), ctx.tol(1e-9), CheckMode.REL)]


@check("transforms.semigroup")
def _semigroup(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    half = setup.t / 2.0
    if setup.N > 1:
        # nested heat flows cost (nodes^N)^2 kernel evaluations; the kernel
        # factors over coordinates, so the one-variable law covers this setup
        x = ctx.rng.standard_normal((4, setup.N))
        y = ctx.rng.standard_normal((4, setup.N))
        factors = [
            heat_kernel(MultiplicitySetup.of(kj, setup.t), x[:, [j]], y[:, [j]], half)
            for j, kj in enumerate(setup.k)
        ]
        return [
            ctx.compare(
                heat_kernel(setup, x, y, half),
                np.prod(factors, axis=0),
                ctx.tol(1e-12),
                CheckMode.REL,
                "transforms.semigroup_product",
            ),
            ctx.info(
                "semigroup law checked in one variable; the heat kernel on R^N is the "
                "product of the one-variable kernels of each k_j"
            ),
        ]
    h = hermite_basis(setup, 4, ctx.rule)[4]
    x = _diagonal_points(setup, [0.0, 0.6, 1.4])
    twice = heat_apply(setup, half, heat_apply(setup, half, h, ctx.rule), ctx.rule)(x)
    once = heat_apply(setup, setup.t, h, ctx.rule)(x)
    return [ctx.compare(twice, once, ctx.tol(1e-8))]


@check("transforms.dunkl_gaussian")
def _dunkl_gaussian(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    s = setup.t
    x = _diagonal_points(setup, [0.0, 0.7, 1.5])
    transformed = dunkl_transform(setup, s, gaussian_function(1.0 / (2.0 * s)), ctx.rule)(x)
    return [ctx.compare(transformed, np.exp(-np.sum(x**2, axis=-1) / (2.0 * s)), ctx.tol(1e-9))]


@check("transforms.dunkl_restriction_identity")
def _dt_identity(ctx: CheckContext) -> List[BaseRecord]:
    # R* psi(-ix) = e^(x^2/4t) F_{2t}(e^(-q^2/4t) psi)(x)
    setup = ctx.setup
    t = setup.t
    h = hermite_basis(setup, 3, ctx.rule)[3]
    x = _diagonal_points(setup, [0.3, 1.1])
    lhs = evaluate(restrict_adjoint(setup, h, ctx.rule2t, ctx.config.degree), -1j * x)
    damped = SampledFunction(lambda q: np.exp(-np.sum(q**2, axis=-1) / (4.0 * t)) * h(q), label="damped")
    rhs = np.exp(np.sum(x**2, axis=-1) / (4.0 * t)) * dunkl_transform(setup, 2.0 * t, damped, ctx.rule2t)(x)
    return [ctx.compare(lhs, rhs, ctx.tol(1e-8))]


@check("transforms.diagram")
def _diagram(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    records: List[BaseRecord] = []
    for h in hermite_basis(setup, 4, ctx.rule)[:5]:
        report = diagram_check(setup, h, ctx.rule, ctx.config.degree)
        records.append(
            ctx.deviation(max(report.max_coeff_err, report.max_point_err), ctx.tol(1e-7), psi=h.label)
        )
        records.append(ctx.deviation(report.ca_relation_err, ctx.tol(1e-10), "transforms.CA_relation", psi=h.label))
        records.append(ctx.deviation(report.scaling_err, ctx.tol(1e-10), "transforms.A_scaling", psi=h.label))
    return records


@check("transforms.kernel_identities")
def _kernel_identities(ctx: CheckContext) -> List[BaseRecord]:
    z = _complex_ball(ctx.rng, 5, ctx.setup.N, 1.5)
    w = _complex_ball(ctx.rng, 5, ctx.setup.N, 1.5)
    report = kernel_identities_check(ctx.setup, list(zip(z, w)), ctx.rule)
    return [
        ctx.deviation(report.a_from_rho_err, ctx.tol(1e-12), "transforms.A_from_rho"),
        ctx.deviation(report.b_kernel_integral_err, ctx.tol(1e-8), "transforms.K_integral"),
        ctx.deviation(report.b_kernel_rho_err, ctx.tol(1e-10), "transforms.K_from_rho"),
    ]


@check("transforms.pointwise")
def _pointwise(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    h = hermite_basis(setup, 2, ctx.rule)[-1]
    z = _complex_ball(ctx.rng, 10, setup.N, 1.5)
    series = transform_C(setup, h, ctx.rule, ctx.config.degree)
    direct = transform_pointwise(setup, h, ctx.rule, z, kind="C")
    return [ctx.compare(evaluate(series, z), direct, ctx.tol(1e-9))]


@check("transforms.moment_pipeline")
def _moment_pipeline(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    h = hermite_basis(setup, 1, ctx.rule)[-1]
    degree = ctx.config.degree
    low = multi_index_norms(degree, setup.N) <= 10
    by_recurrence = transform_C(setup, h, ctx.rule, degree).coeffs[low]
    by_moments = transform_C(setup, h, ctx.rule, degree, method="moments").coeffs[low]
    return [ctx.compare(by_moments, by_recurrence, ctx.tol(1e-8), CheckMode.REL)]


@check("transforms.unitary_factors")
def _unitary_factors(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    t = setup.t
    h = hermite_basis(setup, 3)[-1]
    nodes = min(ctx.config.nodes, 40)
    records: List[BaseRecord] = [
        # F1 dilates by 2^-1/2, so a rule at time 2t is exact; F1* needs t/2
        ctx.compare(l2_norm(setup, f1_op(setup, h), ctx.rule_at(2.0 * t, nodes)), 1.0, ctx.tol(1e-10), CheckMode.REL, "transforms.F1_unitarity"),
        ctx.compare(l2_norm(setup, f1_adjoint(setup, h), ctx.rule_at(t / 2.0, nodes)), 1.0, ctx.tol(1e-10), CheckMode.REL, "transforms.F1_unitarity", adjoint=True),
    ]

    degree = ctx.config.degree
    image = transform_C(setup, hermite_basis(setup, 2, ctx.rule)[-1], ctx.rule, degree)
    low = multi_index_norms(degree, setup.N) <= degree // 2
    round_trip = f2_adjoint(setup, f2_op(setup, image))
    records.append(
        ctx.compare(round_trip.coeffs[low], image.coeffs[low], ctx.tol(1e-10), check_id="transforms.F2_inverse")
    )

    half = setup.at_time(t / 2.0)
    dilated = []
    plain = []
    for n in basis_indices(setup.N, 10):
        monomial = CoeffSeries.monomial(n, 10)
        shrunk = dilate_series(monomial, 2.0**-0.5)
        dilated.append(b_inner(setup, shrunk, shrunk).real)
        plain.append(b_inner(half, monomial, monomial).real)
    records.append(ctx.compare(dilated, plain, ctx.tol(1e-13), CheckMode.REL, "transforms.D_isometry"))
    return records


@check("transforms.not_restriction")
def _not_restriction(ctx: CheckContext) -> List[BaseRecord]:
    # F1 R F2* f(x) = 2^-(gamma+N/2) e^(-x^2/8t) f(x/2)
    setup = ctx.setup
    l0 = c_kernel(setup, np.zeros(setup.N), ctx.config.degree)
    x = _diagonal_points(setup, [0.0, 0.5, 1.7])
    composed = f1_op(setup, restrict(f2_adjoint(setup, l0)))(x)
    return [ctx.compare(composed, not_restriction_op(setup, l0)(x), ctx.tol(1e-8))]


# ---- polar -------------------------------------------------------------------


def _polar_sizes(ctx: CheckContext) -> Tuple[int, int, int, int]:
    """(max_deg, codomain pad, degree cap, nodes per axis) of the polar comparisons."""
    config = ctx.config
    if ctx.setup.N == 1:
        max_deg, pad = config.basis, CERTIFICATE_PAD
        degree = max(config.degree, max_deg + pad)
        return max_deg, pad, degree, max(config.nodes, degree + ORDER_HEADROOM)
    max_deg = min(config.basis, 4)
    pad = NDIM_CERTIFICATE_PAD
    degree = max_deg + pad
    return max_deg, pad, degree, degree + ORDER_HEADROOM


@check("polar.svd")
def _svd(ctx: CheckContext) -> List[BaseRecord]:
    size = 6
    q1, _ = np.linalg.qr(ctx.rng.standard_normal((size, size)) + 1j * ctx.rng.standard_normal((size, size)))
    q2, _ = np.linalg.qr(ctx.rng.standard_normal((size, size)) + 1j * ctx.rng.standard_normal((size, size)))
    sigma = np.linspace(5.0, 0.5, size)
    _, found, _ = svd(OperatorMatrix(q1 @ np.diag(sigma) @ q2.conj().T))
    records: List[BaseRecord] = [ctx.compare(found, sigma, ctx.tol(1e-11), CheckMode.REL)]

    angle = 0.3
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    factor = polar_factor(OperatorMatrix(rotation @ np.diag([2.0, 1.0]))).entries
    records.append(ctx.compare(factor, rotation, ctx.tol(1e-11), CheckMode.ABS, "polar.rotation"))
    return records


@check("polar.U_equals_C")
def _restriction_principle(ctx: CheckContext) -> List[BaseRecord]:
    # R* = C |R*| with |R*| = e^(t Delta / 2) identifies the polar factor with C
    setup = ctx.setup
    max_deg, pad, degree, nodes = _polar_sizes(ctx)
    rule = ctx.rule_at(setup.t, nodes)
    rule2t = ctx.rule_at(2.0 * setup.t, nodes)
    report = verify_restriction_principle(setup, max_deg, rule, rule2t, degree, pad)
    sizes = {"max_deg": max_deg, "pad": pad}
    records: List[BaseRecord] = [
        ctx.deviation(report.factorization_err, ctx.tol(1e-5), **sizes),
        ctx.deviation(report.isometry_err, ctx.tol(1e-10), "polar.isometry", **sizes),
        ctx.deviation(max(0.0, report.sigma_max - 1.0), ctx.tol(1e-8), "polar.norm_bound", **sizes),
    ]
    if setup.N == 1:
        records.append(ctx.deviation(report.rr_star_err, ctx.tol(1e-5), "polar.RR_star", **sizes))

    coarse_err = None
    if max_deg >= 6:
        coarse = verify_restriction_principle(setup, max_deg - 4, rule, rule2t, degree, pad)
        coarse_err = coarse.leading_column_err
    records.append(
        ctx.info(
            f"sigma in [{report.sigma_min:.3e}, {report.sigma_max:.6f}], "
            f"leading column {report.leading_column_err:.3e}, full block {report.full_block_err:.3e}, "
            f"RR* {report.rr_star_err:.3e}",
            coarse_leading_column_err=coarse_err,
            **report.model_dump(),
        )
    )
    return records


@check("polar.A_version")
def _a_version(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    max_deg, _, degree, nodes = _polar_sizes(ctx)
    report = verify_a_version_polar(
        setup, max_deg, ctx.rule_at(setup.t, nodes), ctx.rule_at(2.0 * setup.t, nodes), degree
    )
    return [
        ctx.deviation(report.leading_column_err, ctx.tol(leading_column_tol(max_deg)), max_deg=max_deg),
        ctx.info(
            f"full block {report.full_block_err:.3e}, modulus {report.modulus_err:.3e}",
            **report.model_dump(),
        ),
    ]


@check("polar.operator_norm")
def _operator_norm(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    nodes = 600 if setup.N == 1 else 150
    records: List[BaseRecord] = []
    for width in (2.0, 20.0):
        rule = ctx.rule_at(width**2, nodes)
        quotient = operator_norm_probe(setup, width, rule)
        closed = (1.0 + setup.t / width**2) ** (-setup.homogeneity)
        records.append(ctx.compare(quotient, closed, ctx.tol(1e-9), CheckMode.REL, width=width))
        records.append(ctx.deviation(max(0.0, quotient - 1.0), ctx.tol(1e-10), "polar.rayleigh_bound", width=width))
    return records


@check("polar.scale_invariance")
def _scale_invariance(ctx: CheckContext) -> List[BaseRecord]:
    setup = ctx.setup
    if setup.t != 1.0:
        return [ctx.info("S* is defined at t = 1 only")]
    max_deg = 3 if setup.N == 1 else 2
    m = sbso_adjoint_matrix(setup, max_deg, ctx.rule, ctx.config.degree)
    err = polar_of_scaled(m, mms_constant(setup) ** 0.5)
    return [ctx.deviation(err, ctx.tol(1e-12))]


def _run_check(ctx: CheckContext, check_id: str, fn: CheckFn) -> List[BaseRecord]:
    ctx.check_id = check_id
    ctx.rng = np.random.default_rng(
        [ctx.config.seed, zlib.crc32(ctx.setup.key.encode()), zlib.crc32(check_id.encode())]
    )
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericalWarning)
        try:
            records = fn(ctx)
        except Exception as e:
            records = [
                ErrorRecord(
                    message=f"{check_id} raised {type(e).__name__}: {e}",
                    check_id=check_id,
                    params=ctx.params,
                    error_type=type(e).__name__,
                    error_details=str(e),
                ),
                CheckRecord(
                    check_id=check_id,
                    params=ctx.params,
                    abs_err=math.inf,
                    rel_err=math.inf,
                    tol=0.0,
                    message=f"{check_id}: raised {type(e).__name__}",
                ),
            ]
    elapsed = (time.perf_counter() - start) * 1000.0
    out: List[BaseRecord] = []
    for record in records:
        if isinstance(record, CheckRecord):
            record.runtime_ms = elapsed
        out.append(record)
    for w in caught:
        if issubclass(w.category, NumericalWarning):
            out.append(
                WarningRecord(
                    message=str(w.message), check_id=check_id, params=ctx.params, category=w.category.__name__
                )
            )
    return out


def run_point(config: "SuiteConfig", setup: MultiplicitySetup) -> List[BaseRecord]:
    """All checks of the configured suites at one parameter point."""
    ctx = CheckContext(config=config, setup=setup)
    records: List[BaseRecord] = []
    for suite in config.suites:
        for check_id, fn in _REGISTRY[suite]:
            records.extend(_run_check(ctx, check_id, fn))
    return records
