"""
The Dunkl kernel E_mu and the Dunkl heat kernel rho_{mu,t} for Z_2^N.

For Z_2^N the kernel factorizes over coordinates,
E_mu(z, w) = prod_j E_{k_j}(z_j w_j), with the rank-one series

    E_k(x) = sum_n x^n / gamma_n(k),
    gamma_2m(k)   = 2^(2m)   m! (k+1/2)_m,
    gamma_2m+1(k) = 2^(2m+1) m! (k+1/2)_(m+1).

Two evaluation paths exist: the power series (any complex argument) and a
Bessel-function path on the real and imaginary axes, which stays accurate at
arguments where the series would overflow or cancel.
"""

from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gammaln, ive, jv

from dunklsb.errors import ConvergenceError, DimensionMismatchError
from dunklsb.models.setup import KernelEvalOptions, MultiplicitySetup

DEFAULT_OPTIONS = KernelEvalOptions()

# below this |x| the Bessel formulas lose accuracy to the 0 * inf form
_BESSEL_SWITCH = 1.0


def log_gamma_factor(k: float, n: ArrayLike) -> NDArray:
    """log gamma_n(k), vectorized over n."""
    n = np.asarray(n, dtype=int)
    if np.any(n < 0):
        raise ValueError("gamma_n(k) is defined for n >= 0 only")
    m = n // 2
    odd = n % 2
    a = k + 0.5
    return (
        n * np.log(2.0)
        + gammaln(m + 1.0)
        + gammaln(a + m + odd)
        - gammaln(a)
    )


def gamma_factor(k: float, n: int) -> float:
    """
    The rank-one normalization gamma_n(k); gamma_n(0) = n!.

    Raises:
        OverflowError: if gamma_n(k) exceeds the double range
    """
    log_value = float(log_gamma_factor(k, n))
    if log_value > 709.0:
        raise OverflowError(f"gamma_{n}({k}) overflows (log value {log_value:.1f})")
    return float(np.exp(log_value))


def gamma_ratio(k: float, n: ArrayLike) -> NDArray:
    """gamma_n(k) / gamma_(n-1)(k) = n + 2k [n odd], for n >= 1."""
    n = np.asarray(n)
    return n + 2.0 * k * (n % 2)


def rank_one_series(
    k: float, x: ArrayLike, opts: KernelEvalOptions = DEFAULT_OPTIONS
) -> NDArray:
    """
    Sum E_k(x) = sum_n x^n / gamma_n(k) for complex x, elementwise.

    Terms are generated by the ratio x / (n + 2k [n odd]) so nothing overflows
    before the terms themselves do; the partial sums use Kahan compensation.

    Raises:
        ConvergenceError: if the tail is still above tolerance after
            opts.max_terms terms; the attained tail estimate is attached
    """
    x = np.asarray(x, dtype=complex)
    total = np.ones_like(x)
    compensation = np.zeros_like(x)
    term = np.ones_like(x)
    peak = np.ones(x.shape)
    active = np.ones(x.shape, dtype=bool)
    abs_x = np.abs(x)
    tail = np.zeros(x.shape)
    for n in range(1, opts.max_terms + 1):
        term = np.where(active, term * x / gamma_ratio(k, n), 0.0)
        y = term - compensation
        updated = total + y
        compensation = np.where(active, (updated - total) - y, compensation)
        total = np.where(active, updated, total)
        abs_term = np.abs(term)
        peak = np.maximum(peak, abs_term)
        scale = np.maximum(np.abs(total), 1e-16 * peak)
        tail = abs_term * (1.0 + abs_x / (n + 1.0))
        done = (n > abs_x) & (tail <= opts.tail_tol * scale)
        active &= ~done
        if not active.any():
            return total
    worst = float(np.max(np.where(active, tail / np.maximum(np.abs(total), 1e-300), 0.0)))
    raise ConvergenceError(
        f"rank-one Dunkl series did not converge in {opts.max_terms} terms "
        f"(relative tail {worst:.3e})",
        residual=worst,
    )


def log_rank_one_real(k: float, x: ArrayLike) -> NDArray:
    """
    log E_k(x) for real x through modified Bessel functions.

    E_k(x) = Gamma(k+1/2) (|x|/2)^(1/2-k) [I_(k-1/2)(|x|) +- I_(k+1/2)(|x|)],
    with + for x > 0 and - for x < 0; E_k is positive on the real line.
    Exponentially scaled Bessel functions keep this finite for |x| in the
    thousands.
    """
    x = np.asarray(x, dtype=float)
    if k == 0.0:
        return x.copy()
    out = np.empty_like(x)
    small = np.abs(x) < _BESSEL_SWITCH
    if small.any():
        out[small] = np.log(np.real(rank_one_series(k, x[small])))
    big = ~small
    if big.any():
        ax = np.abs(x[big])
        sign = np.sign(x[big])
        bracket = ive(k - 0.5, ax) + sign * ive(k + 0.5, ax)
        out[big] = gammaln(k + 0.5) + (0.5 - k) * np.log(ax / 2.0) + ax + np.log(bracket)
    return out


def rank_one_imag(k: float, y: ArrayLike) -> NDArray:
    """
    E_k(i y) for real y through Bessel functions of the first kind.

    E_k(iy) = j_(k-1/2)(y) + i y/(2k+1) j_(k+1/2)(y), where
    j_a(y) = Gamma(a+1) (2/y)^a J_a(y) is the normalized Bessel function.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty(y.shape, dtype=complex)
    small = np.abs(y) < _BESSEL_SWITCH
    if small.any():
        out[small] = rank_one_series(k, 1j * y[small])
    big = ~small
    if big.any():
        ay = np.abs(y[big])

        def normalized(a: float) -> NDArray:
            return np.exp(gammaln(a + 1.0) + a * np.log(2.0 / ay)) * jv(a, ay)

        out[big] = normalized(k - 0.5) + 1j * y[big] / (2.0 * k + 1.0) * normalized(k + 0.5)
    return out


def _paired(setup: MultiplicitySetup, z: ArrayLike, w: ArrayLike) -> Tuple[NDArray, NDArray]:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if z.shape[-1] != setup.N or w.shape[-1] != setup.N:
        raise DimensionMismatchError(
            f"arguments of dimension {z.shape[-1]}, {w.shape[-1]} for N={setup.N}"
        )
    return np.broadcast_arrays(z, w)


def _scalar_or_array(value: NDArray):
    return complex(value) if np.ndim(value) == 0 else value


def dunkl_kernel(
    setup: MultiplicitySetup,
    z: ArrayLike,
    w: ArrayLike,
    opts: KernelEvalOptions = DEFAULT_OPTIONS,
):
    """
    E_mu(z, w) = prod_j E_{k_j}(z_j w_j) for complex vectors.

    Args:
        setup: multiplicity context (t is not used)
        z, w: complex vectors, or broadcastable arrays with last axis N
        opts: series controls

    Returns:
        A complex number, or an array over the leading axes
    """
    z, w = _paired(setup, z, w)
    product = z * w
    value = np.ones(product.shape[:-1], dtype=complex)
    for j, kj in enumerate(setup.k):
        value = value * rank_one_series(kj, product[..., j], opts)
    return _scalar_or_array(value)


def heat_kernel(
    setup: MultiplicitySetup,
    z: ArrayLike,
    w: ArrayLike,
    s: float,
    opts: KernelEvalOptions = DEFAULT_OPTIONS,
):
    """
    rho_{mu,s}(z, w) = exp(-(z^2 + w^2)/2s) E_mu(z/sqrt(s), w/sqrt(s)).

    z^2 is the holomorphic square sum_j z_j^2, not |z|^2.
    """
    if s <= 0:
        raise ValueError(f"heat kernel time must be positive, got {s}")
    z, w = _paired(setup, z, w)
    gauss = np.exp(-(np.sum(z * z, axis=-1) + np.sum(w * w, axis=-1)) / (2.0 * s))
    return _scalar_or_array(gauss * dunkl_kernel(setup, z / np.sqrt(s), w / np.sqrt(s), opts))


def log_heat_kernel_real(setup: MultiplicitySetup, x: ArrayLike, q: ArrayLike, s: float) -> NDArray:
    """log rho_{mu,s}(x, q) for real arguments, via the Bessel path."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    x, q = np.broadcast_arrays(x, q)
    value = -(np.sum(x * x, axis=-1) + np.sum(q * q, axis=-1)) / (2.0 * s)
    for j, kj in enumerate(setup.k):
        value = value + log_rank_one_real(kj, x[..., j] * q[..., j] / s)
    return value


def kernel_bound_margin(
    setup: MultiplicitySetup,
    z: ArrayLike,
    w: ArrayLike,
    opts: Optional[KernelEvalOptions] = None,
):
    """exp(||z|| ||w||) - |E_mu(z, w)|; nonnegative whenever mu >= 0."""
    z, w = _paired(setup, z, w)
    norms = np.linalg.norm(z, axis=-1) * np.linalg.norm(w, axis=-1)
    value = np.exp(norms) - np.abs(dunkl_kernel(setup, z, w, opts or DEFAULT_OPTIONS))
    return float(value) if np.ndim(value) == 0 else value
