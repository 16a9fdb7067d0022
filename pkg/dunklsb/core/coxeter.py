"""
Root-system context for Z_2^N: gamma_mu, the weight omega_{mu,t} and the
Macdonald-Mehta-Selberg constant c_mu.
"""

from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gammaln

from dunklsb.errors import DimensionMismatchError
from dunklsb.models.setup import MultiplicitySetup

if TYPE_CHECKING:
    from dunklsb.core.quadrature import QuadratureRule


def gamma_mu(setup: MultiplicitySetup) -> float:
    """Half the total multiplicity over R = {+-e_j}, i.e. sum_j k_j."""
    return setup.gamma


def log_mms_constant(k: ArrayLike) -> float:
    """log c_mu = sum_j [(k_j + 1/2) log 2 + log Gamma(k_j + 1/2)]."""
    k = np.asarray(k, dtype=float)
    return float(np.sum((k + 0.5) * np.log(2.0) + gammaln(k + 0.5)))


def mms_constant(setup: MultiplicitySetup) -> float:
    """
    The Macdonald-Mehta-Selberg constant c_mu = prod_j 2^(k_j+1/2) Gamma(k_j+1/2).

    Independent of t.
    """
    return float(np.exp(log_mms_constant(setup.k)))


def _as_points(setup: MultiplicitySetup, q: ArrayLike) -> NDArray:
    q = np.asarray(q, dtype=float)
    if q.ndim == 0:
        q = q.reshape(1)
    if q.shape[-1] != setup.N:
        raise DimensionMismatchError(
            f"point of dimension {q.shape[-1]} for setup with N={setup.N}"
        )
    return q


def log_weight_density(setup: MultiplicitySetup, q: ArrayLike) -> NDArray:
    """log omega_{mu,t}(q); -inf where some q_j = 0 with k_j > 0."""
    q = _as_points(setup, q)
    k = np.asarray(setup.k)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_abs = np.where(k > 0, 2.0 * k * np.log(np.abs(q)), 0.0)
    return (
        np.sum(log_abs, axis=-1)
        - log_mms_constant(setup.k)
        - setup.homogeneity * np.log(setup.t)
    )


def weight_density(setup: MultiplicitySetup, q: ArrayLike):
    """
    The density omega_{mu,t}(q) = c_mu^-1 t^-(gamma_mu + N/2) prod_j |q_j|^(2 k_j).

    Args:
        setup: multiplicity context
        q: a point of R^N, or an array of points with last axis N

    Returns:
        The density, a float for a single point or an array otherwise
    """
    value = np.exp(log_weight_density(setup, q))
    return float(value) if np.ndim(value) == 0 else value


def mms_constant_check(setup: MultiplicitySetup, rule: "QuadratureRule") -> float:
    """
    Integrate the defining integral of c_mu with a quadrature rule.

    The rule may be built for any reference weight of the same dimension
    (a pure Gaussian, k = 0, is the honest choice); the integrand is divided by
    the rule's own density so that the sum approximates
    int t^-(gamma+N/2) e^(-x^2/2t) prod |x_j|^(2 k_j) dx.
    """
    if rule.dim != setup.N:
        raise DimensionMismatchError(
            f"rule of dimension {rule.dim} for setup with N={setup.N}"
        )
    reference = MultiplicitySetup(N=rule.dim, k=rule.k, t=rule.t)
    x = rule.nodes
    k = np.asarray(setup.k)
    k_ref = np.asarray(reference.k)
    # ratio of |x|^(2k) / |x|^(2k_ref), finite at x_j = 0 only when k >= k_ref
    with np.errstate(divide="ignore", invalid="ignore"):
        powers = np.prod(np.abs(x) ** (2.0 * (k - k_ref)), axis=-1)
    powers = np.nan_to_num(powers, nan=0.0)
    log_scale = (
        log_mms_constant(reference.k)
        + reference.homogeneity * np.log(reference.t)
        - setup.homogeneity * np.log(setup.t)
    )
    gauss_ratio = np.exp(np.sum(x**2, axis=-1) * (1.0 / (2.0 * reference.t) - 1.0 / (2.0 * setup.t)))
    return float(np.exp(log_scale) * np.sum(rule.weights * powers * gauss_ratio))
