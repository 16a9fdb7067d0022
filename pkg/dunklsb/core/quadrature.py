"""
Gauss quadrature for the generalized-Hermite weights.

A rule built for (k, t) integrates against the probability measure

    d nu_{mu,t}(q) = e^(-q^2/2t) d omega_{mu,t}(q),

so its weights sum to one. The orthonormal polynomials of this measure obey
a three-term recurrence with zero diagonal and closed-form off-diagonals,
which also gives the nodes and weights through the Golub-Welsch eigen-solve.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import LinAlgError, eig_banded
from scipy.special import poch

from dunklsb.errors import ConvergenceError, QuadratureError, RuleSizeError
from dunklsb.models.setup import MultiplicitySetup

MAX_TENSOR_NODES = 10_000_000


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes of shape (M, dim) and positive weights of shape (M,)."""

    dim: int
    nodes: NDArray
    weights: NDArray
    order: int
    k: Tuple[float, ...]
    t: float

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def setup(self) -> MultiplicitySetup:
        return MultiplicitySetup(N=self.dim, k=self.k, t=self.t)

    @property
    def span(self) -> float:
        """Largest absolute node coordinate."""
        return float(np.max(np.abs(self.nodes)))


def jacobi_offdiagonals(k: float, t: float, n: int) -> NDArray:
    """
    The squared off-diagonals beta_1..beta_n of the Jacobi matrix.

    beta_m = t (m + 2k [m odd]); the diagonal vanishes because the weight is
    even.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    m = np.arange(1, n + 1, dtype=float)
    return t * (m + 2.0 * k * (m % 2))


def _solve_golub_welsch(k: float, t: float, n: int) -> Tuple[NDArray, NDArray]:
    band = np.zeros((2, n))
    if n > 1:
        band[0, 1:] = np.sqrt(jacobi_offdiagonals(k, t, n - 1))
    try:
        nodes, vectors = eig_banded(band)
    except LinAlgError as e:
        raise ConvergenceError(f"Jacobi eigen-solve failed for k={k}, t={t}, n={n}: {e}") from e
    # Christoffel numbers 1 / sum_n p_n(x)^2 keep full relative accuracy at the
    # outer nodes, where squared eigenvector components do not
    weights = 1.0 / np.sum(orthonormal_polynomial_values(k, t, n - 1, nodes) ** 2, axis=0)
    # enforce the exact reflection symmetry of the weight
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights / np.sum(weights)


def gauss_rule_1d(k: float, t: float, n: int, use_cache: bool = False) -> QuadratureRule:
    """
    The n-point Gauss rule for |x|^(2k) e^(-x^2/2t), normalized.

    Args:
        k: multiplicity, k >= 0
        t: time parameter, t > 0
        n: number of nodes
        use_cache: read and write the on-disk rule cache

    Returns:
        A one-dimensional rule, exact for polynomials of degree <= 2n - 1
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    cached = None
    if use_cache:
        from dunklsb.models.storage import load_quadrature

        cached = load_quadrature(k, t, n)
    if cached is not None:
        nodes, weights = cached
    else:
        nodes, weights = _solve_golub_welsch(k, t, n)
        if use_cache:
            from dunklsb.models.storage import save_quadrature

            save_quadrature(k, t, n, nodes, weights)
    return QuadratureRule(
        dim=1,
        nodes=np.asarray(nodes, dtype=float).reshape(-1, 1),
        weights=np.asarray(weights, dtype=float),
        order=n,
        k=(float(k),),
        t=float(t),
    )


def tensor_rule(setup: MultiplicitySetup, n_per_dim: int, use_cache: bool = False) -> QuadratureRule:
    """
    Full tensor product of the per-coordinate rules for setup.k at setup.t.

    Raises:
        RuleSizeError: if n_per_dim ** N exceeds MAX_TENSOR_NODES
    """
    if n_per_dim < 1:
        raise ValueError(f"need n_per_dim >= 1, got {n_per_dim}")
    total = n_per_dim**setup.N
    if total > MAX_TENSOR_NODES:
        raise RuleSizeError(f"{total} tensor nodes exceed the limit of {MAX_TENSOR_NODES}")
    factors = [gauss_rule_1d(kj, setup.t, n_per_dim, use_cache) for kj in setup.k]
    if setup.N == 1:
        return factors[0]
    grids = np.meshgrid(*[f.nodes[:, 0] for f in factors], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*[f.weights for f in factors], indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return QuadratureRule(
        dim=setup.N, nodes=nodes, weights=weights, order=n_per_dim, k=setup.k, t=setup.t
    )


def integrate(rule: QuadratureRule, f: Callable[[NDArray], ArrayLike]) -> complex:
    """
    Sum w_i f(x_i) over the rule.

    f receives all nodes at once, shape (M, dim), and returns M values.

    Raises:
        QuadratureError: if f fails or returns a non-finite value; the index
            of the first offending node is attached
    """
    try:
        values = np.asarray(f(rule.nodes), dtype=complex).reshape(-1)
    except (ArithmeticError, ValueError) as e:
        index = _first_failing_node(rule, f)
        raise QuadratureError(f"integrand failed at node {index}: {e}", node_index=index) from e
    if values.shape[0] != rule.size:
        raise QuadratureError(f"integrand returned {values.shape[0]} values for {rule.size} nodes")
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        index = int(bad[0])
        raise QuadratureError(
            f"integrand not finite at node {index} ({rule.nodes[index]})", node_index=index
        )
    return complex(np.sum(rule.weights * values))


def _first_failing_node(rule: QuadratureRule, f: Callable[[NDArray], ArrayLike]) -> Optional[int]:
    for i in range(rule.size):
        try:
            value = np.asarray(f(rule.nodes[i : i + 1]), dtype=complex)
        except (ArithmeticError, ValueError):
            return i
        if not np.all(np.isfinite(value)):
            return i
    return None


def moment_oracle(k: float, t: float, j: int) -> float:
    """int q^(2j) d nu_{k,t} in one dimension: (2t)^j (k+1/2)_j."""
    if j < 0:
        raise ValueError(f"moment index must be nonnegative, got {j}")
    return float((2.0 * t) ** j * poch(k + 0.5, j))


def orthonormal_polynomial_values(k: float, t: float, n_max: int, x: ArrayLike) -> NDArray:
    """
    Values of the orthonormal polynomials p_0..p_{n_max} of nu_{k,t} at x.

    Returns an array of shape (n_max + 1,) + x.shape, built by the
    recurrence sqrt(beta_{n+1}) p_{n+1} = x p_n - sqrt(beta_n) p_{n-1}.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max == 0:
        return out
    root_beta = np.sqrt(jacobi_offdiagonals(k, t, n_max))
    out[1] = x / root_beta[0]
    for n in range(1, n_max):
        out[n + 1] = (x * out[n] - root_beta[n - 1] * out[n - 1]) / root_beta[n]
    return out


def tensor_orthonormal_values(setup: MultiplicitySetup, n_max: int, nodes: NDArray) -> NDArray:
    """
    Products prod_j p^(j)_{n_j}(x_j) over the multi-index box n_j <= n_max.

    Returns shape (n_max + 1,) * N + (M,) for nodes of shape (M, N).
    """
    nodes = np.atleast_2d(nodes)
    factors = [
        orthonormal_polynomial_values(kj, setup.t, n_max, nodes[:, j])
        for j, kj in enumerate(setup.k)
    ]
    if setup.N == 1:
        return factors[0]
    letters = "abcdefgh"[: setup.N]
    spec = ",".join(f"{c}z" for c in letters) + "->" + letters + "z"
    return np.einsum(spec, *factors)
