"""
Truncated Taylor series of entire functions on C^N.

A CoeffSeries stores the coefficients c_n of sum_n c_n z^n for every
multi-index with n_j <= D, as a complex array of shape (D+1,) * N.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from dunklsb.errors import DimensionMismatchError
from dunklsb.models.setup import MultiplicitySetup


@dataclass(frozen=True)
class CoeffSeries:
    coeffs: NDArray
    tail_flag: float = field(default=0.0)

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim < 1 or len(set(coeffs.shape)) != 1:
            raise ValueError(f"coefficients must form a cube (D+1,)^N, got {coeffs.shape}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return self.coeffs.ndim

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @classmethod
    def zeros(cls, dim: int, degree: int) -> "CoeffSeries":
        return cls(np.zeros((degree + 1,) * dim, dtype=complex))

    @classmethod
    def constant(cls, dim: int, degree: int, value: complex = 1.0) -> "CoeffSeries":
        return cls.monomial((0,) * dim, degree, value)

    @classmethod
    def monomial(cls, n: Sequence[int], degree: int, value: complex = 1.0) -> "CoeffSeries":
        """value * z^n, with n a multi-index."""
        n = tuple(int(nj) for nj in n)
        if any(nj > degree or nj < 0 for nj in n):
            raise ValueError(f"multi-index {n} outside the degree cap {degree}")
        coeffs = np.zeros((degree + 1,) * len(n), dtype=complex)
        coeffs[n] = value
        return cls(coeffs)

    def scaled(self, factor: complex) -> "CoeffSeries":
        return CoeffSeries(self.coeffs * factor, self.tail_flag * abs(factor))

    def __add__(self, other: "CoeffSeries") -> "CoeffSeries":
        _check_compatible(self, other)
        return CoeffSeries(self.coeffs + other.coeffs, self.tail_flag + other.tail_flag)

    def __sub__(self, other: "CoeffSeries") -> "CoeffSeries":
        _check_compatible(self, other)
        return CoeffSeries(self.coeffs - other.coeffs, self.tail_flag + other.tail_flag)

    def with_degree(self, degree: int) -> "CoeffSeries":
        """Pad with zeros or truncate to a new per-variable cap."""
        if degree >= self.degree:
            pad = [(0, degree - self.degree)] * self.dim
            return CoeffSeries(np.pad(self.coeffs, pad), self.tail_flag)
        index = (slice(0, degree + 1),) * self.dim
        discarded = float(np.sum(np.abs(self.coeffs))) - float(np.sum(np.abs(self.coeffs[index])))
        return CoeffSeries(self.coeffs[index], self.tail_flag + max(discarded, 0.0))

    def max_abs_difference(self, other: "CoeffSeries") -> float:
        _check_compatible(self, other)
        return float(np.max(np.abs(self.coeffs - other.coeffs)))


def _outer(vector: NDArray, dim: int) -> NDArray:
    out = vector
    for _ in range(dim - 1):
        out = np.multiply.outer(out, vector)
    return np.asarray(out, dtype=complex)


def _check_compatible(a: CoeffSeries, b: CoeffSeries) -> None:
    if a.coeffs.shape != b.coeffs.shape:
        raise DimensionMismatchError(f"series of shapes {a.coeffs.shape} and {b.coeffs.shape}")


def _power_table(z: NDArray, degree: int) -> NDArray:
    # shape (..., N, D+1)
    return z[..., None] ** np.arange(degree + 1)


def evaluate(s: CoeffSeries, z: ArrayLike):
    """
    Sum c_n z^n over the stored multi-indices.

    Args:
        s: the series
        z: a point of C^N or an array of points with last axis N

    Returns:
        A complex number for a single point, else an array over leading axes
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape[-1] != s.dim:
        raise DimensionMismatchError(
            f"point of dimension {z.shape[-1]} for a series in {s.dim} variables"
        )
    lead = z.shape[:-1]
    powers = _power_table(z.reshape(-1, s.dim), s.degree)
    letters = "abcdefgh"[: s.dim]
    spec = letters + "," + ",".join(f"M{c}" for c in letters) + "->M"
    value = np.einsum(spec, s.coeffs, *[powers[:, j, :] for j in range(s.dim)]).reshape(lead)
    return complex(value) if np.ndim(value) == 0 else value


def _gaussian_factor(a: complex, degree: int) -> NDArray:
    """Coefficients of e^(a x^2) up to x^degree in one variable."""
    out = np.zeros(degree + 1, dtype=complex)
    term = 1.0 + 0.0j
    for m in range(degree // 2 + 1):
        if m > 0:
            term = term * a / m
        out[2 * m] = term
    return out


def gaussian_multiply(s: CoeffSeries, a: complex) -> CoeffSeries:
    """
    Multiply by e^(a (z_1^2 + ... + z_N^2)).

    The product is formed at working degree 2D per variable and truncated to
    D; the discarded mass is added to tail_flag.
    """
    if a == 0:
        return s
    degree = s.degree
    work_degree = 2 * degree
    factor = _gaussian_factor(complex(a), work_degree)
    work = s.with_degree(work_degree).coeffs
    for axis in range(s.dim):
        moved = np.moveaxis(work, axis, 0)
        out = np.zeros_like(moved)
        for m in range(0, work_degree + 1, 2):
            out[m:] += factor[m] * moved[: work_degree + 1 - m]
        work = np.moveaxis(out, 0, axis)
    kept = work[(slice(0, degree + 1),) * s.dim]
    discarded = max(float(np.sum(np.abs(work)) - np.sum(np.abs(kept))), 0.0)
    return CoeffSeries(kept, s.tail_flag + discarded)


def dilate_series(s: CoeffSeries, lam: complex) -> CoeffSeries:
    """D_lam f(z) = f(lam z): c_n -> lam^|n| c_n."""
    if lam == 1:
        return s
    axis_powers = complex(lam) ** np.arange(s.degree + 1)
    return CoeffSeries(s.coeffs * _outer(axis_powers, s.dim), s.tail_flag)


def _g_exponent(setup: MultiplicitySetup) -> float:
    return setup.gamma / 2.0 + setup.N / 4.0


def g_map(setup: MultiplicitySetup, s: CoeffSeries) -> CoeffSeries:
    """
    Gf(w) = 2^(gamma/2 + N/4) f(2w) e^(w^2/t).

    Carries the C-space onto the B-space at time t/2.
    """
    _check_dimension(setup, s)
    dilated = dilate_series(s, 2.0)
    return gaussian_multiply(dilated, 1.0 / setup.t).scaled(2.0 ** _g_exponent(setup))


def g_inverse(setup: MultiplicitySetup, s: CoeffSeries) -> CoeffSeries:
    """G^-1 g(w) = 2^-(gamma/2 + N/4) e^(-w^2/4t) g(w/2)."""
    _check_dimension(setup, s)
    dilated = dilate_series(s, 0.5)
    return gaussian_multiply(dilated, -1.0 / (4.0 * setup.t)).scaled(2.0 ** -_g_exponent(setup))


def _check_dimension(setup: MultiplicitySetup, s: CoeffSeries) -> None:
    if s.dim != setup.N:
        raise DimensionMismatchError(f"series in {s.dim} variables for setup with N={setup.N}")


def multi_index_norms(degree: int, dim: int) -> NDArray:
    """|n| = n_1 + ... + n_N over the coefficient cube."""
    grids = np.meshgrid(*([np.arange(degree + 1)] * dim), indexing="ij")
    return np.sum(grids, axis=0)


def from_rank_one(values: Sequence[NDArray]) -> CoeffSeries:
    """Tensor product series prod_j f_j(z_j) from per-variable coefficient vectors."""
    out = np.asarray(values[0], dtype=complex)
    for v in values[1:]:
        out = np.multiply.outer(out, np.asarray(v, dtype=complex))
    return CoeffSeries(out)
