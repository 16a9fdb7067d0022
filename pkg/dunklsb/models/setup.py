"""
Parameter models shared by every numerical module.
"""

from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class MultiplicitySetup(BaseModel):
    """
    The (R, mu, t) context for the reflection group Z_2^N.

    The root system is R = {+-e_1, ..., +-e_N} and mu(+-e_j) = k[j], so the
    weight carries |q_j|^(2 k_j) and gamma_mu = sum(k).
    """

    model_config = ConfigDict(frozen=True)

    N: int = Field(ge=1)
    k: Tuple[float, ...]
    t: float = Field(gt=0.0)

    @field_validator("k")
    @classmethod
    def _nonnegative(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(kj < 0 for kj in value):
            raise ValueError(f"multiplicities must be nonnegative, got {value}")
        return tuple(float(kj) for kj in value)

    @model_validator(mode="after")
    def _consistent_dimension(self) -> "MultiplicitySetup":
        if len(self.k) != self.N:
            raise ValueError(f"expected {self.N} multiplicities, got {len(self.k)}")
        return self

    @classmethod
    def of(cls, k, t: float = 1.0) -> "MultiplicitySetup":
        """Build a setup from a scalar or a sequence of multiplicities."""
        if isinstance(k, (int, float)):
            k = (float(k),)
        k = tuple(k)
        return cls(N=len(k), k=k, t=t)

    def at_time(self, s: float) -> "MultiplicitySetup":
        """The same multiplicities at another value of Planck's constant."""
        return self.model_copy(update={"t": float(s)})

    @property
    def gamma(self) -> float:
        return float(sum(self.k))

    @property
    def homogeneity(self) -> float:
        """gamma_mu + N/2, the scaling exponent of the weight."""
        return self.gamma + self.N / 2.0

    @property
    def key(self) -> str:
        k_str = ",".join(f"{kj:g}" for kj in self.k)
        return f"k=({k_str}),t={self.t:g}"


class KernelEvalOptions(BaseModel):
    """Series controls for Dunkl kernel evaluation."""

    model_config = ConfigDict(frozen=True)

    max_terms: int = Field(default=200, ge=8)
    tail_tol: float = Field(default=1e-16, gt=0.0)
