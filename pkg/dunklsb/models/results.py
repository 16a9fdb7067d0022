"""
Result models returned by the composite checks of dunklsb.core.
"""

from typing import List

from pydantic import BaseModel, Field


class DiagramReport(BaseModel):
    """Discrepancies of A = F2 C F1* and of the kernel-level relations."""

    max_coeff_err: float
    max_point_err: float
    ca_relation_err: float
    scaling_err: float

    @property
    def worst(self) -> float:
        return max(self.max_coeff_err, self.max_point_err, self.ca_relation_err, self.scaling_err)


class KernelIdentityReport(BaseModel):
    """Maximum relative errors of the heat-kernel identities over a grid."""

    a_from_rho_err: float
    b_kernel_integral_err: float
    b_kernel_rho_err: float
    points: int = Field(ge=0)

    @property
    def worst(self) -> float:
        return max(self.a_from_rho_err, self.b_kernel_integral_err, self.b_kernel_rho_err)


class RestrictionReport(BaseModel):
    """Outcome of comparing the polar factor of the truncated R with C."""

    max_deg: int
    full_block_err: float
    leading_column_err: float
    isometry_err: float
    sigma_max: float
    sigma_min: float
    rr_star_err: float
    factorization_err: float
    singular_values: List[float] = Field(default_factory=list)


class PolarComparisonReport(BaseModel):
    """Polar factor of a truncated operator matrix against a target matrix."""

    max_deg: int
    full_block_err: float
    leading_column_err: float
    modulus_err: float
    sigma_max: float
    sigma_min: float
