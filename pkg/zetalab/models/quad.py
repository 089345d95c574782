from typing import Optional

from pydantic import BaseModel, model_validator


class LineQuadSpec(BaseModel):
    """Vertical line Re(s) = c sampled on [-T, T] with step dt"""
    c: float = 1.0
    T: float = 5000.0
    dt: float = 0.25
    adaptive: bool = False

    @model_validator(mode="after")
    def _check(self) -> "LineQuadSpec":
        if not self.T > 0:
            raise ValueError("T must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        return self


class QuadReport(BaseModel):
    """Quadrature estimate with its error budget.

    reference/deviation are filled when an independent value exists (closed form
    or sieve). imaginary_part is the residual of a real-valued integral; on
    mirrored grids it is zero by construction and contour_quad.parity_residual
    evaluates t < 0 directly instead.
    """
    estimate: float
    truncation_tail_bound: float
    discretization_estimate: float
    evaluations: int
    reference: Optional[float] = None
    deviation: Optional[float] = None
    imaginary_part: float = 0.0
    warning: Optional[str] = None
