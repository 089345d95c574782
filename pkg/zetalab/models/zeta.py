import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, field_validator


class ComplexPoint(BaseModel):
    """s = sigma + i t"""
    model_config = ConfigDict(frozen=True)

    sigma: float
    t: float = 0.0

    @field_validator("sigma", "t")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("components of s must be finite")
        return v

    @classmethod
    def of(cls, s: complex) -> "ComplexPoint":
        s = complex(s)
        return cls(sigma=s.real, t=s.imag)

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    def conjugate(self) -> "ComplexPoint":
        return ComplexPoint(sigma=self.sigma, t=-self.t)


class EvalResult(BaseModel):
    """A value with its absolute error bound and the cutoffs that produced it"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: complex
    err_bound: float
    n_cutoff: int
    extra_terms: int = 0
    truncation_bound: Optional[float] = None
    rounding_bound: Optional[float] = None
    crude_tail_bound: Optional[float] = None
    warning: Optional[str] = None

    @field_validator("err_bound")
    @classmethod
    def _nonnegative(cls, v: float) -> float:
        if not v >= 0:
            raise ValueError("err_bound must be nonnegative")
        return v

    @field_validator("n_cutoff")
    @classmethod
    def _cutoff(cls, v: int) -> int:
        if v < 1:
            raise ValueError("n_cutoff must be at least 1")
        return v


class HurwitzDiagnostic(BaseModel):
    """Hurwitz's formula compared on sigma = 1 after extrapolating each side in eps"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    a: float
    t: float
    eps: List[float]
    lhs: complex
    rhs: complex
    residual: float
    lhs_spread: float
    rhs_spread: float
    diverged: bool
