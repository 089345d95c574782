import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class CoeffTable(BaseModel):
    """Coefficients f(1..n_max) of a finite Dirichlet series; coeffs[n-1] = f(n)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n_max: int
    coeffs: np.ndarray

    @model_validator(mode="after")
    def _check_shape(self) -> "CoeffTable":
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.coeffs.shape != (self.n_max,):
            raise ValueError(f"expected {self.n_max} coefficients, got shape {self.coeffs.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")
        return self

    def at(self, n: int) -> complex:
        return complex(self.coeffs[n - 1])
