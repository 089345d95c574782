from pydantic import BaseModel, model_validator

from zetalab.models.zeta import ComplexPoint


class GridSpec(BaseModel):
    """sigma linear on [sigma_min, sigma_max]; t log-spaced on [t_min, t_max]"""
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float
    n_sigma: int = 2
    n_t: int = 2

    @model_validator(mode="after")
    def _check(self) -> "GridSpec":
        if self.sigma_min > self.sigma_max:
            raise ValueError("sigma_min must not exceed sigma_max")
        if not 0 < self.t_min <= self.t_max:
            raise ValueError("need 0 < t_min <= t_max")
        # a single row/column is allowed only for a degenerate range
        if self.n_sigma < 1 or (self.n_sigma < 2 and self.sigma_min != self.sigma_max):
            raise ValueError("n_sigma must be at least 2")
        if self.n_t < 1 or (self.n_t < 2 and self.t_min != self.t_max):
            raise ValueError("n_t must be at least 2")
        return self

    def doubled(self) -> "GridSpec":
        return self.model_copy(update={
            "n_sigma": self.n_sigma if self.sigma_min == self.sigma_max else 2 * self.n_sigma,
            "n_t": 2 * self.n_t,
        })


class ScanReport(BaseModel):
    grid: GridSpec
    extremum: float
    arg_extremum: ComplexPoint
    empirical_constant: float
    samples: int
