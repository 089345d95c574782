import numpy as np
from pydantic import BaseModel, ConfigDict


class ArithTable(BaseModel):
    """Sieve tables indexed directly by n (index 0 is unused and zero).

    mangoldt[n] is log p when n = p^m and 0 otherwise; mobius and liouville are
    int8; is_prime is boolean. The *_prefix arrays are cumulative sums over
    0..n backing O(1) queries of psi, theta and pi.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    limit: int
    mangoldt: np.ndarray
    mobius: np.ndarray
    liouville: np.ndarray
    is_prime: np.ndarray
    psi_prefix: np.ndarray
    theta_prefix: np.ndarray
    pi_prefix: np.ndarray


class ChebyshevValues(BaseModel):
    """psi, theta, psi1 and pi evaluated at one x"""
    x: float
    psi: float
    theta: float
    psi1: float
    pi: int


class TauberianBounds(BaseModel):
    """Bounds on psi(x)/x obtained from psi1 by differencing over [x/beta, beta*x]"""
    x: float
    beta: float
    alpha: float
    lower: float
    upper: float
    psi_over_x: float
