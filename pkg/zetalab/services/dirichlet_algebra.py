import logging
import math
from typing import Optional

import numpy as np

from zetalab.core.errors import DomainError, RangeError, SingularError
from zetalab.models.arith import ArithTable
from zetalab.models.dirichlet import CoeffTable
from zetalab.models.zeta import ComplexPoint, EvalResult

logger = logging.getLogger(__name__)


def coeff_table(values) -> CoeffTable:
    coeffs = np.asarray(values, dtype=np.complex128)
    return CoeffTable(n_max=int(coeffs.size), coeffs=coeffs)


def unit_table(n_max: int) -> CoeffTable:
    """Identity element e(n) = [n = 1]"""
    coeffs = np.zeros(n_max, dtype=np.complex128)
    coeffs[0] = 1.0
    return CoeffTable(n_max=n_max, coeffs=coeffs)


def ones_table(n_max: int) -> CoeffTable:
    return CoeffTable(n_max=n_max, coeffs=np.ones(n_max, dtype=np.complex128))


def _check_limit(table: ArithTable, n_max: int) -> None:
    if n_max < 1:
        raise DomainError(f"n_max must be at least 1, got {n_max}")
    if n_max > table.limit:
        raise RangeError(f"n_max={n_max} exceeds the table limit {table.limit}")


def mobius_table(table: ArithTable, n_max: int) -> CoeffTable:
    _check_limit(table, n_max)
    return coeff_table(table.mobius[1:n_max + 1])


def mangoldt_table(table: ArithTable, n_max: int) -> CoeffTable:
    _check_limit(table, n_max)
    return coeff_table(table.mangoldt[1:n_max + 1])


def convolve(f: CoeffTable, g: CoeffTable) -> CoeffTable:
    """(f*g)(n) = sum_{d|n} f(d) g(n/d) by harmonic enumeration over d"""
    if f.n_max != g.n_max:
        raise DomainError(f"size mismatch: {f.n_max} vs {g.n_max}")
    n_max = f.n_max
    h = np.zeros(n_max, dtype=np.complex128)
    for d in range(1, n_max + 1):
        fd = f.coeffs[d - 1]
        if fd != 0:
            h[d - 1::d] += fd * g.coeffs[:n_max // d]
    return CoeffTable(n_max=n_max, coeffs=h)


def dirichlet_inverse(f: CoeffTable) -> CoeffTable:
    """f^-1 with (f * f^-1) = e; each f^-1(n) is pushed to its multiples once known"""
    f1 = f.coeffs[0]
    if f1 == 0:
        raise SingularError("Dirichlet inverse needs f(1) != 0")
    n_max = f.n_max
    inv = np.zeros(n_max, dtype=np.complex128)
    # acc[n-1] = sum_{d|n, d<n} f(n/d) inv(d)
    acc = np.zeros(n_max, dtype=np.complex128)
    for n in range(1, n_max + 1):
        inv[n - 1] = ((1.0 if n == 1 else 0.0) - acc[n - 1]) / f1
        if 2 * n <= n_max:
            acc[2 * n - 1::n] += inv[n - 1] * f.coeffs[1:n_max // n]
    return CoeffTable(n_max=n_max, coeffs=inv)


def log_derivative_coeffs(f: CoeffTable) -> CoeffTable:
    """(f' * f^-1)(n) with f'(n) = f(n) log n"""
    inverse = dirichlet_inverse(f)
    log_n = np.log(np.arange(1, f.n_max + 1, dtype=np.float64))
    derived = CoeffTable(n_max=f.n_max, coeffs=f.coeffs * log_n)
    return convolve(derived, inverse)


def max_deviation(f: CoeffTable, g: CoeffTable) -> float:
    if f.n_max != g.n_max:
        raise DomainError(f"size mismatch: {f.n_max} vs {g.n_max}")
    return float(np.max(np.abs(f.coeffs - g.coeffs)))


def mangoldt_identity_deviation(table: ArithTable, n_max: int) -> float:
    """max |(log * mu)(n) - Lambda(n)| over n <= n_max"""
    _check_limit(table, n_max)
    derived = log_derivative_coeffs(ones_table(n_max))
    deviation = max_deviation(derived, mangoldt_table(table, n_max))
    logger.info(f"Lambda identity up to {n_max}: max deviation {deviation:.3g}")
    return deviation


def inverse_deviation(f: CoeffTable) -> float:
    """max |(f * f^-1)(n) - e(n)|"""
    return max_deviation(convolve(f, dirichlet_inverse(f)), unit_table(f.n_max))


def g_series(s: ComplexPoint, n_max: int, table: ArithTable) -> EvalResult:
    """G(s) = sum_{n>=2} Lambda(n) / log n * n^-s truncated at n_max.

    Lambda(n)/log n <= 1, so the tail is bounded by sum_{n>n_max} n^-sigma
    <= n_max^(1-sigma) / (sigma - 1).
    """
    if not s.sigma > 1:
        raise DomainError(f"G(s) converges for sigma > 1 only, got s = {s.s}")
    _check_limit(table, n_max)
    if n_max < 2:
        return EvalResult(value=0j, err_bound=1.0 / (s.sigma - 1.0), n_cutoff=1)

    n = np.arange(2, n_max + 1, dtype=np.float64)
    log_n = np.log(n)
    weights = table.mangoldt[2:n_max + 1] / log_n
    mask = weights > 0
    value = complex(np.sum(weights[mask] * np.exp(-s.s * log_n[mask])))
    tail = n_max ** (1.0 - s.sigma) / (s.sigma - 1.0)
    return EvalResult(value=value, err_bound=tail + 1e-15 * max(1.0, abs(value)), n_cutoff=n_max)


def exp_g_bound(g: EvalResult, zeta_err: Optional[float] = None) -> float:
    """Bound on |e^G - zeta| from the truncation of G plus the zeta evaluation error"""
    return math.exp(g.value.real) * math.expm1(g.err_bound) + (zeta_err or 0.0)
