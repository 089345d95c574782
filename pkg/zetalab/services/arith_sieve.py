import logging
import math

import numpy as np
import pandas as pd

from zetalab.core.config import get_settings
from zetalab.core.errors import CapacityError, DomainError, RangeError
from zetalab.models.arith import ArithTable, ChebyshevValues, TauberianBounds

logger = logging.getLogger(__name__)


def _primes_upto(n_max: int) -> tuple:
    """Eratosthenes on a boolean array; returns (primes, is_prime)"""
    is_prime = np.ones(n_max + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(n_max) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime), is_prime


def build_table(n_max: int) -> ArithTable:
    """Sieve Lambda, mu, lambda and primality for 1..n_max"""
    if n_max < 1:
        raise DomainError(f"n_max must be at least 1, got {n_max}")
    budget = get_settings().MAX_SIEVE_LIMIT
    if n_max > budget:
        raise CapacityError(f"n_max={n_max} exceeds the memory budget MAX_SIEVE_LIMIT={budget}")

    primes, is_prime = _primes_upto(n_max)

    mangoldt = np.zeros(n_max + 1, dtype=np.float64)
    mobius = np.ones(n_max + 1, dtype=np.int8)
    omega = np.zeros(n_max + 1, dtype=np.int8)  # Omega(n) mod 2 is all we need
    mobius[0] = 0

    log_p = np.log(primes.astype(np.float64))
    mangoldt[primes] = log_p
    for p, lp in zip(primes.tolist(), log_p.tolist()):
        mobius[p::p] *= -1
        omega[p::p] ^= 1
        pk = p * p
        if pk <= n_max:
            mobius[pk::pk] = 0
        while pk <= n_max:
            mangoldt[pk] = lp
            omega[pk::pk] ^= 1
            pk *= p

    liouville = (1 - 2 * omega).astype(np.int8)
    liouville[0] = 0

    theta_terms = np.where(is_prime, mangoldt, 0.0)
    table = ArithTable(
        limit=n_max,
        mangoldt=mangoldt,
        mobius=mobius,
        liouville=liouville,
        is_prime=is_prime,
        psi_prefix=np.cumsum(mangoldt),
        theta_prefix=np.cumsum(theta_terms),
        pi_prefix=np.cumsum(is_prime, dtype=np.int64),
    )
    for arr in (table.mangoldt, table.mobius, table.liouville, table.is_prime,
                table.psi_prefix, table.theta_prefix, table.pi_prefix):
        arr.setflags(write=False)

    logger.info(f"Sieve table built up to {n_max} ({len(primes)} primes)")
    return table


def _floor_in_range(t: ArithTable, x: float) -> int:
    if not x >= 0:
        raise RangeError(f"x must be nonnegative, got {x}")
    if x > t.limit:
        raise RangeError(f"x={x} exceeds the table limit {t.limit}")
    return int(math.floor(x))


def chebyshev_psi(t: ArithTable, x: float) -> float:
    return float(t.psi_prefix[_floor_in_range(t, x)])


def chebyshev_theta(t: ArithTable, x: float) -> float:
    return float(t.theta_prefix[_floor_in_range(t, x)])


def prime_pi(t: ArithTable, x: float) -> int:
    return int(t.pi_prefix[_floor_in_range(t, x)])


def _integer_root(n: int, m: int) -> int:
    """Largest r with r**m <= n"""
    r = int(round(n ** (1.0 / m)))
    while r > 0 and r ** m > n:
        r -= 1
    while (r + 1) ** m <= n:
        r += 1
    return r


def psi_via_theta(t: ArithTable, x: float) -> float:
    """psi(x) as the sum of theta(x^(1/m)) over m <= log2 x"""
    n = _floor_in_range(t, x)
    if n < 2:
        return 0.0
    # theta only sees floor(x^(1/m)) = floor(n^(1/m))
    total = 0.0
    for m in range(1, n.bit_length()):
        total += float(t.theta_prefix[_integer_root(n, m)])
    return total


def psi1(t: ArithTable, x: float) -> float:
    """sum_{n<=x} (x - n) Lambda(n), one pass over the table"""
    n = _floor_in_range(t, x)
    if n < 2:
        return 0.0
    weights = x - np.arange(1, n + 1, dtype=np.float64)
    return float(np.dot(weights, t.mangoldt[1:n + 1]))


def psi_integral(t: ArithTable, x: float) -> float:
    """int_1^x psi(u) du with psi constant on each [n, n+1)"""
    n = _floor_in_range(t, x)
    if n < 1:
        return 0.0
    return float(t.psi_prefix[1:n].sum() + t.psi_prefix[n] * (x - n))


def chebyshev_values(t: ArithTable, x: float) -> ChebyshevValues:
    return ChebyshevValues(
        x=x,
        psi=chebyshev_psi(t, x),
        theta=chebyshev_theta(t, x),
        psi1=psi1(t, x),
        pi=prime_pi(t, x),
    )


def abel_identity_check(t: ArithTable, x: float, k: int) -> float:
    """|sum Lambda(n) n^k - (psi(x) x^k - k int_1^x psi(u) u^(k-1) du)|

    The integral is exact: on [n, n+1) it equals psi(n) ((n+1)^k - n^k) / k.
    """
    if k not in (1, 2, 3):
        raise DomainError(f"k must be 1, 2 or 3, got {k}")
    n = _floor_in_range(t, x)
    if n < 1:
        return 0.0

    ns = np.arange(1, n + 1, dtype=np.float64)
    lhs = float(np.dot(t.mangoldt[1:n + 1], ns ** k))

    steps = (ns[:-1] + 1.0) ** k - ns[:-1] ** k
    k_integral = float(np.dot(t.psi_prefix[1:n], steps)) + float(t.psi_prefix[n]) * (x ** k - float(n) ** k)
    rhs = float(t.psi_prefix[n]) * x ** k - k_integral
    return abs(lhs - rhs)


def _slack(value: float) -> float:
    return get_settings().CHECK_SLACK * max(1.0, abs(value))


def tauberian_inequality_check(t: ArithTable, x: float, beta: float) -> bool:
    """psi1(beta x) - psi1(x) >= x (beta - 1) psi(x)"""
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")
    if not x >= 0:
        raise RangeError(f"x must be nonnegative, got {x}")
    _floor_in_range(t, beta * x)
    lhs = psi1(t, beta * x) - psi1(t, x)
    rhs = x * (beta - 1.0) * chebyshev_psi(t, x)
    return lhs >= rhs - _slack(rhs)


def tauberian_lower_check(t: ArithTable, x: float, alpha: float) -> bool:
    """psi1(x) - psi1(alpha x) <= x (1 - alpha) psi(x), the lim inf side"""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    _floor_in_range(t, x)
    lhs = psi1(t, x) - psi1(t, alpha * x)
    rhs = x * (1.0 - alpha) * chebyshev_psi(t, x)
    return lhs <= rhs + _slack(rhs)


def tauberian_sandwich(t: ArithTable, x: float, beta: float) -> TauberianBounds:
    """Bracket psi(x)/x using psi1 on [x/beta, x] and [x, beta x]"""
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")
    if not x > 0:
        raise RangeError(f"x must be positive, got {x}")
    _floor_in_range(t, beta * x)
    alpha = 1.0 / beta
    base = psi1(t, x)
    upper = (psi1(t, beta * x) - base) / (x * x * (beta - 1.0))
    lower = (base - psi1(t, alpha * x)) / (x * x * (1.0 - alpha))
    return TauberianBounds(
        x=x, beta=beta, alpha=alpha,
        lower=lower, upper=upper,
        psi_over_x=chebyshev_psi(t, x) / x,
    )


def table_frame(t: ArithTable) -> pd.DataFrame:
    return pd.DataFrame({
        "n": np.arange(1, t.limit + 1),
        "mangoldt": t.mangoldt[1:],
        "mobius": t.mobius[1:],
        "liouville": t.liouville[1:],
        "is_prime": t.is_prime[1:].astype(np.int8),
    })
