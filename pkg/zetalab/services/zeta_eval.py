"""Zeta, zeta', Hurwitz zeta, periodic zeta and complex gamma in sigma > 0.

Evaluation follows the Euler summation representation

    zeta(s) = sum_{n<=N} n^-s + N^(1-s)/(s-1) - s * int_N^inf {x} x^(-s-1) dx

with the fractional-part integral summed interval by interval in closed form
for ``extra_terms`` unit intervals. The remaining integral from K = N + extra
is expanded with Bernoulli corrections. The reported ``err_bound`` is the
standard remainder bound plus a bound on floating-point rounding, which grows
with the number of terms and with |s|. The Hurwitz variant (nodes n + a
instead of n) is an extension of the same scheme.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from zetalab.core.config import get_settings
from zetalab.core.errors import DomainError, PoleError, RangeError
from zetalab.models.arith import ArithTable
from zetalab.models.zeta import ComplexPoint, EvalResult, HurwitzDiagnostic

logger = logging.getLogger(__name__)

PointLike = Union[ComplexPoint, complex, float]

_EPS = np.finfo(np.float64).eps
_LOG_2PI = math.log(2.0 * math.pi)

# B_2j / (2j)! for j = 1..9; the first _EM_TERMS are summed, the next bounds the remainder
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
]
_EM_COEFFS = [float(b / math.factorial(2 * j)) for j, b in enumerate(_BERNOULLI, start=1)]
_EM_TERMS = 8

# Lanczos, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_X0 = 0.99999999999980993
_LANCZOS = [
    676.5203681218851, -1259.1392167224028, 771.32342877765313,
    -176.61502916214059, 12.507343278686905, -0.13857109526572012,
    9.9843695780195716e-6, 1.5056327351493116e-7,
]

_CHUNK_ELEMENTS = 1 << 21
_MAX_EXTRA = 1 << 20


def _as_point(s: PointLike) -> ComplexPoint:
    return s if isinstance(s, ComplexPoint) else ComplexPoint.of(s)


def default_cutoff(t: float) -> int:
    return max(30, math.ceil(2.0 * abs(t)))


def _remainder_bound(s: np.ndarray, K: float) -> np.ndarray:
    """Bound on the Bernoulli remainder after _EM_TERMS corrections at K"""
    poch = np.ones_like(s)
    for i in range(2 * _EM_TERMS + 1):
        poch = poch * (s + i)
    m2 = 2 * _EM_TERMS + 1
    sigma = s.real
    return (abs(_EM_COEFFS[_EM_TERMS]) * np.abs(poch) * K ** (-sigma - m2)
            * np.abs(s + m2) / (sigma + m2))


def _choose_extra(s: np.ndarray, a: float, last: int, tol: float) -> int:
    """Intervals needed to reach the smallest K = 16 * 2^j whose remainder meets tol.

    K does not depend on the cutoff, so N + extra never shrinks as N grows.
    """
    b = a + last
    K = 16.0
    while np.max(_remainder_bound(s, K)) > tol and K < b + _MAX_EXTRA:
        K *= 2.0
    return min(_MAX_EXTRA, max(0, math.ceil(K - b)))


def _em_core(s: np.ndarray, a: float, last: int, extra: int, derivative: bool):
    """Evaluate sum_{n=0}^{last} (n+a)^-s continued to sigma > 0, and optionally d/ds.

    Returns (value, dvalue or None, truncation, rounding, crude_tail_bound) as
    arrays over s. ``rounding`` bounds floating-point error: each computed
    power x^-s carries a relative error of order eps (2 + |s| log x), and each
    reduction adds eps * depth * (sum of magnitudes).
    """
    abs_s = np.abs(s)
    depth = 1.0 + math.log2(last + 2 + extra)

    nodes = a + np.arange(last + 1, dtype=np.float64)
    log_nodes = np.log(nodes)
    powers = np.exp(-np.outer(s, log_nodes))
    value = powers.sum(axis=1)
    dvalue = -(powers @ log_nodes) if derivative else None

    amp = np.abs(powers)
    power_err = 2.0 + depth + abs_s[:, None] * log_nodes
    rnd = (amp * power_err).sum(axis=1)
    drnd = (amp * log_nodes * (1.0 + power_err)).sum(axis=1) if derivative else None

    b = float(nodes[-1])
    lb = float(log_nodes[-1])
    sm1 = s - 1.0
    bp = np.exp((1.0 - s) * lb)
    pole = bp / sm1
    value = value + pole
    pole_err = 4.0 + np.abs(sm1) * lb
    rnd = rnd + np.abs(pole) * pole_err
    if derivative:
        dvalue = dvalue - bp * lb / sm1 - bp / sm1 ** 2
        drnd = drnd + (np.abs(pole) * lb + np.abs(pole / sm1)) * (1.0 + pole_err)

    if extra > 0:
        k = b + np.arange(extra, dtype=np.float64)
        lk = np.log(k)
        lk1 = np.log(k + 1.0)
        one_ms = (1.0 - s)[:, None]
        ss = s[:, None]
        p1k = np.exp(one_ms * lk)
        p1k1 = np.exp(one_ms * lk1)
        p0k = np.exp(-ss * lk)
        p0k1 = np.exp(-ss * lk1)
        # int_k^{k+1} (x-k) x^(-s-1) dx
        J = (p1k1 - p1k) / one_ms + k * (p0k1 - p0k) / ss
        interval_sum = J.sum(axis=1)
        value = value - s * interval_sum

        interval_err = 4.0 + depth + (abs_s[:, None] + 1.0) * lk1
        mag1 = (np.abs(p1k) + np.abs(p1k1)) / np.abs(one_ms)
        mag0 = k * (np.abs(p0k) + np.abs(p0k1)) / np.abs(ss)
        rnd = rnd + abs_s * ((mag1 + mag0) * interval_err).sum(axis=1)
        if derivative:
            def f1(p, lg):
                return p * (lg / one_ms - 1.0 / one_ms ** 2)

            def f2(p, lg):
                return -p * (lg / ss + 1.0 / ss ** 2)

            # int_k^{k+1} (x-k) log x x^(-s-1) dx
            L = (f1(p1k1, lk1) - f1(p1k, lk)) - k * (f2(p0k1, lk1) - f2(p0k, lk))
            dvalue = dvalue - interval_sum + s * L.sum(axis=1)
            lmag = (mag1 * (lk1 + 1.0 / np.abs(one_ms)) + mag0 * (lk1 + 1.0 / np.abs(ss)))
            drnd = drnd + (((mag1 + mag0) + abs_s[:, None] * lmag) * (1.0 + interval_err)).sum(axis=1)

    K = b + extra
    lK = math.log(K)
    Ks = np.exp(-s * lK)
    value = value - 0.5 * Ks
    tail_err = 4.0 + abs_s * lK
    rnd = rnd + 0.5 * np.abs(Ks) * tail_err
    if derivative:
        dvalue = dvalue + 0.5 * Ks * lK
        drnd = drnd + 0.5 * np.abs(Ks) * lK * (1.0 + tail_err)

    poch = s.copy()
    dlogpoch = 1.0 / s
    Kpow = Ks / K
    for j, coeff in enumerate(_EM_COEFFS[:_EM_TERMS], start=1):
        term = coeff * poch * Kpow
        value = value + term
        rnd = rnd + np.abs(term) * (tail_err + 2.0 * j)
        if derivative:
            dvalue = dvalue + term * (dlogpoch - lK)
            drnd = drnd + np.abs(term) * (np.abs(dlogpoch) + lK) * (1.0 + tail_err + 2.0 * j)
        poch = poch * (s + (2 * j - 1)) * (s + 2 * j)
        dlogpoch = dlogpoch + 1.0 / (s + (2 * j - 1)) + 1.0 / (s + 2 * j)
        Kpow = Kpow / (K * K)

    m2 = 2 * _EM_TERMS + 1
    sigma = s.real
    remainder = np.abs(_EM_COEFFS[_EM_TERMS] * poch * Kpow) * np.abs(s + m2) / (sigma + m2)
    # with derivative, the bounds cover both value and dvalue
    truncation = remainder
    rounding = _EPS * (rnd + 4.0 * np.abs(value))
    if derivative:
        truncation = np.maximum(remainder, remainder * (lK + np.abs(dlogpoch)))
        rounding = np.maximum(rounding, _EPS * (drnd + 4.0 * np.abs(dvalue)))
    crude = abs_s * K ** (-sigma) / sigma
    return value, dvalue, truncation, rounding, crude


def _check_half_plane(p: ComplexPoint) -> None:
    if not p.sigma > 0:
        raise DomainError(f"sigma must be positive, got s = {p.s}")
    if p.sigma == 1.0 and p.t == 0.0:
        raise DomainError("zeta has a pole at s = 1")


def _evaluate(p: ComplexPoint, a: float, last: int, n_cutoff: int, extra_terms: Optional[int],
              tol: Optional[float], derivative: bool) -> EvalResult:
    tol = get_settings().ZETA_TOLERANCE if tol is None else tol
    s = np.array([p.s], dtype=np.complex128)
    if extra_terms is None:
        extra_terms = _choose_extra(s, a, last, tol)
    elif extra_terms < 0:
        raise DomainError(f"extra_terms must be nonnegative, got {extra_terms}")

    value, dvalue, truncation, rounding, crude = _em_core(s, a, last, extra_terms, derivative)
    result = EvalResult(
        value=complex((dvalue if derivative else value)[0]),
        err_bound=float(truncation[0] + rounding[0]),
        n_cutoff=n_cutoff,
        extra_terms=extra_terms,
        truncation_bound=float(truncation[0]),
        rounding_bound=float(rounding[0]),
        crude_tail_bound=float(crude[0]),
    )
    # tol governs truncation only; rounding is fixed by the term count and |s|
    if result.truncation_bound > tol:
        result.warning = f"truncation bound {result.truncation_bound:.3g} exceeds tolerance {tol:.3g}"
        logger.warning(f"Accuracy shortfall at s={p.s}: {result.warning}")
    return result


def zeta_em(s: PointLike, n_cutoff: Optional[int] = None, extra_terms: Optional[int] = None,
            tol: Optional[float] = None) -> EvalResult:
    p = _as_point(s)
    _check_half_plane(p)
    n_cutoff = default_cutoff(p.t) if n_cutoff is None else n_cutoff
    if n_cutoff < 1:
        raise DomainError(f"n_cutoff must be at least 1, got {n_cutoff}")
    return _evaluate(p, 1.0, n_cutoff - 1, n_cutoff, extra_terms, tol, derivative=False)


def zeta_prime_em(s: PointLike, n_cutoff: Optional[int] = None, extra_terms: Optional[int] = None,
                  tol: Optional[float] = None) -> EvalResult:
    """zeta'(s); the truncation part of err_bound is the remainder bound scaled by its log-derivative"""
    p = _as_point(s)
    _check_half_plane(p)
    n_cutoff = default_cutoff(p.t) if n_cutoff is None else n_cutoff
    if n_cutoff < 1:
        raise DomainError(f"n_cutoff must be at least 1, got {n_cutoff}")
    return _evaluate(p, 1.0, n_cutoff - 1, n_cutoff, extra_terms, tol, derivative=True)


def hurwitz_zeta(s: PointLike, a: float, n_cutoff: Optional[int] = None,
                 extra_terms: Optional[int] = None, tol: Optional[float] = None) -> EvalResult:
    """zeta(s, a) = sum_{n>=0} (n+a)^-s, continued to sigma > 0"""
    p = _as_point(s)
    _check_half_plane(p)
    if not 0 < a <= 1:
        raise DomainError(f"a must lie in (0, 1], got {a}")
    n_cutoff = default_cutoff(p.t) if n_cutoff is None else n_cutoff
    if n_cutoff < 1:
        raise DomainError(f"n_cutoff must be at least 1, got {n_cutoff}")
    return _evaluate(p, a, n_cutoff, n_cutoff, extra_terms, tol, derivative=False)


def zeta_grid(sigma, t_values, threads: Optional[int] = None,
              tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """zeta, zeta' and err_bound at s = sigma + i t for arrays of points.

    Points are grouped by their default cutoff so each chunk shares one node
    set; chunks may run on a thread pool and are scattered back in order.
    """
    t_values = np.asarray(t_values, dtype=np.float64)
    s_all = (np.broadcast_to(np.asarray(sigma, dtype=np.float64), t_values.shape)
             + 1j * t_values).ravel()
    if s_all.size == 0:
        empty = np.empty(t_values.shape)
        return empty.astype(np.complex128), empty.astype(np.complex128), empty
    if np.any(s_all.real <= 0):
        raise DomainError("sigma must be positive on the whole grid")
    if np.any(s_all == 1.0):
        raise DomainError("zeta has a pole at s = 1")

    settings = get_settings()
    tol = settings.ZETA_TOLERANCE if tol is None else tol
    threads = settings.THREADS if threads is None else threads

    cutoffs = np.maximum(30, np.ceil(2.0 * np.abs(s_all.imag))).astype(np.int64)
    order = np.argsort(cutoffs, kind="stable")
    chunks = []
    start = 0
    while start < order.size:
        n_chunk = int(cutoffs[order[start]])
        stop = start + 1
        while stop < order.size:
            n_next = int(cutoffs[order[stop]])
            if (stop - start + 1) * n_next > _CHUNK_ELEMENTS or n_next > 2 * n_chunk:
                break
            stop += 1
        chunks.append(order[start:stop])
        start = stop

    def run(idx: np.ndarray):
        s = s_all[idx]
        n_cutoff = int(cutoffs[idx].max())
        extra = _choose_extra(s, 1.0, n_cutoff - 1, tol)
        return _em_core(s, 1.0, n_cutoff - 1, extra, derivative=True)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(idx) for idx in chunks]

    values = np.empty(s_all.size, dtype=np.complex128)
    derivs = np.empty(s_all.size, dtype=np.complex128)
    bounds = np.empty(s_all.size, dtype=np.float64)
    for idx, (v, dv, trunc, rnd, _) in zip(chunks, results):
        values[idx] = v
        derivs[idx] = dv
        bounds[idx] = trunc + rnd
    logger.debug(f"zeta_grid: {s_all.size} points in {len(chunks)} chunks")
    shape = t_values.shape
    return values.reshape(shape), derivs.reshape(shape), bounds.reshape(shape)


def periodic_zeta(x: float, s: PointLike, n_terms: Optional[int] = None) -> EvalResult:
    """F(x, s) = sum_n e^(2 pi i n x) n^-s by direct summation (sigma > 1)"""
    p = _as_point(s)
    if not p.sigma > 1:
        raise DomainError(f"periodic zeta needs sigma > 1, got s = {p.s}")
    n_terms = get_settings().PERIODIC_TERMS if n_terms is None else n_terms
    if n_terms < 1:
        raise DomainError(f"n_terms must be at least 1, got {n_terms}")

    frac = x - math.floor(x)
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    phase = np.mod(n * frac, 1.0)
    terms = np.exp(2j * math.pi * phase - p.s * np.log(n))
    value = complex(terms.sum())
    tail = n_terms ** (1.0 - p.sigma) / (p.sigma - 1.0)
    return EvalResult(
        value=value,
        err_bound=tail + 8.0 * _EPS * math.sqrt(n_terms) * (1.0 + abs(value)),
        n_cutoff=n_terms,
    )


def log_gamma(s: PointLike) -> complex:
    """log Gamma(s) by Lanczos for sigma >= 1/2 (principal pieces, not a continuous branch)"""
    p = _as_point(s)
    if p.sigma < 0.5:
        raise DomainError("log_gamma is evaluated for sigma >= 1/2; use gamma_fn elsewhere")
    z = p.s - 1.0
    x = _LANCZOS_X0
    for i, coeff in enumerate(_LANCZOS):
        x += coeff / (z + i + 1)
    tt = z + _LANCZOS_G + 0.5
    return 0.5 * _LOG_2PI + (z + 0.5) * np.log(tt) - tt + np.log(x)


def gamma_fn(s: PointLike) -> complex:
    """Complex Gamma; reflection Gamma(s) Gamma(1-s) = pi / sin(pi s) for sigma < 1/2"""
    p = _as_point(s)
    if p.t == 0.0 and p.sigma <= 0 and p.sigma == math.floor(p.sigma):
        raise PoleError(f"Gamma has a pole at s = {p.sigma:g}")
    if p.sigma < 0.5:
        reflected = gamma_fn(ComplexPoint(sigma=1.0 - p.sigma, t=-p.t))
        return complex(math.pi / (np.sin(math.pi * p.s) * reflected))
    return complex(np.exp(log_gamma(p)))


def functional_equation_residual(s: PointLike) -> float:
    """|zeta(1-s) - 2 (2 pi)^-s Gamma(s) cos(pi s / 2) zeta(s)| for 0 < sigma < 1"""
    p = _as_point(s)
    if not 0 < p.sigma < 1:
        raise DomainError(f"functional equation check needs 0 < sigma < 1, got s = {p.s}")
    lhs = zeta_em(ComplexPoint(sigma=1.0 - p.sigma, t=-p.t)).value
    factor = 2.0 * np.exp(-p.s * _LOG_2PI) * gamma_fn(p) * np.cos(math.pi * p.s / 2.0)
    rhs = factor * zeta_em(p).value
    return float(abs(lhs - rhs))


def zeta_reflected(s: PointLike) -> EvalResult:
    """zeta(s) for sigma <= 0 via zeta(s) = 2 (2 pi)^(s-1) Gamma(1-s) sin(pi s / 2) zeta(1-s)"""
    p = _as_point(s)
    if not p.sigma <= 0:
        raise DomainError(f"reflection is used for sigma <= 0, got s = {p.s}")
    if p.s == 0:
        # limit of sin(pi s / 2) zeta(1 - s) as s -> 0
        return EvalResult(value=complex(-0.5), err_bound=_EPS, n_cutoff=1)
    inner = zeta_em(ComplexPoint(sigma=1.0 - p.sigma, t=-p.t))
    factor = (2.0 * np.exp((p.s - 1.0) * _LOG_2PI) * gamma_fn(ComplexPoint(sigma=1.0 - p.sigma, t=-p.t))
              * np.sin(math.pi * p.s / 2.0))
    value = complex(factor * inner.value)
    return EvalResult(
        value=value,
        err_bound=float(abs(factor) * inner.err_bound + 1e-13 * abs(value)),
        n_cutoff=inner.n_cutoff,
        extra_terms=inner.extra_terms,
    )


def _theta(t: float) -> float:
    """Riemann-Siegel theta by its asymptotic series (accurate to ~1e-9 for t >= 10)"""
    return (0.5 * t * math.log(t / (2.0 * math.pi)) - 0.5 * t - math.pi / 8.0
            + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t ** 3))


def hardy_z(t: float) -> float:
    """Real-rotated zeta on the critical line, Z(t) = e^(i theta(t)) zeta(1/2 + i t)"""
    if not t >= 10:
        raise DomainError(f"hardy_z uses the asymptotic theta and needs t >= 10, got {t}")
    z = zeta_em(ComplexPoint(sigma=0.5, t=t)).value
    return float((np.exp(1j * _theta(t)) * z).real)


def locate_zero(t_lo: float, t_hi: float) -> float:
    """Critical-line zero between t_lo and t_hi from a sign change of Z"""
    z_lo, z_hi = hardy_z(t_lo), hardy_z(t_hi)
    if z_lo * z_hi > 0:
        raise DomainError(f"Z(t) has no sign change on [{t_lo}, {t_hi}]")
    return float(brentq(hardy_z, t_lo, t_hi, xtol=1e-12))


def extrapolate_to_zero(eps: np.ndarray, values: np.ndarray) -> complex:
    """Neville's scheme for the interpolating polynomial evaluated at eps = 0"""
    p = values.astype(np.complex128).copy()
    n = len(eps)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (eps[i + m] * p[i] - eps[i] * p[i + 1]) / (eps[i + m] - eps[i])
    return complex(p[0])


def _extrapolate_with_spread(eps: np.ndarray, values: np.ndarray) -> Tuple[complex, float]:
    """Extrapolant and its change when the coarsest sample is dropped"""
    full = extrapolate_to_zero(eps, values)
    reduced = extrapolate_to_zero(eps[1:], values[1:])
    return full, float(abs(full - reduced))


def hurwitz_formula_residual(a: float, s: PointLike, levels: int = 4,
                             n_terms: Optional[int] = None) -> HurwitzDiagnostic:
    """Hurwitz's formula compared at 1 + it, each side extrapolated from its own domain.

    zeta(1-s, a) is computable for sigma < 1 and F(., s) for sigma > 1, so both
    sides are sampled at sigma = 1 -/+ eps_j, eps_j = (sigma - 1) / 2^j, and
    extrapolated to eps = 0. The result is a reported diagnostic.
    """
    p = _as_point(s)
    if not 0 < a < 1:
        raise DomainError(f"a must lie in (0, 1), got {a}")
    if not p.sigma > 1:
        raise DomainError(f"sigma must exceed 1 to fix the eps schedule, got s = {p.s}")
    if levels < 2:
        raise DomainError("need at least two extrapolation levels")

    eps = (p.sigma - 1.0) / 2.0 ** np.arange(levels)
    lhs_vals = np.empty(levels, dtype=np.complex128)
    rhs_vals = np.empty(levels, dtype=np.complex128)
    for j, e in enumerate(eps):
        lhs_vals[j] = hurwitz_zeta(ComplexPoint(sigma=float(e), t=-p.t), a).value
        s_r = ComplexPoint(sigma=1.0 + float(e), t=p.t)
        f_a = periodic_zeta(a, s_r, n_terms).value
        f_minus_a = periodic_zeta(1.0 - a, s_r, n_terms).value
        rhs_vals[j] = (gamma_fn(s_r) * np.exp(-s_r.s * _LOG_2PI)
                       * (np.exp(-0.5j * math.pi * s_r.s) * f_a + np.exp(0.5j * math.pi * s_r.s) * f_minus_a))

    lhs, lhs_spread = _extrapolate_with_spread(eps, lhs_vals)
    rhs, rhs_spread = _extrapolate_with_spread(eps, rhs_vals)
    residual = abs(lhs - rhs)
    scale = max(1.0, abs(lhs))
    diverged = not (math.isfinite(residual) and lhs_spread < 1e-2 * scale and rhs_spread < 1e-2 * scale)
    if diverged:
        logger.warning(f"Hurwitz extrapolation did not settle (a={a}, t={p.t})")
    return HurwitzDiagnostic(
        a=a, t=p.t, eps=eps.tolist(), lhs=lhs, rhs=rhs, residual=float(residual),
        lhs_spread=lhs_spread, rhs_spread=rhs_spread, diverged=diverged,
    )


def euler_product_partial(s: PointLike, p_max: int, table: ArithTable) -> complex:
    """prod_{p <= p_max} (1 - p^-s)^-1, accumulated as a sum of logs"""
    p = _as_point(s)
    if not p.sigma > 1:
        raise DomainError(f"Euler product needs sigma > 1, got s = {p.s}")
    if p_max > table.limit:
        raise RangeError(f"p_max={p_max} exceeds the table limit {table.limit}")
    primes = np.flatnonzero(table.is_prime[:p_max + 1]).astype(np.float64)
    if primes.size == 0:
        return complex(1.0)
    log_terms = np.log1p(-np.exp(-p.s * np.log(primes)))
    return complex(np.exp(-log_terms.sum()))
