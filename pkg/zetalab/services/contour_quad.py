"""Mellin kernel, the regularised log-derivative h(s) and line quadrature.

Every line integral here is a composite trapezoid sum over a grid symmetric in
t. The discretization estimate is |I_h - I_2h| from the same samples. The
truncation tail is the integral of the integrand's modulus bound beyond +-T.
"""
import logging
import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from zetalab.core.config import get_settings
from zetalab.core.errors import DomainError
from zetalab.models.arith import ArithTable
from zetalab.models.quad import LineQuadSpec, QuadReport
from zetalab.models.zeta import ComplexPoint
from zetalab.services import arith_sieve
from zetalab.services.zeta_eval import extrapolate_to_zero, zeta_em, zeta_grid, zeta_prime_em

logger = logging.getLogger(__name__)

NEAR_POLE = 1e-3
_RICHARDSON_LEVELS = 3
_MAX_HALVINGS = 4
# fraction of QUAD_TOLERANCE the step-halving estimate must reach in adaptive mode
_ADAPTIVE_TARGET = 1e-3


def _trapezoid_grid(T: float, dt: float) -> Tuple[float, int]:
    """Step and half-count for nodes j*step, |j| <= n_half, with n_half even"""
    n_half = 2 * math.ceil(T / (2.0 * dt))
    return T / n_half, n_half


def _trapezoid(values: np.ndarray, step: float) -> complex:
    return complex(trapezoid(values, dx=step))


def _mirror(half: np.ndarray) -> np.ndarray:
    """Full symmetric grid from t >= 0 samples of a conjugate-symmetric integrand"""
    return np.concatenate([np.conj(half[:0:-1]), half])


def _bracket(s: complex) -> complex:
    """-zeta'/zeta(s) - 1/(s-1) away from s = 1"""
    p = ComplexPoint.of(s)
    return -zeta_prime_em(p).value / zeta_em(p).value - 1.0 / (s - 1.0)


def _bracket_near_pole(s: complex) -> complex:
    """Even-symmetric averages around s, extrapolated in delta^2.

    The offset is taken perpendicular to s - 1 so no sample comes closer to the
    pole than delta.
    """
    offset = s - 1.0
    direction = 1j * offset / abs(offset) if offset != 0 else 1.0
    deltas = NEAR_POLE * 2.0 ** -np.arange(_RICHARDSON_LEVELS)
    averages = np.array([
        0.5 * (_bracket(s + d * direction) + _bracket(s - d * direction)) for d in deltas
    ])
    return extrapolate_to_zero(deltas ** 2, averages)


def h_function(s: ComplexPoint) -> complex:
    """h(s) = (-zeta'/zeta(s) - 1/(s-1)) / (s(s+1)), analytic at s = 1"""
    if s.sigma < 1:
        raise DomainError(f"h is evaluated for sigma >= 1, got s = {s.s}")
    z = s.s
    if abs(z - 1.0) < NEAR_POLE:
        bracket = _bracket_near_pole(z)
    else:
        bracket = _bracket(z)
    return complex(bracket / (z * (z + 1.0)))


def h_on_line(c: float, t_values, tol: Optional[float] = None) -> np.ndarray:
    """h(c + it) for an array of t; points within NEAR_POLE of s = 1 go through h_function"""
    if c < 1:
        raise DomainError(f"h is evaluated for sigma >= 1, got c = {c}")
    t_values = np.asarray(t_values, dtype=np.float64)
    s = c + 1j * t_values
    near = np.abs(s - 1.0) < NEAR_POLE
    out = np.empty(s.shape, dtype=np.complex128)
    if np.any(~near):
        far = s[~near]
        values, derivs, _ = zeta_grid(c, t_values[~near], tol=tol)
        out[~near] = (-derivs / values - 1.0 / (far - 1.0)) / (far * (far + 1.0))
    for idx in np.flatnonzero(near):
        out.flat[idx] = h_function(ComplexPoint(sigma=c, t=float(t_values.flat[idx])))
    return out


# keyed by tol too; settings may change between runs
@lru_cache(maxsize=16)
def _h_half_line(c: float, step: float, n_half: int, tol: float) -> np.ndarray:
    values = h_on_line(c, step * np.arange(n_half + 1), tol)
    values.setflags(write=False)
    return values


@lru_cache(maxsize=16)
def _log_derivative_half_line(c: float, step: float, n_half: int, tol: float) -> np.ndarray:
    t = step * np.arange(n_half + 1)
    values, derivs, _ = zeta_grid(c, t, tol=tol)
    out = -derivs / values
    out.setflags(write=False)
    return out


def kernel_integral(u: float, k: int, spec: LineQuadSpec) -> QuadReport:
    """(1/2pi) int_{-T}^{T} u^-(c+it) / prod_{j<=k} (c+it+j) dt against (1-u)^k/k! or 0"""
    if not u > 0:
        raise DomainError(f"u must be positive, got {u}")
    if k not in (1, 2):
        raise DomainError(f"k must be 1 or 2, got {k}")
    if not spec.c > 0:
        raise DomainError(f"c must be positive, got {spec.c}")

    tolerance = get_settings().QUAD_TOLERANCE
    log_u = math.log(u)
    step, n_half = _trapezoid_grid(spec.T, spec.dt)
    evaluations = 0
    for level in range(_MAX_HALVINGS + 1):
        t = step * np.arange(-n_half, n_half + 1)
        s = spec.c + 1j * t
        denom = np.ones_like(s)
        for j in range(k + 1):
            denom = denom * (s + j)
        values = np.exp(-s * log_u) / denom
        evaluations += values.size
        fine = _trapezoid(values, step) / (2.0 * math.pi)
        coarse = _trapezoid(values[::2], 2.0 * step) / (2.0 * math.pi)
        discretization = abs(fine - coarse)
        if not spec.adaptive or discretization <= tolerance * _ADAPTIVE_TARGET or level == _MAX_HALVINGS:
            break
        step, n_half = step / 2.0, 2 * n_half

    reference = (1.0 - u) ** k / math.factorial(k) if u <= 1 else 0.0
    return QuadReport(
        estimate=fine.real,
        truncation_tail_bound=u ** (-spec.c) * 2.0 / (k * spec.T ** k),
        discretization_estimate=discretization,
        evaluations=evaluations,
        reference=reference,
        deviation=abs(fine.real - reference),
        imaginary_part=fine.imag,
    )


def _effective_step(spec: LineQuadSpec, x: float) -> float:
    """dt <= min(0.25, pi / (4 log x)) keeps e^(it log x) resolved"""
    cap = 0.25 if x <= 1 else min(0.25, math.pi / (4.0 * math.log(x)))
    if spec.dt > cap:
        logger.debug(f"dt={spec.dt} reduced to {cap:.6g} for x={x}")
    return min(spec.dt, cap)


def _line_quadrature(half_values, spec: LineQuadSpec, x: float) -> Tuple[complex, float, int]:
    """Trapezoid sums of half_values(step, n)(t) * e^(it log x), refined when adaptive"""
    tolerance = get_settings().QUAD_TOLERANCE
    log_x = math.log(x)
    step, n_half = _trapezoid_grid(spec.T, _effective_step(spec, x))
    evaluations = 0
    for level in range(_MAX_HALVINGS + 1):
        half = half_values(step, n_half) * np.exp(1j * log_x * step * np.arange(n_half + 1))
        evaluations += n_half + 1
        full = _mirror(half)
        fine = _trapezoid(full, step)
        coarse = _trapezoid(full[::2], 2.0 * step)
        discretization = abs(fine - coarse) / (2.0 * math.pi)
        if not spec.adaptive or discretization <= tolerance * _ADAPTIVE_TARGET or level == _MAX_HALVINGS:
            break
        step, n_half = step / 2.0, 2 * n_half
    return fine / (2.0 * math.pi), discretization, evaluations


def envelope_tail_integral(T: float, envelope: float) -> float:
    """(C/pi) int_T^inf (log t)^9 / t^2 dt = (C/pi) 9! / T sum_{j<=9} (log T)^j / j!"""
    if T < math.e:
        raise DomainError(f"the envelope is used for T >= e, got T = {T}")
    log_t = math.log(T)
    series = sum(log_t ** j / math.factorial(j) for j in range(10))
    return envelope / math.pi * math.factorial(9) / T * series


def psi1_target(x: float, table: ArithTable) -> float:
    """psi1(x)/x^2 - (1 - 1/x)^2 / 2 from the sieve"""
    return arith_sieve.psi1(table, x) / (x * x) - 0.5 * (1.0 - 1.0 / x) ** 2


def reconstruct_psi1(x: float, spec: LineQuadSpec, table: ArithTable,
                     envelope: Optional[float] = None) -> QuadReport:
    """x^(c-1)/(2pi) int_{-T}^{T} h(c+it) e^(it log x) dt compared with the sieve value"""
    if not x >= 1:
        raise DomainError(f"x must be at least 1, got {x}")
    if spec.c < 1:
        raise DomainError(f"c must be at least 1, got {spec.c}")
    if spec.T < math.e:
        raise DomainError(f"T must be at least e, got {spec.T}")
    envelope = get_settings().H_ENVELOPE_CONSTANT if envelope is None else envelope

    integral, discretization, evaluations = _line_quadrature(
        lambda step, n: _h_half_line(spec.c, step, n, get_settings().ZETA_TOLERANCE), spec, x)
    scale = x ** (spec.c - 1.0)
    estimate = scale * integral.real
    reference = psi1_target(x, table)
    report = QuadReport(
        estimate=estimate,
        truncation_tail_bound=scale * envelope_tail_integral(spec.T, envelope),
        discretization_estimate=scale * discretization,
        evaluations=evaluations,
        reference=reference,
        deviation=abs(estimate - reference),
        imaginary_part=scale * integral.imag,
    )
    tolerance = get_settings().QUAD_TOLERANCE
    if report.truncation_tail_bound > tolerance:
        report.warning = f"tail bound {report.truncation_tail_bound:.3g} exceeds tolerance {tolerance:.3g}"
        logger.warning(f"reconstruct_psi1 x={x} T={spec.T}: {report.warning}")
    logger.info(f"reconstruct_psi1 x={x} c={spec.c} T={spec.T}: deviation {report.deviation:.3g}")
    return report


def mellin_psi1_direct(x: float, c: float, spec: LineQuadSpec, table: ArithTable) -> QuadReport:
    """(1/2pi i) int x^(s-1) / (s(s+1)) (-zeta'/zeta)(s) ds on Re s = c > 1 against psi1(x)/x^2"""
    if not c > 1:
        raise DomainError(f"c must exceed 1, got {c}")
    if not x >= 1:
        raise DomainError(f"x must be at least 1, got {x}")

    def half_values(step: float, n_half: int) -> np.ndarray:
        s = c + 1j * step * np.arange(n_half + 1)
        return _log_derivative_half_line(c, step, n_half, get_settings().ZETA_TOLERANCE) / (s * (s + 1.0))

    integral, discretization, evaluations = _line_quadrature(half_values, spec, x)
    scale = x ** (c - 1.0)
    estimate = scale * integral.real
    reference = arith_sieve.psi1(table, x) / (x * x)
    log_derivative_at_c = -zeta_prime_em(ComplexPoint(sigma=c)).value.real / zeta_em(ComplexPoint(sigma=c)).value.real
    return QuadReport(
        estimate=estimate,
        truncation_tail_bound=scale * log_derivative_at_c / (math.pi * spec.T),
        discretization_estimate=scale * discretization,
        evaluations=evaluations,
        reference=reference,
        deviation=abs(estimate - reference),
        imaginary_part=scale * integral.imag,
    )


def horizontal_segment_bound(T: float, c: float, x: float, envelope: Optional[float] = None) -> float:
    """M x^(c-1) (log T)^9 (c-1) / T^2 for the segments joining Re s = 1 and Re s = c at height T"""
    if T < math.e:
        raise DomainError(f"T must be at least e, got {T}")
    if c < 1:
        raise DomainError(f"c must be at least 1, got {c}")
    if x < 1:
        raise DomainError(f"x must be at least 1, got {x}")
    envelope = get_settings().H_ENVELOPE_CONSTANT if envelope is None else envelope
    return envelope * x ** (c - 1.0) * math.log(T) ** 9 * (c - 1.0) / (T * T)


def parity_residual(c: float, spec: LineQuadSpec, x: float = 1.0) -> float:
    """|Im int h(c+it) e^(it log x) dt| relative to int |h|, with t < 0 sampled directly.

    The reconstruction only samples t >= 0 and mirrors them, so its imaginary
    part vanishes by construction. Here both halves are evaluated.
    """
    if not x >= 1:
        raise DomainError(f"x must be at least 1, got {x}")
    step, n_half = _trapezoid_grid(spec.T, _effective_step(spec, x))
    t = step * np.arange(-n_half, n_half + 1)
    values = h_on_line(c, t, get_settings().ZETA_TOLERANCE) * np.exp(1j * math.log(x) * t)
    integral = _trapezoid(values, step)
    scale = float(trapezoid(np.abs(values), dx=step))
    residual = abs(integral.imag) / scale if scale > 0 else 0.0
    logger.info(f"parity_residual c={c} T={spec.T} x={x}: {residual:.3g}")
    return residual


def integrand_frame(c: float, spec: LineQuadSpec, x: float = 1.0) -> pd.DataFrame:
    """t, Re h(c+it), Im h(c+it) on the reconstruction grid for x"""
    step, n_half = _trapezoid_grid(spec.T, _effective_step(spec, x))
    half = _h_half_line(c, step, n_half, get_settings().ZETA_TOLERANCE)
    return pd.DataFrame({
        "t": step * np.arange(-n_half, n_half + 1),
        "re_h": _mirror(half).real,
        "im_h": _mirror(half).imag,
    })
