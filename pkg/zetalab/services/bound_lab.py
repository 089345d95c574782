"""Grid scans for the zero-free-region inequalities and the PNT ratio tables.

Scans sample sigma linearly and t log-spaced. An inequality fails only when the
violation exceeds CHECK_SLACK plus the evaluator's own error bound. The failure
raises CheckFailedError carrying the report. Empirical constants are reported
and never compared against a target value.
"""
import logging
import math
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from zetalab.core.config import get_settings
from zetalab.core.errors import CheckFailedError, DomainError, RangeError
from zetalab.models.arith import ArithTable
from zetalab.models.scan import GridSpec, ScanReport
from zetalab.models.zeta import ComplexPoint
from zetalab.services import arith_sieve
from zetalab.services.contour_quad import h_on_line
from zetalab.services.zeta_eval import zeta_em, zeta_grid

logger = logging.getLogger(__name__)

NONVANISH_FLOOR = 1e-3
NONVANISH_REFINE_FACTOR = 2.0
TRIG_TOLERANCE = 1e-12
INVERSE_ROWS = (1.0, 1.25, 1.5, 2.0)
ZETA_2 = math.pi ** 2 / 6.0


def _axes(grid: GridSpec) -> Tuple[np.ndarray, np.ndarray]:
    sigmas = np.linspace(grid.sigma_min, grid.sigma_max, grid.n_sigma)
    ts = np.geomspace(grid.t_min, grid.t_max, grid.n_t)
    return sigmas, ts


def _report(grid: GridSpec, S: np.ndarray, T: np.ndarray, values: np.ndarray,
            constants: np.ndarray, use_max: bool) -> ScanReport:
    idx = int(np.argmax(values) if use_max else np.argmin(values))
    constant = np.max(constants) if use_max else np.min(constants)
    return ScanReport(
        grid=grid,
        extremum=float(values.flat[idx]),
        arg_extremum=ComplexPoint(sigma=float(S.flat[idx]), t=float(T.flat[idx])),
        empirical_constant=float(constant),
        samples=int(values.size),
    )


def _require_finite(*reports: ScanReport) -> None:
    for report in reports:
        if not (math.isfinite(report.extremum) and math.isfinite(report.empirical_constant)):
            raise CheckFailedError("scan produced a non-finite empirical constant", report=report)


def refinement_stable(coarse: float, fine: float, factor: float = 1.5) -> bool:
    """True when two positive estimates differ by at most `factor`"""
    if not (coarse > 0 and fine > 0 and math.isfinite(coarse) and math.isfinite(fine)):
        return False
    return max(coarse, fine) / min(coarse, fine) <= factor


def scan_341(grid: GridSpec) -> ScanReport:
    """min of zeta(s)^3 |zeta(s+it)|^4 |zeta(s+2it)| over the grid"""
    if not grid.sigma_min > 1:
        raise DomainError(f"the 3-4-1 product needs sigma > 1, got sigma_min = {grid.sigma_min}")
    slack = get_settings().CHECK_SLACK
    sigmas, ts = _axes(grid)
    S, T = np.meshgrid(sigmas, ts, indexing="ij")

    real_results = [zeta_em(ComplexPoint(sigma=float(s))) for s in sigmas]
    z0 = np.array([r.value.real for r in real_results])[:, None]
    e0 = np.array([r.err_bound for r in real_results])[:, None]
    z1, _, e1 = zeta_grid(S, T)
    z2, _, e2 = zeta_grid(S, 2.0 * T)

    product = z0 ** 3 * np.abs(z1) ** 4 * np.abs(z2)
    relative = 3.0 * e0 / z0 + 4.0 * e1 / np.abs(z1) + e2 / np.abs(z2)
    err = product * relative

    report = _report(grid, S, T, product, product, use_max=False)
    violation = (1.0 - product) - (slack + err)
    if np.any(violation > 0):
        raise CheckFailedError(f"3-4-1 product {report.extremum:.15g} falls below 1", report=report)
    logger.info(f"3-4-1 scan over {report.samples} points: min {report.extremum:.15g}")
    return report


def trig_identity_check(theta_samples: int) -> float:
    """max |3 + 4cos(a) + cos(2a) - 2(1 + cos(a))^2| on a uniform grid in [0, 2pi)"""
    if theta_samples < 1:
        raise DomainError(f"theta_samples must be at least 1, got {theta_samples}")
    theta = np.linspace(0.0, 2.0 * math.pi, theta_samples, endpoint=False)
    lhs = 3.0 + 4.0 * np.cos(theta) + np.cos(2.0 * theta)
    rhs = 2.0 * (1.0 + np.cos(theta)) ** 2
    residual = float(np.max(np.abs(lhs - rhs)))
    if residual > TRIG_TOLERANCE or float(np.min(lhs)) < -TRIG_TOLERANCE:
        raise CheckFailedError(f"trigonometric identity residual {residual:.3g}")
    return residual


def _line_grid(t_min: float, t_max: float, n: int) -> GridSpec:
    if not math.e <= t_min < t_max:
        raise DomainError(f"need e <= t_min < t_max, got [{t_min}, {t_max}]")
    return GridSpec(sigma_min=1.0, sigma_max=1.0, t_min=t_min, t_max=t_max, n_sigma=1, n_t=n)


def _nonvanishing_once(t_min: float, t_max: float, n: int) -> ScanReport:
    grid = _line_grid(t_min, t_max, n)
    _, ts = _axes(grid)
    values, _, err = zeta_grid(1.0, ts)
    modulus = np.abs(values)
    report = _report(grid, np.ones_like(ts), ts, modulus, modulus * np.log(ts) ** 7, use_max=False)
    if np.any(modulus - err <= NONVANISH_FLOOR):
        raise CheckFailedError(f"|zeta(1+it)| reached {report.extremum:.3g}", report=report)
    return report


def nonvanishing_scan(t_min: float, t_max: float, n: int, refine: bool = True) -> ScanReport:
    """min |zeta(1+it)| on log-spaced t; the constant is min |zeta(1+it)| (log t)^7.

    With ``refine`` the constant must hold within a factor 2 on 2n samples.
    """
    report = _nonvanishing_once(t_min, t_max, n)
    if refine:
        finer = _nonvanishing_once(t_min, t_max, 2 * n)
        if not refinement_stable(report.empirical_constant, finer.empirical_constant, NONVANISH_REFINE_FACTOR):
            raise CheckFailedError("nonvanishing constant not stable when n doubles", report=finer)
    logger.info(f"Nonvanishing scan: min |zeta(1+it)| = {report.extremum:.6g} at t = {report.arg_extremum.t:.6g}")
    return report


def _growth_once(grid: GridSpec) -> Tuple[ScanReport, ScanReport]:
    sigmas, ts = _axes(grid)
    S, T = np.meshgrid(sigmas, ts, indexing="ij")
    values, derivs, _ = zeta_grid(S, T)
    log_t = np.log(T)
    zeta_ratio = np.abs(values) / log_t
    deriv_ratio = np.abs(derivs) / log_t ** 2
    return (_report(grid, S, T, zeta_ratio, zeta_ratio, use_max=True),
            _report(grid, S, T, deriv_ratio, deriv_ratio, use_max=True))


def growth_scan(A: float, t_max: float, grid: GridSpec,
                refine: bool = True) -> Tuple[ScanReport, ScanReport]:
    """sup |zeta|/log t and sup |zeta'|/log^2 t over sigma >= max(1/2, 1 - A/log t)"""
    if not A > 0:
        raise DomainError(f"A must be positive, got {A}")
    if grid.t_min < math.e or grid.t_max > t_max:
        raise DomainError(f"grid t-range must lie in [e, {t_max}]")
    floor = max(0.5, 1.0 - A / math.log(grid.t_max))
    if grid.sigma_min < floor:
        raise DomainError(f"sigma_min={grid.sigma_min} lies outside sigma >= {floor:.6g}")

    reports = _growth_once(grid)
    _require_finite(*reports)
    if refine:
        finer = _growth_once(grid.doubled())
        _require_finite(*finer)
        for coarse, fine in zip(reports, finer):
            if not refinement_stable(coarse.empirical_constant, fine.empirical_constant):
                raise CheckFailedError("growth constant not stable under grid doubling", report=fine)
        reports = finer
    logger.info(f"Growth scan: M_zeta={reports[0].empirical_constant:.6g}, "
                f"M_zeta'={reports[1].empirical_constant:.6g}")
    return reports


def _inverse_once(t_max: float, n: int) -> Tuple[ScanReport, ScanReport]:
    grid = GridSpec(sigma_min=INVERSE_ROWS[0], sigma_max=INVERSE_ROWS[-1],
                    t_min=math.e, t_max=t_max, n_sigma=len(INVERSE_ROWS), n_t=n)
    ts = np.geomspace(math.e, t_max, n)
    S, T = np.meshgrid(np.array(INVERSE_ROWS), ts, indexing="ij")
    values, derivs, _ = zeta_grid(S, T)
    log_t = np.log(T)
    inverse = 1.0 / np.abs(values)
    if np.any(inverse[-1] > ZETA_2 * (1.0 + get_settings().CHECK_SLACK)):
        raise CheckFailedError("|1/zeta(2+it)| exceeds zeta(2)")
    inverse_ratio = inverse / log_t ** 7
    log_deriv_ratio = np.abs(derivs / values) / log_t ** 9
    return (_report(grid, S, T, inverse_ratio, inverse_ratio, use_max=True),
            _report(grid, S, T, log_deriv_ratio, log_deriv_ratio, use_max=True))


def inverse_zeta_scan(t_max: float, n: int, refine: bool = True) -> Tuple[ScanReport, ScanReport]:
    """sup |1/zeta|/(log t)^7 and sup |zeta'/zeta|/(log t)^9 on rows sigma in {1, 1.25, 1.5, 2}"""
    if not t_max > math.e:
        raise DomainError(f"t_max must exceed e, got {t_max}")
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    reports = _inverse_once(t_max, n)
    _require_finite(*reports)
    if refine:
        finer = _inverse_once(t_max, 2 * n)
        _require_finite(*finer)
        for coarse, fine in zip(reports, finer):
            if not refinement_stable(coarse.empirical_constant, fine.empirical_constant):
                raise CheckFailedError("inverse-zeta constant not stable under grid doubling", report=fine)
        reports = finer
    logger.info(f"Inverse scan: M_1/zeta={reports[0].empirical_constant:.6g}, "
                f"M_zeta'/zeta={reports[1].empirical_constant:.6g}")
    return reports


def h_envelope_scan(t_max: float, n: int) -> ScanReport:
    """C = max |h(1+it)| t^2 / (log t)^9, the envelope behind the quadrature tail"""
    grid = _line_grid(math.e, t_max, n)
    _, ts = _axes(grid)
    values = np.abs(h_on_line(1.0, ts)) * ts ** 2 / np.log(ts) ** 9
    report = _report(grid, np.ones_like(ts), ts, values, values, use_max=True)
    _require_finite(report)
    logger.info(f"h envelope constant {report.empirical_constant:.6g} on [e, {t_max}]")
    return report


def lower_envelope_scan(t_max: float, n: int, sigmas: Optional[Sequence[float]] = None) -> ScanReport:
    """B = min |zeta(sigma+it)| (log t)^(1/4) / (sigma-1)^(3/4) over 1 < sigma <= 2"""
    sigmas = np.linspace(1.05, 2.0, 5) if sigmas is None else np.asarray(sigmas, dtype=np.float64)
    if np.any(sigmas <= 1) or np.any(sigmas > 2):
        raise DomainError("lower envelope rows must satisfy 1 < sigma <= 2")
    if not t_max > math.e:
        raise DomainError(f"t_max must exceed e, got {t_max}")
    ts = np.geomspace(math.e, t_max, n)
    grid = GridSpec(sigma_min=float(sigmas.min()), sigma_max=float(sigmas.max()),
                    t_min=math.e, t_max=t_max, n_sigma=len(sigmas), n_t=n)
    S, T = np.meshgrid(sigmas, ts, indexing="ij")
    values, _, _ = zeta_grid(S, T)
    ratio = np.abs(values) * np.log(T) ** 0.25 / (S - 1.0) ** 0.75
    report = _report(grid, S, T, ratio, ratio, use_max=False)
    _require_finite(report)
    return report


def monotone_trend(frame: pd.DataFrame, columns: Optional[Iterable[str]] = None,
                   target: float = 1.0, allowed_breaks: int = 1) -> Dict[str, bool]:
    """Per column: |value - target| is nonincreasing down the rows, with `allowed_breaks` exceptions"""
    columns = [c for c in frame.columns if c != "x"] if columns is None else list(columns)
    flags = {}
    for column in columns:
        distance = np.abs(frame[column].to_numpy(dtype=np.float64) - target)
        breaks = int(np.sum(np.diff(distance) > 0))
        flags[column] = breaks <= allowed_breaks
    return flags


def pole_residue_scan(k_max: int) -> Tuple[pd.DataFrame, bool]:
    """(sigma - 1) zeta(sigma) along sigma = 1 + 2^-k, k = 0..k_max"""
    if k_max < 1:
        raise DomainError(f"k_max must be at least 1, got {k_max}")
    sigmas = 1.0 + 2.0 ** -np.arange(k_max + 1, dtype=np.float64)
    products = [(s - 1.0) * zeta_em(ComplexPoint(sigma=float(s))).value.real for s in sigmas]
    frame = pd.DataFrame({"sigma": sigmas, "residue_product": products})
    monotone = bool(np.all(np.diff(frame["residue_product"].to_numpy()) < 0))
    return frame, monotone


def pnt_ratio_table(table: ArithTable, xs: Iterable[float]) -> pd.DataFrame:
    """Rows (x, psi/x, 2 psi1/x^2, theta/(pi log x))"""
    xs = [float(x) for x in xs]
    if not xs:
        raise DomainError("pnt_ratio_table needs at least one x")
    if max(xs) > table.limit:
        raise RangeError(f"x={max(xs):g} exceeds the table limit {table.limit}")
    if min(xs) < 2:
        raise DomainError("ratios are defined for x >= 2")
    rows = []
    for x in xs:
        v = arith_sieve.chebyshev_values(table, x)
        rows.append({
            "x": x,
            "psi_over_x": v.psi / x,
            "psi1_ratio": 2.0 * v.psi1 / (x * x),
            "theta_ratio": v.theta / (v.pi * math.log(x)),
        })
    return pd.DataFrame(rows, columns=["x", "psi_over_x", "psi1_ratio", "theta_ratio"])
