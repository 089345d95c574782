"""Acceptance suite: every numbered criterion as a named, self-contained check.

Each check returns a CheckResult plus the artifact it computed (a report model,
a DataFrame or a plain dict), so the caller can write one file per check.
Checks never raise on a failed criterion; they record passed=False. Timings are
logged and never stored, which keeps the artifacts byte-stable between runs.
"""
import hashlib
import logging
import math
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from zetalab.core.errors import CheckFailedError, ZetaLabError
from zetalab.models.arith import ArithTable
from zetalab.models.quad import LineQuadSpec
from zetalab.models.run import CertifyReport, CheckResult
from zetalab.models.scan import GridSpec
from zetalab.models.zeta import ComplexPoint
from zetalab.services import arith_sieve, bound_lab, contour_quad, dirichlet_algebra, zeta_eval

logger = logging.getLogger(__name__)

SEED = 20240101
FIRST_ZERO = 14.134725


class CertifySizes(BaseModel):
    """Problem sizes for one certify run"""
    sieve_limit: int
    em_points: int
    fe_points: int
    identity_limit: int
    g_limit: int
    kernel_T: float
    perron_xs: List[float]
    perron_T: float
    grid_341: int
    nonvanish_n: int
    growth_t_max: float
    growth_n_t: int
    inverse_n: int
    pnt_xs: List[float]
    tauberian_pairs: int


FULL = CertifySizes(
    sieve_limit=1_000_000, em_points=50, fe_points=20, identity_limit=10_000, g_limit=1_000_000,
    kernel_T=1e4, perron_xs=[10.0, 50.0, 100.0], perron_T=5000.0, grid_341=200, nonvanish_n=10_000,
    growth_t_max=1e3, growth_n_t=200, inverse_n=4000, pnt_xs=[1e3, 1e4, 1e5, 1e6], tauberian_pairs=100,
)

QUICK = CertifySizes(
    sieve_limit=100_000, em_points=10, fe_points=5, identity_limit=2000, g_limit=100_000,
    kernel_T=1e3, perron_xs=[10.0], perron_T=1000.0, grid_341=40, nonvanish_n=2000,
    growth_t_max=200.0, growth_n_t=60, inverse_n=500, pnt_xs=[1e3, 1e4, 1e5], tauberian_pairs=100,
)

Check = Callable[[CertifySizes, ArithTable], Tuple[CheckResult, Any]]


def _result(name: str, criterion: int, passed: bool, value: Optional[float] = None,
            threshold: Optional[float] = None, detail: str = "") -> CheckResult:
    return CheckResult(name=name, criterion=criterion, passed=bool(passed),
                       value=value, threshold=threshold, detail=detail)


def check_basel(sizes: CertifySizes, table: ArithTable):
    result = zeta_eval.zeta_em(ComplexPoint(sigma=2.0))
    error = abs(result.value - math.pi ** 2 / 6.0)
    return _result("basel", 1, error <= 1e-9, error, 1e-9), result


def check_em_derivative(sizes: CertifySizes, table: ArithTable):
    rng = np.random.default_rng(SEED)
    sigmas = rng.uniform(0.5, 3.0, sizes.em_points)
    ts = rng.uniform(-50.0, 50.0, sizes.em_points)
    step = 1e-5
    rows = []
    for sigma, t in zip(sigmas, ts):
        s = complex(sigma, t)
        analytic = zeta_eval.zeta_prime_em(ComplexPoint.of(s)).value
        forward = zeta_eval.zeta_em(ComplexPoint.of(s + step)).value
        backward = zeta_eval.zeta_em(ComplexPoint.of(s - step)).value
        rows.append({"sigma": float(sigma), "t": float(t),
                     "difference": abs(analytic - (forward - backward) / (2.0 * step))})
    worst = max(r["difference"] for r in rows)
    return _result("em_derivative", 2, worst <= 1e-6, worst, 1e-6), {"points": rows}


def check_functional_equation(sizes: CertifySizes, table: ArithTable):
    ts = np.linspace(-20.0, 20.0, sizes.fe_points)
    residuals = [zeta_eval.functional_equation_residual(ComplexPoint(sigma=0.5, t=float(t))) for t in ts]
    worst = max(residuals)
    return (_result("functional_equation", 3, worst < 1e-6, worst, 1e-6),
            {"t": ts.tolist(), "residual": residuals})


def check_first_zero(sizes: CertifySizes, table: ArithTable):
    result = zeta_eval.zeta_em(ComplexPoint(sigma=0.5, t=FIRST_ZERO))
    modulus = abs(result.value)
    located = zeta_eval.locate_zero(14.0, 14.3)
    return (_result("first_zero", 4, modulus <= 1e-3, modulus, 1e-3, f"located zero at t={located:.15g}"),
            {"modulus": modulus, "located": located, "evaluation": result})


def check_mangoldt_identity(sizes: CertifySizes, table: ArithTable):
    deviation = dirichlet_algebra.mangoldt_identity_deviation(table, sizes.identity_limit)
    return (_result("mangoldt_identity", 5, deviation <= 1e-9, deviation, 1e-9),
            {"n_max": sizes.identity_limit, "max_deviation": deviation})


def check_exp_g(sizes: CertifySizes, table: ArithTable):
    rows = []
    passed = True
    for s in (2.0, 3.0, complex(2.0, 5.0)):
        p = ComplexPoint.of(s)
        g = dirichlet_algebra.g_series(p, sizes.g_limit, table)
        z = zeta_eval.zeta_em(p)
        difference = abs(np.exp(g.value) - z.value)
        bound = dirichlet_algebra.exp_g_bound(g, z.err_bound)
        passed = passed and difference <= bound
        rows.append({"s": p, "difference": float(difference), "bound": bound})
    worst = max(r["difference"] for r in rows)
    return _result("exp_g", 6, passed, worst, detail=f"n_max={sizes.g_limit}"), {"points": rows}


def check_mellin_kernel(sizes: CertifySizes, table: ArithTable):
    rows = []
    passed = True
    for u in (0.25, 0.5, 0.75, 2.0, 3.0):
        for k in (1, 2):
            base = contour_quad.kernel_integral(u, k, LineQuadSpec(c=2.0, T=sizes.kernel_T))
            doubled = contour_quad.kernel_integral(u, k, LineQuadSpec(c=2.0, T=2.0 * sizes.kernel_T))
            allowed = max(1e-2 if k == 1 else 1e-4, base.truncation_tail_bound)
            ok = base.deviation <= allowed and doubled.deviation < base.deviation
            passed = passed and ok
            rows.append({"u": u, "k": k, "deviation": base.deviation,
                         "deviation_doubled": doubled.deviation, "allowed": allowed, "passed": ok})
    worst = max(r["deviation"] for r in rows)
    return _result("mellin_kernel", 7, passed, worst, detail=f"T={sizes.kernel_T:g}"), {"cases": rows}


def check_perron(sizes: CertifySizes, table: ArithTable):
    envelope = bound_lab.h_envelope_scan(1000.0, 2000).empirical_constant
    rows = []
    passed = True
    for x in sizes.perron_xs:
        base = contour_quad.reconstruct_psi1(x, LineQuadSpec(c=1.0, T=sizes.perron_T), table, envelope)
        doubled = contour_quad.reconstruct_psi1(x, LineQuadSpec(c=1.0, T=2.0 * sizes.perron_T), table, envelope)
        allowed = max(0.02 * abs(base.reference), base.truncation_tail_bound)
        ok = base.deviation <= allowed and doubled.deviation < base.deviation
        passed = passed and ok
        rows.append({"x": x, "c": 1.0, "deviation": base.deviation,
                     "deviation_doubled": doubled.deviation, "allowed": allowed, "passed": ok})
    x = sizes.perron_xs[0]
    for c in (1.5, 2.0):
        report = contour_quad.reconstruct_psi1(x, LineQuadSpec(c=c, T=sizes.perron_T), table, envelope)
        allowed = max(0.02 * abs(report.reference), report.truncation_tail_bound)
        ok = report.deviation <= allowed
        passed = passed and ok
        rows.append({"x": x, "c": c, "deviation": report.deviation, "allowed": allowed, "passed": ok})
    worst = max(r["deviation"] for r in rows)
    return (_result("perron_reconstruction", 8, passed, worst, detail=f"envelope={envelope:.6g}"),
            {"envelope": envelope, "cases": rows})


def check_341(sizes: CertifySizes, table: ArithTable):
    grid = GridSpec(sigma_min=1.01, sigma_max=2.0, t_min=math.e, t_max=50.0,
                    n_sigma=sizes.grid_341, n_t=sizes.grid_341)
    report = bound_lab.scan_341(grid)
    return _result("three_four_one", 9, True, report.extremum, 1.0 - 1e-9), report


def check_nonvanishing(sizes: CertifySizes, table: ArithTable):
    report = bound_lab.nonvanishing_scan(math.e, 100.0, sizes.nonvanish_n)
    return _result("nonvanishing", 10, True, report.extremum, bound_lab.NONVANISH_FLOOR), report


def check_growth_inverse(sizes: CertifySizes, table: ArithTable):
    A = 1.0
    sigma_min = max(0.5, 1.0 - A / math.log(sizes.growth_t_max))
    grid = GridSpec(sigma_min=math.ceil(sigma_min * 100) / 100, sigma_max=2.0, t_min=math.e,
                    t_max=sizes.growth_t_max, n_sigma=6, n_t=sizes.growth_n_t)
    growth = bound_lab.growth_scan(A, sizes.growth_t_max, grid)
    inverse = bound_lab.inverse_zeta_scan(sizes.growth_t_max, sizes.inverse_n)
    constants = [r.empirical_constant for r in (*growth, *inverse)]
    return (_result("growth_inverse", 11, True, max(constants), detail="constants refinement-stable within 1.5x"),
            {"growth_zeta": growth[0], "growth_zeta_prime": growth[1],
             "inverse_zeta": inverse[0], "log_derivative": inverse[1]})


def check_pnt_ratios(sizes: CertifySizes, table: ArithTable):
    frame = bound_lab.pnt_ratio_table(table, sizes.pnt_xs)
    last = frame.iloc[-1]
    trend = bound_lab.monotone_trend(frame)
    passed = (abs(last["psi_over_x"] - 1.0) < 0.03 and abs(last["psi1_ratio"] - 1.0) < 0.02
              and 0.9 <= last["theta_ratio"] <= 1.0 and all(trend.values()))
    return _result("pnt_ratios", 12, passed, float(last["psi_over_x"]), detail=f"x={last['x']:g}"), frame


def check_tauberian(sizes: CertifySizes, table: ArithTable):
    rng = np.random.default_rng(SEED)
    failures = 0
    for _ in range(sizes.tauberian_pairs):
        beta = float(rng.uniform(1.01, 3.0))
        x = float(rng.uniform(2.0, table.limit / beta))
        if not arith_sieve.tauberian_inequality_check(table, x, beta):
            failures += 1
    return (_result("tauberian_differencing", 13, failures == 0, float(failures), 0.0),
            {"pairs": sizes.tauberian_pairs, "failures": failures})


def _fingerprint(table: ArithTable) -> str:
    digest = hashlib.sha256()
    values, derivs, _ = zeta_eval.zeta_grid(0.5, np.linspace(1.0, 60.0, 240))
    digest.update(values.tobytes())
    digest.update(derivs.tobytes())
    frame = bound_lab.pnt_ratio_table(table, [1e3, 1e4])
    digest.update(frame.to_csv(index=False, float_format="%.15g").encode())
    return digest.hexdigest()


def check_determinism(sizes: CertifySizes, table: ArithTable):
    first, second = _fingerprint(table), _fingerprint(table)
    return (_result("determinism", 14, first == second, detail=first),
            {"first": first, "second": second})


CHECKS: List[Tuple[int, str, Check]] = [
    (1, "basel", check_basel),
    (2, "em_derivative", check_em_derivative),
    (3, "functional_equation", check_functional_equation),
    (4, "first_zero", check_first_zero),
    (5, "mangoldt_identity", check_mangoldt_identity),
    (6, "exp_g", check_exp_g),
    (7, "mellin_kernel", check_mellin_kernel),
    (8, "perron_reconstruction", check_perron),
    (9, "three_four_one", check_341),
    (10, "nonvanishing", check_nonvanishing),
    (11, "growth_inverse", check_growth_inverse),
    (12, "pnt_ratios", check_pnt_ratios),
    (13, "tauberian_differencing", check_tauberian),
    (14, "determinism", check_determinism),
]


def run_certify(quick: bool = False) -> Tuple[CertifyReport, Dict[str, Any]]:
    sizes = QUICK if quick else FULL
    table = arith_sieve.build_table(sizes.sieve_limit)
    results: List[CheckResult] = []
    artifacts: Dict[str, Any] = {}
    for criterion, name, check in CHECKS:
        started = time.perf_counter()
        try:
            result, artifact = check(sizes, table)
        except CheckFailedError as e:
            result = _result(name, criterion, False, detail=e.detail)
            artifact = e.report if e.report is not None else {"error": e.detail}
        except ZetaLabError as e:
            logger.error(f"Check {name} could not run: {e.detail}")
            result = _result(name, criterion, False, detail=e.detail)
            artifact = {"error": e.detail}
        results.append(result)
        artifacts[result.name] = artifact
        status = "passed" if result.passed else "FAILED"
        logger.info(f"[{result.criterion:2d}] {result.name} {status} in {time.perf_counter() - started:.2f}s")

    report = CertifyReport(quick=quick, passed=all(r.passed for r in results), checks=results)
    return report, artifacts
