import argparse
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import pandas as pd
from pydantic import ValidationError

from zetalab.cli.reports import build_manifest, emit_report, write_manifest
from zetalab.core.config import RunConfig, activate_settings, load_run_config
from zetalab.core.errors import CheckFailedError, UsageError, ZetaLabError
from zetalab.models.quad import LineQuadSpec
from zetalab.models.scan import GridSpec
from zetalab.models.zeta import ComplexPoint
from zetalab.services import arith_sieve, bound_lab, certify, contour_quad, dirichlet_algebra, zeta_eval

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-9
DEFAULT_CERTIFY_DIR = "certify-report"


class ZetaLabArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage problems as UsageError instead of exiting"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="key=value config file")
    common.add_argument("--output", default=argparse.SUPPRESS, help="report path, '-' for stdout")
    common.add_argument("--format", "--emit", dest="format", choices=["csv", "json"], default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads (fallback: ZETALAB_THREADS)")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)
    return common


def _add_quad_flags(parser: argparse.ArgumentParser, c: float, T: float) -> None:
    parser.add_argument("--c", type=float, default=c, help="abscissa of the line")
    parser.add_argument("--T", type=float, default=T, help="truncation height")
    parser.add_argument("--dt", type=float, default=0.25, help="trapezoid step")
    parser.add_argument("--adaptive", action="store_true", help="halve the step until it settles")


def build_parser() -> ZetaLabArgumentParser:
    common = _common_flags()
    parser = ZetaLabArgumentParser(prog="zetalab", parents=[common],
                                   description="Numerical checks around the prime number theorem")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("table", parents=[common], help="sieve table or Chebyshev values at x")
    p.add_argument("--limit", type=int, help="sieve limit (default SIEVE_LIMIT)")
    p.add_argument("--x", type=float, help="evaluate psi, theta, psi1, pi at x")
    p.add_argument("--beta", type=float, help="with --x: Tauberian bracket of psi(x)/x")

    p = sub.add_parser("zeta", parents=[common], help="zeta and relatives at one point")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--n-cutoff", "--n", dest="n_cutoff", type=int)
    p.add_argument("--extra-terms", "--extra", dest="extra_terms", type=int)
    p.add_argument("--tol", type=float, help="requested absolute accuracy")
    p.add_argument("--derivative", action="store_true", help="zeta'(s) instead of zeta(s)")
    p.add_argument("--reflect", action="store_true", help="zeta(s) for sigma <= 0 by reflection")
    p.add_argument("--hurwitz", type=float, metavar="A", help="Hurwitz zeta(s, A)")
    p.add_argument("--check", choices=["functional", "hurwitz-formula"],
                   help="residual of the functional equation or of Hurwitz's formula")

    p = sub.add_parser("dirichlet", parents=[common], help="Dirichlet convolution identities")
    p.add_argument("kind", choices=["lambda-identity", "inverse-check"])
    p.add_argument("--limit", type=int, default=10_000)

    p = sub.add_parser("kernel", parents=[common], help="Mellin kernel line integral")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--k", type=int, choices=[1, 2], default=1)
    _add_quad_flags(p, c=2.0, T=1e4)

    p = sub.add_parser("reconstruct", parents=[common], help="psi1(x)/x^2 from the line integral of h")
    p.add_argument("--x", type=float, required=True)
    _add_quad_flags(p, c=1.0, T=5000.0)
    p.add_argument("--direct", action="store_true", help="integrate x^(s-1)(-zeta'/zeta)/(s(s+1)) at c > 1")
    p.add_argument("--envelope", type=float, help="envelope constant C (default: run the envelope scan)")
    p.add_argument("--dump-integrand", metavar="PATH", help="CSV of t, Re h, Im h")

    p = sub.add_parser("scan", parents=[common], help="inequality and envelope scans")
    p.add_argument("kind", choices=["341", "nonvanish", "growth", "inverse", "envelope", "lower", "pole", "trig"])
    p.add_argument("--sigma-min", type=float, default=1.01)
    p.add_argument("--sigma-max", type=float, default=2.0)
    p.add_argument("--t-min", type=float, default=math.e)
    p.add_argument("--t-max", type=float, default=50.0)
    p.add_argument("--n-sigma", type=int, default=20)
    p.add_argument("--n-t", type=int, default=20)
    p.add_argument("--n", type=int, default=1000, help="samples for line scans")
    p.add_argument("--A", type=float, default=1.0, help="width of the growth region")
    p.add_argument("--k-max", type=int, default=20)
    p.add_argument("--no-refine", action="store_true", help="skip the grid-doubling stability check")

    p = sub.add_parser("pnt-table", parents=[common], help="psi/x, 2 psi1/x^2, theta/(pi log x)")
    p.add_argument("--limits", default="1e3,1e4,1e5,1e6", help="comma separated x values")

    p = sub.add_parser("certify", parents=[common], help="run the acceptance suite")
    p.add_argument("--quick", action="store_true", help="reduced sizes")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "OUTPUT_PATH": getattr(args, "output", None),
        "OUTPUT_FORMAT": getattr(args, "format", None),
        "THREADS": getattr(args, "threads", None),
    }


def _point(args: argparse.Namespace) -> ComplexPoint:
    return ComplexPoint(sigma=args.sigma, t=args.t)


def run_table(args: argparse.Namespace, config: RunConfig) -> Any:
    """Sieve table dump, Chebyshev values, or a Tauberian bracket"""
    limit = args.limit or config.SIEVE_LIMIT
    if args.x is not None and args.beta is not None:
        limit = max(limit, math.ceil(args.x * args.beta))
    table = arith_sieve.build_table(limit)
    if args.x is None:
        return arith_sieve.table_frame(table)
    if args.beta is not None:
        return arith_sieve.tauberian_sandwich(table, args.x, args.beta)
    return arith_sieve.chebyshev_values(table, args.x)


def run_zeta(args: argparse.Namespace, config: RunConfig) -> Any:
    """One evaluation; the variant is picked by the flags"""
    point = _point(args)
    if args.check == "functional":
        return {"s": point, "residual": zeta_eval.functional_equation_residual(point)}
    if args.check == "hurwitz-formula":
        if args.hurwitz is None:
            raise UsageError("--check hurwitz-formula needs --hurwitz A")
        return zeta_eval.hurwitz_formula_residual(args.hurwitz, point)
    if args.reflect:
        return zeta_eval.zeta_reflected(point)
    if args.hurwitz is not None:
        return zeta_eval.hurwitz_zeta(point, args.hurwitz, args.n_cutoff, args.extra_terms, args.tol)
    if args.derivative:
        return zeta_eval.zeta_prime_em(point, args.n_cutoff, args.extra_terms, args.tol)
    return zeta_eval.zeta_em(point, args.n_cutoff, args.extra_terms, args.tol)


def run_dirichlet(args: argparse.Namespace, config: RunConfig) -> Any:
    """Lambda = log * mu against the sieve, or f * f^-1 = e for f = 1"""
    table = arith_sieve.build_table(args.limit)
    if args.kind == "lambda-identity":
        deviation = dirichlet_algebra.mangoldt_identity_deviation(table, args.limit)
        report = {"n_max": args.limit, "max_deviation": deviation}
    else:
        ones = dirichlet_algebra.ones_table(args.limit)
        inverse = dirichlet_algebra.dirichlet_inverse(ones)
        deviation = max(
            dirichlet_algebra.max_deviation(inverse, dirichlet_algebra.mobius_table(table, args.limit)),
            dirichlet_algebra.inverse_deviation(ones),
        )
        report = {"n_max": args.limit, "max_deviation": deviation}
    if deviation > IDENTITY_TOLERANCE:
        raise CheckFailedError(f"{args.kind}: deviation {deviation:.3g}", report=report)
    return report


def run_kernel(args: argparse.Namespace, config: RunConfig) -> Any:
    spec = LineQuadSpec(c=args.c, T=args.T, dt=args.dt, adaptive=args.adaptive)
    return contour_quad.kernel_integral(args.u, args.k, spec)


def run_reconstruct(args: argparse.Namespace, config: RunConfig) -> Any:
    """Line-integral reconstruction of psi1(x)/x^2, checked against the sieve"""
    spec = LineQuadSpec(c=args.c, T=args.T, dt=args.dt, adaptive=args.adaptive)
    table = arith_sieve.build_table(max(2, math.ceil(args.x)))
    if args.dump_integrand:
        emit_report(contour_quad.integrand_frame(spec.c, spec, args.x), "csv", args.dump_integrand)
    if args.direct:
        report = contour_quad.mellin_psi1_direct(args.x, spec.c, spec, table)
    else:
        envelope = args.envelope
        if envelope is None:
            envelope = bound_lab.h_envelope_scan(max(10.0, min(spec.T, 1000.0)), 2000).empirical_constant
        report = contour_quad.reconstruct_psi1(args.x, spec, table, envelope)
    allowed = max(0.02 * abs(report.reference), report.truncation_tail_bound)
    if report.deviation > allowed:
        raise CheckFailedError(f"reconstruction deviation {report.deviation:.3g} exceeds {allowed:.3g}", report=report)
    return report


def _grid(args: argparse.Namespace) -> GridSpec:
    return GridSpec(sigma_min=args.sigma_min, sigma_max=args.sigma_max, t_min=args.t_min,
                    t_max=args.t_max, n_sigma=args.n_sigma, n_t=args.n_t)


def run_scan(args: argparse.Namespace, config: RunConfig) -> Any:
    refine = not args.no_refine
    if args.kind == "341":
        return bound_lab.scan_341(_grid(args))
    if args.kind == "nonvanish":
        return bound_lab.nonvanishing_scan(args.t_min, args.t_max, args.n, refine)
    if args.kind == "growth":
        zeta_report, prime_report = bound_lab.growth_scan(args.A, args.t_max, _grid(args), refine)
        return {"zeta": zeta_report, "zeta_prime": prime_report}
    if args.kind == "inverse":
        inverse, log_derivative = bound_lab.inverse_zeta_scan(args.t_max, args.n, refine)
        return {"inverse_zeta": inverse, "log_derivative": log_derivative}
    if args.kind == "envelope":
        return bound_lab.h_envelope_scan(args.t_max, args.n)
    if args.kind == "lower":
        return bound_lab.lower_envelope_scan(args.t_max, args.n)
    if args.kind == "pole":
        frame, monotone = bound_lab.pole_residue_scan(args.k_max)
        if not monotone:
            logger.warning("(sigma - 1) zeta(sigma) is not monotone along the sampled sigmas")
        return frame
    return {"theta_samples": args.n, "max_residual": bound_lab.trig_identity_check(args.n)}


def _parse_limits(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--limits expects comma separated numbers, got {text!r}")


def run_pnt_table(args: argparse.Namespace, config: RunConfig) -> Any:
    xs = _parse_limits(args.limits)
    if not xs:
        raise UsageError("--limits is empty")
    table = arith_sieve.build_table(math.ceil(max(xs)))
    frame = bound_lab.pnt_ratio_table(table, xs)
    for column, ok in bound_lab.monotone_trend(frame).items():
        if not ok:
            logger.warning(f"{column} does not trend toward 1 over the requested x")
    return frame


def run_certify(args: argparse.Namespace, config: RunConfig, argv: List[str], started: float) -> None:
    """Run the suite and write certify.json, one file per check and run_manifest.json"""
    out_dir = Path(config.OUTPUT_PATH if config.OUTPUT_PATH != "-" else DEFAULT_CERTIFY_DIR)
    report, artifacts = certify.run_certify(quick=args.quick)

    written = [emit_report(report, "json", str(out_dir / "certify.json"))]
    for check in report.checks:
        artifact = artifacts[check.name]
        fmt = "csv" if isinstance(artifact, pd.DataFrame) else "json"
        written.append(emit_report(artifact, fmt, str(out_dir / f"{check.criterion:02d}_{check.name}.{fmt}")))
    manifest = build_manifest(argv, config, written, time.perf_counter() - started)
    write_manifest(manifest, out_dir / "run_manifest.json")

    if not report.passed:
        failed = ", ".join(c.name for c in report.checks if not c.passed)
        raise CheckFailedError(f"certify failed: {failed}")
    logger.info(f"All {len(report.checks)} checks passed; reports in {out_dir}")


HANDLERS: Dict[str, Callable[[argparse.Namespace, RunConfig], Any]] = {
    "table": run_table,
    "zeta": run_zeta,
    "dirichlet": run_dirichlet,
    "kernel": run_kernel,
    "reconstruct": run_reconstruct,
    "scan": run_scan,
    "pnt-table": run_pnt_table,
}


def _emit(report: Any, args: argparse.Namespace, config: RunConfig, argv: List[str], started: float) -> None:
    explicit = getattr(args, "format", None)
    fmt = explicit or ("csv" if isinstance(report, pd.DataFrame) else config.OUTPUT_FORMAT)
    target = emit_report(report, fmt, config.OUTPUT_PATH)
    if target is not None:
        manifest = build_manifest(argv, config, [target], time.perf_counter() - started)
        write_manifest(manifest, target.with_name(target.name + ".manifest.json"))


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one command and map the outcome to 0 / 1 (usage, domain) / 2 (check failed)"""
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    parser = build_parser()
    args = None
    config = None
    try:
        args = parser.parse_args(argv)
        if getattr(args, "verbose", False):
            logging.getLogger().setLevel(logging.DEBUG)
        config = load_run_config(getattr(args, "config", None), _overrides(args))
        activate_settings(config)

        if args.command == "certify":
            run_certify(args, config, argv, started)
        else:
            _emit(HANDLERS[args.command](args, config), args, config, argv, started)
        return 0
    except CheckFailedError as e:
        logger.error(f"Check failed: {e.detail}")
        if e.report is not None and config is not None:
            _emit(e.report, args, config, argv, started)
        return e.exit_code
    except ZetaLabError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid parameters: {e.errors()[0]['msg']}")
        return 1
    except SystemExit as e:
        return int(e.code or 0)
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        return 1
    finally:
        activate_settings(None)
