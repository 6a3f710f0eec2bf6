"""Command-line front end: curves, PMF dumps, validation runs, and sweeps.

All numeric output uses repr round-trip formatting with dot decimal
separators, so identical invocations produce identical bytes.  Exit
codes: 0 success (validate: all pass), 1 validation failure, 2 invalid
parameters, 3 quadrature non-convergence, 4 excessive censoring.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .analytic import (
    CurveKind,
    McpParams,
    count_pmf,
    distribution_curve,
    palm_count_pmf,
    quantile_radius,
)
from .apps import SweepMetric, SweepSpec, sweep
from .quadrature import QuadratureError
from .simulator import (
    CensoringError,
    SimConfig,
    simulate_kth_distances,
    validate_against_analytic,
    write_raw_samples,
)

__all__ = ["main"]

_CONFIG_KEYS = ("n", "lambda_p", "mbar", "rd", "R", "k", "samples", "seed")


class _CliError(ValueError):
    """Invalid command-line parameters (exit code 2)."""


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        out = sys.stdout if args.output is None else open(args.output, "w", newline="")
        try:
            return args.handler(args, out)
        finally:
            if out is not sys.stdout:
                out.close()
    except (_CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"error: quadrature failed to converge: {exc}", file=sys.stderr)
        return 3
    except CensoringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcpdist",
        description="kth contact / nearest-neighbor distance distributions "
        "of an n-D Matern cluster process",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cdf = sub.add_parser("cdf", help="sample an analytic CDF onto a radius grid")
    _add_common(cdf)
    _add_params(cdf)
    cdf.add_argument("--kind", choices=("cd", "nnd"), required=True)
    cdf.add_argument("--k", type=_int_list, default=None, help="comma-separated k list")
    cdf.add_argument("--grid-max", type=float, default=None,
                     help="grid endpoint (default: radius where the CDF reaches 1-1e-4)")
    cdf.add_argument("--grid-points", type=int, default=512)
    cdf.set_defaults(handler=_cmd_cdf)

    pmf = sub.add_parser("pmf", help="PMF of the point count in a ball")
    _add_common(pmf)
    _add_params(pmf)
    pmf.add_argument("--r", type=float, default=None, help="ball radius")
    pmf.add_argument("--m-max", type=int, default=None,
                     help="largest order (default: adaptive truncation)")
    pmf.add_argument("--palm", action="store_true",
                     help="count under the reduced Palm distribution")
    pmf.set_defaults(handler=_cmd_pmf)

    val = sub.add_parser("validate", help="Monte Carlo vs analytic KS report")
    _add_common(val)
    _add_params(val)
    val.add_argument("--k-max", type=int, default=4)
    val.add_argument("--samples", type=int, default=None)
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--r-max", type=float, default=None,
                     help="observation radius override (default: CDF tail radius)")
    val.add_argument("--dump-samples", default=None, metavar="PATH",
                     help="write raw kth distances as CSV")
    val.set_defaults(handler=_cmd_validate)

    swp = sub.add_parser("sweep", help="metric vs cluster radius at fixed mbar")
    _add_common(swp)
    swp.add_argument("--metric", choices=("connectivity", "cache"), required=True)
    swp.add_argument("--lambda-p", type=_float_list, default=None,
                     help="comma-separated parent intensities")
    swp.add_argument("--mbar", type=float, default=None)
    swp.add_argument("--n", type=int, default=None)
    swp.add_argument("--R", type=float, default=None, help="connection range")
    swp.add_argument("--k", type=_int_list, default=None)
    swp.add_argument("--rd", type=_float_list, default=None,
                     help="explicit comma-separated cluster radii")
    swp.add_argument("--rd-min", type=float, default=None)
    swp.add_argument("--rd-max", type=float, default=None)
    swp.add_argument("--rd-points", type=int, default=20)
    swp.add_argument("--no-ppp-reference", action="store_true")
    swp.add_argument("--hold", choices=("mbar", "lambda_d"), default="mbar")
    swp.set_defaults(handler=_cmd_sweep)

    return parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="JSON config file; flags override")
    p.add_argument("--output", "-o", default=None, help="output path (default stdout)")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--lambda-p", type=float, default=None)
    p.add_argument("--mbar", type=float, default=None)
    p.add_argument("--rd", type=float, default=None)


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _apply_config(args: argparse.Namespace) -> None:
    if getattr(args, "config", None) is None:
        return
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _CliError(f"cannot read config {args.config}: {exc}")
    if not isinstance(config, dict):
        raise _CliError("config must be a JSON object")
    for key, value in config.items():
        if key not in _CONFIG_KEYS:
            raise _CliError(f"unknown config key {key!r}")
        # Config keys match argparse destinations exactly (including R).
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise _CliError(f"missing required parameter --{name.replace('_', '-')}")


def _params_from(args: argparse.Namespace) -> McpParams:
    _require(args, "lambda_p", "mbar", "rd")
    n = args.n if args.n is not None else 2
    try:
        return McpParams(lambda_p=args.lambda_p, mbar=args.mbar, rd=args.rd, n=n)
    except ValueError as exc:
        raise _CliError(str(exc))


def _echo(out, command: str, pairs: list[tuple[str, object]]) -> None:
    rendered = " ".join(f"{key}={_fmt(value)}" for key, value in pairs)
    out.write(f"# command={command} {rendered}\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_cdf(args: argparse.Namespace, out) -> int:
    params = _params_from(args)
    k_values = sorted(set(args.k)) if args.k else [1]
    if any(k < 1 for k in k_values):
        raise _CliError("k values must be positive")
    if args.grid_points < 2:
        raise _CliError("grid-points must be at least 2")
    if args.grid_max is not None and args.grid_max < 0:
        raise _CliError("grid-max must be nonnegative")
    kind = CurveKind.CONTACT if args.kind == "cd" else CurveKind.NND
    grid_max = args.grid_max
    if grid_max is None:
        grid_max = quantile_radius(kind, max(k_values), params)
    _echo(out, "cdf", [
        ("kind", args.kind), ("n", params.n), ("lambda_p", params.lambda_p),
        ("mbar", params.mbar), ("rd", params.rd), ("k", k_values),
        ("grid_max", grid_max), ("grid_points", args.grid_points),
    ])
    out.write("r,k,cdf\n")
    for k in k_values:
        curve = distribution_curve(kind, k, params, r_max=grid_max, num=args.grid_points)
        for r, value in zip(curve.radii, curve.values):
            out.write(f"{float(r)!r},{k},{float(value)!r}\n")
    return 0


def _cmd_pmf(args: argparse.Namespace, out) -> int:
    params = _params_from(args)
    if args.r is None or args.r < 0:
        raise _CliError("--r must be a nonnegative radius")
    if args.m_max is not None and args.m_max < 0:
        raise _CliError("--m-max must be nonnegative")
    pmf = (palm_count_pmf if args.palm else count_pmf)(args.r, params, m_max=args.m_max)
    _echo(out, "pmf", [
        ("palm", int(args.palm)), ("n", params.n), ("lambda_p", params.lambda_p),
        ("mbar", params.mbar), ("rd", params.rd), ("r", float(args.r)),
        ("m_max", pmf.probs.size - 1), ("truncation_mass", float(pmf.truncation_mass)),
    ])
    out.write("m,probability\n")
    for m, prob in enumerate(pmf.probs):
        out.write(f"{m},{float(prob)!r}\n")
    return 0


def _cmd_validate(args: argparse.Namespace, out) -> int:
    params = _params_from(args)
    samples = args.samples if args.samples is not None else 100_000
    seed = args.seed if args.seed is not None else 1
    if samples < 1:
        raise _CliError("samples must be at least 1")
    if args.k_max < 1:
        raise _CliError("k-max must be at least 1")
    if args.r_max is not None and args.r_max <= 0:
        raise _CliError("r-max must be positive")
    k_values = list(range(1, args.k_max + 1))
    rows = validate_against_analytic(
        params, k_values, samples=samples, seed=seed, r_max=args.r_max
    )
    _echo(out, "validate", [
        ("n", params.n), ("lambda_p", params.lambda_p), ("mbar", params.mbar),
        ("rd", params.rd), ("k_max", args.k_max), ("samples", samples), ("seed", seed),
    ])
    all_passed = True
    for row in rows:
        all_passed &= row.passed
        out.write(
            f"kind={row.kind} k={row.k} ks={row.ks!r} threshold={row.threshold!r} "
            f"censored_fraction={row.censored_fraction!r} "
            f"result={'pass' if row.passed else 'fail'}\n"
        )
    out.write(f"overall={'pass' if all_passed else 'fail'}\n")
    if args.dump_samples:
        k_max = max(k_values)
        radius = args.r_max if args.r_max is not None else quantile_radius(
            CurveKind.CONTACT, k_max, params
        )
        cfg = SimConfig(params, radius, samples, seed, k_max)
        distances = simulate_kth_distances(cfg)
        with open(args.dump_samples, "w", newline="") as fh:
            write_raw_samples(fh, distances, radius)
    return 0 if all_passed else 1


def _cmd_sweep(args: argparse.Namespace, out) -> int:
    _require(args, "lambda_p", "mbar", "R")
    if args.R <= 0:
        raise _CliError("--R must be positive")
    n = args.n if args.n is not None else 2
    k_values = tuple(sorted(set(args.k))) if args.k else (1, 2, 3, 4)
    if args.rd is not None:
        rd_grid = tuple(sorted(set(args.rd)))
    else:
        rd_min = args.rd_min if args.rd_min is not None else args.R / 100.0
        rd_max = args.rd_max if args.rd_max is not None else 10.0 * args.R
        if args.rd_points < 1 or rd_min <= 0 or rd_max < rd_min:
            raise _CliError("invalid rd grid")
        if args.rd_points == 1:
            rd_grid = (rd_min,)
        else:
            rd_grid = tuple(np.geomspace(rd_min, rd_max, args.rd_points))
    metric = SweepMetric.CONNECTIVITY if args.metric == "connectivity" else SweepMetric.CACHE_HIT
    lambda_ps = args.lambda_p if isinstance(args.lambda_p, list) else [args.lambda_p]
    _echo(out, "sweep", [
        ("metric", args.metric), ("n", n), ("lambda_p", lambda_ps),
        ("mbar", float(args.mbar)), ("R", float(args.R)), ("k", list(k_values)),
        ("rd", [float(r) for r in rd_grid]), ("hold", args.hold),
        ("ppp_reference", int(not args.no_ppp_reference)),
    ])
    out.write("lambda_p,rd,k,value\n")
    for lam in lambda_ps:
        try:
            base = McpParams(lambda_p=lam, mbar=args.mbar, rd=rd_grid[0], n=n)
        except ValueError as exc:
            raise _CliError(str(exc))
        spec = SweepSpec(
            base=base,
            rd_grid=rd_grid,
            connect_range=args.R,
            k_values=k_values,
            include_ppp_reference=not args.no_ppp_reference,
        )
        for row in sweep(spec, metric, hold=args.hold):
            rd_text = "inf" if math.isinf(row.rd) else repr(row.rd)
            out.write(f"{float(lam)!r},{rd_text},{row.k},{row.value!r}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
