"""Command-line front end.

Exit codes: 0 on success or a passing verdict, 1 on a failing verdict,
2 on usage errors and malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

import numpy as np

from .certificates import (
    CertificationReport,
    Verdict,
    certify_self_test,
    load_dual,
    nc_bound_of,
)
from .errors import SelfTestError, UnsupportedGraphError
from .graphs import DEFAULT_MAX_ENUMERATION, parse_graph_spec
from .realizations import behavior_of, canonical_kcbs, inequality_value, realization_from_gram
from .report import SCHEMA_VERSION, dumps, text_lines
from .robustness import (
    CSV_COLUMNS,
    DEFAULT_SEED,
    fit_scaling_exponent,
    random_family_probe,
    suboptimality_distance_probe,
)
from .theta_sdp import build_problem, solve


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def default_seed() -> int:
    raw = os.environ.get("SELFTEST_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SELFTEST_SEED must be an integer, got {raw!r}") from None


def _emit(payload: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(dumps({"schema": SCHEMA_VERSION, **payload}) + "\n")
    else:
        out.write("\n".join(text_lines(payload)) + "\n")


def cmd_theta(args, out) -> int:
    g = parse_graph_spec(args.graph)
    sol = solve(build_problem(g), tol=args.tol, max_iter=args.max_iter)
    payload = {
        "graph": g.to_dict(),
        "objective": sol.objective,
        "primal_residual": sol.primal_residual,
        "cone_residual": sol.cone_residual,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "x": sol.x,
    }
    _emit(payload, args.out, out)
    return 0 if sol.converged else 1


def cmd_nc_bound(args, out) -> int:
    g = parse_graph_spec(args.graph)
    bound = nc_bound_of(g, args.max_n)
    _emit({"graph": g.to_dict(), "nc_bound": bound}, args.out, out)
    return 0


def cmd_certify(args, out) -> int:
    g = parse_graph_spec(args.graph)
    dual = load_dual(args.dual, g) if args.dual else None
    try:
        report = certify_self_test(g, dual, tol=args.tol, max_iter=args.max_iter, max_enumeration=args.max_n)
    except UnsupportedGraphError as exc:
        report = CertificationReport(graph=g.to_dict(), verdict=Verdict.UNSUPPORTED, message=str(exc))
    if args.with_probe and report.passed:
        sol = solve(build_problem(g), tol=args.tol, max_iter=args.max_iter)
        probe = suboptimality_distance_probe(g, sol, args.steps, args.t_min, args.t_max)
        report.probe = probe.summary()
        report.probe["gram_exponent"] = fit_scaling_exponent(probe, "gram_distance")[0]
    d = report.to_dict()
    d.pop("schema")
    _emit(d, args.out, out)
    return 0 if report.passed else 1


def cmd_realize(args, out) -> int:
    g = parse_graph_spec(args.graph)
    if args.from_solver:
        sol = solve(build_problem(g), tol=args.tol, max_iter=args.max_iter)
        if not sol.converged:
            raise SelfTestError("solver did not converge; no realization extracted")
        r = realization_from_gram(sol.x, g)
    else:
        if not args.graph.startswith("cycle:"):
            raise UsageError("the canonical realization needs --graph cycle:<n>; use --from-solver otherwise")
        r = canonical_kcbs(g.n)
    payload = {**r.to_dict(), "behavior": behavior_of(r), "value": inequality_value(r, g)}
    _emit(payload, args.out, out)
    return 0


def cmd_probe(args, out) -> int:
    g = parse_graph_spec(args.graph)
    sol = solve(build_problem(g), tol=args.tol, max_iter=args.max_iter)
    if args.random_family:
        seed = args.seed if args.seed is not None else default_seed()
        probe = random_family_probe(g, sol, trials=args.trials, seed=seed)
    else:
        probe = suboptimality_distance_probe(g, sol, args.steps, args.t_min, args.t_max)
    if args.out == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for p in probe.points:
            w.writerow([format(x, ".17g") for x in p.as_row()])
        out.write(buf.getvalue())
    else:
        payload = {
            "graph": g.to_dict(),
            "summary": probe.summary(),
            "points": [dict(zip(CSV_COLUMNS, p.as_row())) for p in probe.points],
        }
        _emit(payload, args.out, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctxselftest", description="Robust self-testing certificates for exclusivity graphs.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, out_choices, out_default):
        p.add_argument("--graph", required=True, help="cycle:<n> or path to graph JSON")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--max-iter", type=int, default=200_000)
        p.add_argument("--out", choices=out_choices, default=out_default)

    p = sub.add_parser("theta", help="solve the Lovasz-theta SDP")
    common(p, ["json", "text"], "text")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("nc-bound", help="noncontextual bound by exhaustive search")
    common(p, ["json", "text"], "text")
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_ENUMERATION)
    p.set_defaults(func=cmd_nc_bound)

    p = sub.add_parser("certify", help="run the full robust self-testing pipeline")
    common(p, ["json", "text"], "json")
    p.add_argument("--dual", help="dual certificate JSON (required for non-cycle graphs)")
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_ENUMERATION)
    p.add_argument("--with-probe", action="store_true", help="attach a robustness probe summary")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--t-min", type=float, default=1e-6)
    p.add_argument("--t-max", type=float, default=1e-1)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("realize", help="canonical or solver-derived quantum realization")
    common(p, ["json", "text"], "text")
    p.add_argument("--from-solver", action="store_true")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("probe", help="epsilon-suboptimality robustness probe")
    common(p, ["csv", "json", "text"], "csv")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--t-min", type=float, default=1e-6)
    p.add_argument("--t-max", type=float, default=1e-1)
    p.add_argument("--random-family", action="store_true")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_probe)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand (theta, nc-bound, certify, realize, probe)")
        with np.errstate(all="ignore"):
            return args.func(args, out)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except SelfTestError as exc:
        err.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
