"""Command line front end.

    dbrk run PLAN.json [--out DIR] [--jobs N] [--figures DIR] [--no-timing]
    dbrk converge --x0 0 --n 1 --exact
    dbrk anr --n 25

Exit status: 0 when every assertion-bearing task passes, 1 when one fails,
2 for usage or plan errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import DEFAULT_FUNCTION, REPORT_ONLY, PlanError, load_plan, parse_complex, parse_plan, parse_schedule, run_tasks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("--jobs", type=int, default=1, help="tasks to run in parallel")
    p.add_argument("--figures", metavar="DIR", help="also render PNG figures into DIR")
    p.add_argument("--no-timing", action="store_true", help="write runtime_ms as null so summaries are byte-stable")
    p.add_argument("--quiet", action="store_true")


def _direct(sub, kind: str, help_text: str, n_default: int) -> argparse.ArgumentParser:
    p = sub.add_parser(kind, help=help_text)
    _common(p)
    p.add_argument("--function", "--config", dest="function", metavar="FILE", help="JSON factor list for b (default: zeros i and 1+i)")
    p.add_argument("--n", type=int, default=n_default)
    p.add_argument("--x0", default="0", help="boundary point, decimal or p/q")
    p.add_argument("--omega", action="append", help="interior point re,im (repeatable)")
    p.add_argument("--tol", type=float)
    p.add_argument("--schedule", help="k_max for t = 2^-k, or comma-separated decreasing t values")
    p.add_argument("--exact", action="store_true", default=None, help="force exact Q(i) arithmetic")
    p.add_argument("--name", help="output file stem (default: the subcommand)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbrk", description="Boundary kernel experiments for de Branges-Rovnyak spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment plan")
    run.add_argument("plan")
    _common(run)
    _direct(sub, "anr", "table of A_{n,r} against +-2^n", 10)
    _direct(sub, "identities", "convolution identities of the Taylor coefficients at x0", 1)
    _direct(sub, "lambda", "lambda_{s,n} relations", 1)
    _direct(sub, "condition", "summability condition terms (report only)", 0)
    rep = _direct(sub, "represent", "two-integral representation of kernel derivatives", 0)
    rep.add_argument("--w", default="0,1", help="base point of f = k_{w,m}")
    rep.add_argument("--m", type=int, default=0)
    rep.add_argument("--boundary", action="store_true", help="evaluate at x0 instead of --omega")
    _direct(sub, "norm", "boundary norm formula against quadrature", 2)
    conv = _direct(sub, "converge", "radial convergence of kernels in norm", 1)
    conv.add_argument("--decreasing-steps", type=int, default=6)
    _direct(sub, "probe", "odd-s coefficient sums (report only)", 2)
    _direct(sub, "taylor", "Taylor remainder along the radius", 1)
    return parser


def _function_from(path: str | None):
    if path is None:
        return DEFAULT_FUNCTION
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("function")
    return data


def _direct_spec(args) -> dict:
    params: dict = {"x0": args.x0}
    kind = args.command
    if kind == "anr":
        params = {"n_max": args.n}
    else:
        params["n"] = args.n
    if args.schedule is not None:
        params["schedule"] = [str(t) for t in parse_schedule(args.schedule)]
    if args.exact is not None:
        params["exact"] = True
    if kind == "represent":
        params["w"] = str(args.w).split(",")
        params["m"] = args.m
        if args.boundary:
            params["x0s"] = [args.x0]
        else:
            params["omegas"] = [[str(z.re), str(z.im)] for z in map(parse_complex, args.omega or ["0,2"])]
        params.pop("x0", None)
    if kind == "converge":
        params["decreasing_steps"] = args.decreasing_steps
    task = {"kind": kind, "params": params, "out": args.name or kind}
    if args.tol is not None:
        task["tol"] = args.tol
    return {"function": _function_from(args.function), "tasks": [task]}


def _print(summaries, quiet):
    if quiet:
        return
    for s in summaries:
        status = "report" if s["kind"] in REPORT_ONLY and s["pass"] else ("PASS" if s["pass"] else "FAIL")
        extra = f"  max_residual={s['max_residual']!r}" if s["max_residual"] is not None else ""
        err = f"  error={s['error']}" if "error" in s else ""
        print(f"{status:6s} {s['task']} ({s['kind']}){extra}{err}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        if args.command == "run":
            specs, plan_dir = load_plan(args.plan)
            out_dir = Path(args.out) if args.out != "." else plan_dir
        else:
            specs, _ = parse_plan(_direct_spec(args))
            out_dir = Path(args.out)
        summaries = run_tasks(specs, out_dir, args.jobs, not args.no_timing, args.figures)
    except PlanError as exc:
        print(f"dbrk: plan error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"dbrk: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _print(summaries, args.quiet)
    ok = all(s["pass"] for s in summaries)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
