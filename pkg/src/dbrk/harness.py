"""Experiment tasks behind the command line: plan parsing, task execution and output files.

A plan is a JSON object

    {
      "function": [<factor record>, ...],      # optional, default: zeros i and 1+i
      "output_dir": "results",                 # optional, relative to the plan file
      "tasks": [
        {"kind": "converge", "params": {"x0": "0", "n": 1}, "tol": 1e-8, "out": "converge_n1"},
        ...
      ]
    }

Every task writes ``<out>.csv`` and ``<out>.json``. CSV cells are fixed-format:
floats use the shortest round-trip repr, complex numbers split into
``<col>_re``/``<col>_im`` columns and exact rationals are written as ``p/q``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import exact as ex
from .errors import DbrkError
from .experiments import (
    ahern_clark_report,
    boundary_jet,
    coefficient_identities,
    default_schedule,
    lambda_suite,
    norm_convergence_trace,
    odd_s_probe,
    radial_limit,
    taylor_remainder_check,
)
from .functions import from_description
from .gaussian import GaussianRational, as_fraction
from .kernels import BoundaryKernelEvaluator, KernelSpec, kernel_rho, norm_sq_boundary
from .quadrature import KernelFunction, QuadratureConfig, integrate_interval, l2_pairing, representation_boundary, representation_interior

TASK_KINDS = ("anr", "identities", "lambda", "condition", "represent", "norm", "converge", "probe", "taylor")
REPORT_ONLY = {"condition", "probe"}
DEFAULT_FUNCTION = [
    {"kind": "blaschke", "zero": ["0", "1"]},
    {"kind": "blaschke", "zero": ["1", "1"]},
]
DEFAULT_TOL = {
    "anr": 0.0,
    "identities": 1e-10,
    "lambda": 1e-10,
    "represent": 1e-8,
    "norm": 1e-8,
    "converge": 1e-8,
    "taylor": 1e-2,
}


class PlanError(ValueError):
    """The plan or task parameters are malformed."""


@dataclass
class TaskSpec:
    kind: str
    params: dict
    tol: float | None
    out: str
    function: list

    def tolerance(self) -> float:
        return DEFAULT_TOL.get(self.kind, 0.0) if self.tol is None else self.tol


@dataclass
class TaskOutput:
    header: list
    rows: list
    passed: bool
    max_residual: float | None
    notes: dict = field(default_factory=dict)


# ---------------------------------------------------------------- formatting


def _fmt_real(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if x is None:
        return ""
    return repr(float(x))


def _split(value):
    """(re, im) parts of a complex-like value, keeping exact parts exact."""
    if isinstance(value, GaussianRational):
        return value.re, value.im
    if isinstance(value, (int, Fraction)):
        return value, 0
    c = complex(value)
    return c.real, c.imag


def expand_header(header: list) -> list[str]:
    out = []
    for name in header:
        if name.endswith("*"):
            out += [name[:-1] + "_re", name[:-1] + "_im"]
        else:
            out.append(name)
    return out


def format_row(header: list, row: list) -> list[str]:
    cells = []
    for name, value in zip(header, row):
        if name.endswith("*"):
            re, im = _split(value)
            cells += [_fmt_real(re), _fmt_real(im)]
        elif isinstance(value, str):
            cells.append(value)
        else:
            cells.append(_fmt_real(value))
    return cells


def render_csv(output: TaskOutput) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(expand_header(output.header))
    for row in output.rows:
        w.writerow(format_row(output.header, row))
    return buf.getvalue()


def _json_number(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def summary_dict(spec: TaskSpec, output: TaskOutput | None, runtime_ms, error: str | None = None) -> dict:
    out = {
        "task": spec.out,
        "kind": spec.kind,
        "pass": bool(output.passed) if output else False,
        "max_residual": _json_number(output.max_residual) if output else None,
        "runtime_ms": runtime_ms,
    }
    if output and output.notes:
        out["notes"] = output.notes
    if error:
        out["error"] = error
    return out


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- parameter helpers


def _int(params, key, default=None, lo=0, hi=None) -> int:
    v = params.get(key, default)
    if v is None:
        raise PlanError(f"missing parameter {key!r}")
    if isinstance(v, bool) or not isinstance(v, int):
        raise PlanError(f"parameter {key!r} must be an integer, got {v!r}")
    if v < lo or (hi is not None and v > hi):
        raise PlanError(f"parameter {key!r}={v} outside [{lo}, {hi if hi is not None else 'inf'}]")
    return v


def _rational(params, key, default="0") -> Fraction:
    v = params.get(key, default)
    try:
        return as_fraction(str(v)) if not isinstance(v, (int, Fraction)) else as_fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise PlanError(f"parameter {key!r} is not a rational number: {v!r}") from exc


def parse_complex(value) -> GaussianRational:
    """Accept [re, im], "re,im" or a real number."""
    if isinstance(value, str) and "," in value:
        value = value.split(",")
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise PlanError(f"complex numbers are [re, im] pairs, got {value!r}")
        try:
            return GaussianRational(as_fraction(str(value[0]).strip()), as_fraction(str(value[1]).strip()))
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise PlanError(f"bad complex number {value!r}") from exc
    try:
        return GaussianRational(as_fraction(str(value)))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise PlanError(f"bad complex number {value!r}") from exc


def parse_schedule(value) -> list[Fraction]:
    """An integer k_max (t = 2^-1..2^-k_max) or a list of positive rationals."""
    if value is None:
        return default_schedule()
    if isinstance(value, str):
        value = value.strip()
        if "," not in value:
            try:
                value = int(value)
            except ValueError:
                value = [value]
        else:
            value = [v for v in value.split(",") if v.strip()]
    if isinstance(value, int) and not isinstance(value, bool):
        if not 1 <= value <= 60:
            raise PlanError("schedule length must lie in [1, 60]")
        return default_schedule(value)
    try:
        ts = [as_fraction(str(v).strip()) for v in value]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise PlanError(f"bad schedule {value!r}") from exc
    if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise PlanError("schedule must be positive and strictly decreasing")
    return ts


def _exact_flag(params):
    v = params.get("exact")
    if v is None:
        return None
    if not isinstance(v, bool):
        raise PlanError("parameter 'exact' must be a boolean")
    return v


def _jet_for(b, x0, order, params):
    exact = _exact_flag(params)
    if exact is True:
        return boundary_jet(b, x0, order, "exact")
    if exact is False:
        return boundary_jet(b, x0, order, "mp")
    return boundary_jet(b, x0, order)


# ---------------------------------------------------------------- tasks


def task_anr(b, params, tol) -> TaskOutput:
    n_max = _int(params, "n_max", params.get("n", 10), 0, 200)
    rows = []
    ok = True
    for n in range(n_max + 1):
        for r in range(2 * n + 2):
            a = ex.anr(n, r)
            closed = ex.anr_closed(n, r)
            anti = ex.anr(n, 2 * n + 1 - r) == -a
            good = a == closed and anti
            ok &= good
            rows.append([n, r, a, closed, anti, good])
    return TaskOutput(["n", "r", "A", "closed", "antisymmetric", "match"], rows, ok, 0.0 if ok else 1.0)


def task_identities(b, params, tol) -> TaskOutput:
    x0 = _rational(params, "x0")
    n = _int(params, "n", 1, 0, 40)
    jet = _jet_for(b, x0, 2 * n + 1, params)
    rows = [[r.ell, r.value, r.residual, r.extended] for r in coefficient_identities(b, x0, n, jet)]
    worst = max(r[2] for r in rows)
    return TaskOutput(["ell", "value*", "residual", "extended"], rows, worst <= tol, worst, {"exact": jet.field.exact})


def task_lambda(b, params, tol) -> TaskOutput:
    x0 = _rational(params, "x0")
    n = _int(params, "n", 1, 0, 40)
    suite = lambda_suite(b, x0, n, _jet_for(b, x0, 2 * n + 1, params))
    rows = [[r.s, r.value, r.expected, r.residual] for r in suite.rows]
    return TaskOutput(["s", "lambda*", "expected*", "residual"], rows, suite.passed(tol), suite.max_residual, {"exact": suite.exact})


def task_condition(b, params, tol) -> TaskOutput:
    x0 = _rational(params, "x0")
    n = _int(params, "n", 0, 0, 40)
    rows = []
    for k in range(n + 1):
        rep = ahern_clark_report(b, x0, k, params.get("tail_bound"))
        rows.append([k, rep.blaschke_term, rep.singular_term, rep.log_term, rep.log_error, rep.total, rep.finite])
    header = ["n", "blaschke_term", "singular_term", "log_term", "log_error", "total", "finite"]
    return TaskOutput(header, rows, True, None, {"report_only": True})


def task_represent(b, params, tol) -> TaskOutput:
    w = parse_complex(params.get("w", ["0", "1"]))
    m = _int(params, "m", 0, 0, 20)
    n = _int(params, "n", 0, 0, 20)
    cfg = QuadratureConfig(abs_tol=params.get("abs_tol", 1e-13), rel_tol=params.get("rel_tol", 1e-11))
    fk = KernelFunction(b, complex(w), m)
    rows = []
    worst = 0.0
    for om in params.get("omegas", [params["omega"]] if "omega" in params else []):
        omega = complex(parse_complex(om))
        res = representation_interior(b, complex(w), m, omega, n, cfg)
        ref = fk.derivative(omega, n)
        err = abs(res.value - ref) / abs(ref) if ref != 0 else abs(res.value)
        worst = max(worst, err)
        rows.append(["interior", omega.real, omega.imag, res.value, ref, res.rho_part, err, res.error_estimate])
    btol = params.get("boundary_tol", max(tol, 1e-6))
    bworst = 0.0
    for x in params.get("x0s", [params["x0"]] if "x0" in params else []):
        x0 = float(as_fraction(str(x)))
        res = representation_boundary(b, complex(w), m, x0, n, cfg)
        ref, _ = radial_limit(lambda t: fk.derivative(complex(x0, t), n))
        err = abs(res.value - ref) / abs(ref) if ref != 0 else abs(res.value)
        bworst = max(bworst, err)
        rows.append(["boundary", x0, 0.0, res.value, ref, res.rho_part, err, res.error_estimate])
    if not rows:
        raise PlanError("represent needs 'omega'/'omegas' or 'x0'/'x0s'")
    header = ["where", "re", "im", "integral*", "reference*", "rho_part*", "rel_error", "error_estimate"]
    return TaskOutput(header, rows, worst < tol and bworst < btol, max(worst, bworst))


def _quadrature_norm(b, x0: float, n: int, cfg) -> float:
    jet = b.derivative_jet(x0, 2 * n + 12)
    k0 = BoundaryKernelEvaluator(b, x0, n, jet)
    total = l2_pairing(k0, k0, cfg).value.real
    if not b.is_inner:
        spec = KernelSpec.boundary(x0, n)

        def weighted(t):
            kr = kernel_rho(b, spec, jet, t.astype(complex))
            m = b.modulus_on_line(t)
            return (kr * kr.conjugate()).real * (1 - m * m)

        for lo, hi in b.rho_support():
            total += integrate_interval(weighted, lo, hi, cfg).value.real
    return total


def task_norm(b, params, tol) -> TaskOutput:
    n_max = _int(params, "n", 2, 0, 10)
    xs = params.get("x0s", [params.get("x0", "0")])
    cfg = QuadratureConfig(center=0.0, abs_tol=1e-15, rel_tol=1e-12)
    rows = []
    worst = 0.0
    for x in xs:
        x0 = as_fraction(str(x))
        for n in range(n_max + 1):
            formula = float(norm_sq_boundary(b, x0, n, _jet_for(b, x0, 2 * n + 1, params)))
            quad = _quadrature_norm(b, float(x0), n, cfg.centered(float(x0)))
            err = abs(formula - quad) / abs(formula) if formula else abs(quad)
            worst = max(worst, err)
            rows.append([x0, n, formula, quad, err])
    return TaskOutput(["x0", "n", "formula", "quadrature", "rel_error"], rows, worst < tol, worst)


def task_converge(b, params, tol) -> TaskOutput:
    x0 = _rational(params, "x0")
    n = _int(params, "n", 1, 0, 10)
    steps = _int(params, "decreasing_steps", 6, 1)
    trace = norm_convergence_trace(b, x0, n, parse_schedule(params.get("schedule")), exact=_exact_flag(params))
    rows = []
    for r in trace.rows:
        rows.append([r.t, r.norm_sq, r.diff_norm_sq, r.norm_gap, r.exact_norm, r.exact_diff])
    final = trace.rows[-1].diff_norm_sq
    decreasing = trace.decreasing_tail(min(steps, len(trace.rows) - 1))
    header = ["t", "norm_sq", "diff_norm_sq", "norm_gap", "exact_norm_pi_free", "exact_diff_pi_free"]
    notes = {"exact": trace.exact, "limit": trace.limit, "final_diff_norm_sq": final, "decreasing_tail": decreasing}
    return TaskOutput(header, rows, final < tol and decreasing, final, notes)


def task_probe(b, params, tol) -> TaskOutput:
    x0 = _rational(params, "x0")
    n = _int(params, "n", 2, 0, 40)
    rows = [[s, v, abs(complex(v))] for s, v in odd_s_probe(b, x0, n, _jet_for(b, x0, 2 * n, params))]
    return TaskOutput(["s", "sum*", "modulus"], rows, True, None, {"report_only": True})


def task_taylor(b, params, tol) -> TaskOutput:
    x0 = _rational(params, "x0")
    n = _int(params, "n", 1, 0, 20)
    table = taylor_remainder_check(b, x0, n, parse_schedule(params.get("schedule")))
    rows = [[r.t, r.epsilon, abs(r.epsilon), r.ratio] for r in table]
    mags = [abs(r.epsilon) for r in table]
    tail = mags[-4:]
    decreasing = all(b2 <= a for a, b2 in zip(tail, tail[1:]))
    return TaskOutput(["t", "epsilon*", "modulus", "ratio_to_t"], rows, decreasing and mags[-1] < tol, mags[-1])


TASKS = {
    "anr": task_anr,
    "identities": task_identities,
    "lambda": task_lambda,
    "condition": task_condition,
    "represent": task_represent,
    "norm": task_norm,
    "converge": task_converge,
    "probe": task_probe,
    "taylor": task_taylor,
}


# ---------------------------------------------------------------- plans


def parse_plan(data, base_dir: Path | None = None) -> tuple[list[TaskSpec], Path]:
    if not isinstance(data, dict):
        raise PlanError("plan must be a JSON object")
    unknown = set(data) - {"function", "tasks", "output_dir"}
    if unknown:
        raise PlanError(f"unknown plan keys: {sorted(unknown)}")
    function = data.get("function", DEFAULT_FUNCTION)
    if not isinstance(function, list):
        raise PlanError("'function' must be a list of factor records")
    try:
        from_description(function)
    except (KeyError, TypeError, ValueError) as exc:
        raise PlanError(f"bad function description: {exc}") from exc
    tasks = data.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        raise PlanError("'tasks' must be a non-empty list")
    specs = []
    seen = set()
    for i, t in enumerate(tasks):
        if not isinstance(t, dict):
            raise PlanError(f"task {i} is not an object")
        kind = t.get("kind")
        if kind not in TASKS:
            raise PlanError(f"task {i}: unknown kind {kind!r} (expected one of {', '.join(TASK_KINDS)})")
        params = t.get("params", {})
        if not isinstance(params, dict):
            raise PlanError(f"task {i}: 'params' must be an object")
        tol = t.get("tol")
        if tol is not None and (isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol < 0):
            raise PlanError(f"task {i}: 'tol' must be a non-negative number")
        out = t.get("out", f"{i:02d}_{kind}")
        if not isinstance(out, str) or not out or os.path.isabs(out) or ".." in Path(out).parts:
            raise PlanError(f"task {i}: 'out' must be a relative file stem")
        if out in seen:
            raise PlanError(f"task {i}: duplicate output {out!r}")
        seen.add(out)
        fn = t.get("function", function)
        if fn is not function:
            try:
                from_description(fn)
            except (KeyError, TypeError, ValueError) as exc:
                raise PlanError(f"task {i}: bad function description: {exc}") from exc
        specs.append(TaskSpec(kind, params, None if tol is None else float(tol), out, fn))
    out_dir = Path(data.get("output_dir", "."))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    return specs, out_dir


def load_plan(path) -> tuple[list[TaskSpec], Path]:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise PlanError(f"cannot read plan: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PlanError(f"plan is not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_plan(data, path.parent)


def execute(spec: TaskSpec) -> tuple[TaskOutput | None, float, str | None]:
    """Run one task; errors from the numerics become a failed task, plan errors propagate."""
    start = time.perf_counter()
    b = from_description(spec.function)
    try:
        output = TASKS[spec.kind](b, spec.params, spec.tolerance())
        error = None
    except PlanError:
        raise
    except (DbrkError, ArithmeticError, TypeError, ValueError) as exc:
        output, error = None, f"{type(exc).__name__}: {exc}"
    return output, (time.perf_counter() - start) * 1000.0, error


def _execute_and_write(spec: TaskSpec, out_dir: str, timing: bool, figures: str | None) -> dict:
    output, ms, error = execute(spec)
    out_dir = Path(out_dir)
    if output is not None:
        write_atomic(out_dir / f"{spec.out}.csv", render_csv(output))
        if figures:
            from .plots import render_figure

            render_figure(spec, output, Path(figures))
    summary = summary_dict(spec, output, round(ms, 3) if timing else None, error)
    write_atomic(out_dir / f"{spec.out}.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def run_tasks(specs: list[TaskSpec], out_dir: Path, jobs: int = 1, timing: bool = True, figures=None) -> list[dict]:
    """Run tasks (in parallel up to ``jobs``) and return summaries in plan order."""
    fig = str(figures) if figures else None
    if jobs <= 1 or len(specs) == 1:
        return [_execute_and_write(s, str(out_dir), timing, fig) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_execute_and_write, s, str(out_dir), timing, fig) for s in specs]
        return [f.result() for f in futures]

