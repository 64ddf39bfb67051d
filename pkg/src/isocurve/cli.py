"""Command-line front end driven by scene files.

Exit codes: 0 every task passed, 1 a violation was found (partial results are
still written), 2 input error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .curve import (EPS_SPEED, CurveScalars, assert_unit_speed, classify_position, curve_jet,
                    curve_scalars)
from .errors import HypothesisNotMet, IsocurveError, SceneError
from .isometry import check_isometry, check_second_derivative_identities
from .scene import COMMANDS, THEOREMS, SceneFile, Task, load_scene, parse_grid
from .surface import surface_report
from .theorems import (TOL, asymptotic_equivalence_check, deviation_report,
                       geodesic_invariance_check, theorem31_check)

DIGITS = 12
DEFAULTS = {"samples": 50, "grid": (50, 50), "mode": "both", "a": 1.0, "b": 0.0,
            "rhs": "printed", "component": "tangent", "paper_literal": False, "eps_speed": EPS_SPEED}
MODE_NAMES = {"paper": ("paper_expansion",), "direct": ("direct_transport",),
              "both": ("paper_expansion", "direct_transport")}
EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def fmt(x) -> str:
    """Fixed 12-significant-digit rendering used by every output format."""
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, f".{DIGITS}g")
    return str(x)


def normalize(obj):
    """Round floats to 12 significant digits; non-finite values become strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float) or hasattr(obj, "dtype"):
        x = float(obj)
        return float(fmt(x)) if math.isfinite(x) else fmt(x)
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if hasattr(obj, "tolist"):
        return normalize(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class TaskResult:
    name: str
    command: str
    params: dict
    passed: bool | None
    result: dict
    tables: list = field(default_factory=list)  # (title, header, rows)

    def as_dict(self):
        return {"name": self.name, "command": self.command, "params": self.params,
                "pass": self.passed, "result": self.result}


@dataclass
class RunReport:
    version: str
    scene: str
    scene_sha256: str
    command: str
    tasks: list

    @property
    def passed(self):
        return all(t.passed is not False for t in self.tasks)

    def as_dict(self):
        return {"tool": "isocurve", "version": self.version, "scene": self.scene,
                "scene_sha256": self.scene_sha256, "command": self.command,
                "pass": self.passed, "tasks": [t.as_dict() for t in self.tasks]}


# ---------------------------------------------------------------- task runners

def _get(scene, kind, params, task):
    name = params.get(kind)
    if name is None:
        raise InputError(f"task {task.name!r} ({task.command}) needs a {kind}")
    table = {"surface": scene.surfaces, "curve": scene.curves, "pair": scene.pairs}[kind]
    if name not in table:
        raise InputError(f"task {task.name!r}: unknown {kind} {name!r}")
    return table[name]


def _pair(scene, params, task, flags):
    pair = _get(scene, "pair", params, task)
    return pair.flip_target() if flags.get("orientation") == "flip" else pair


def run_surface_report(scene, task, p, flags):
    surf = _get(scene, "surface", p, task)
    pts = p.get("at")
    if not pts:
        mid = [0.5 * (a + b) if math.isfinite(a + b) else 0.0 for a, b in (surf.u_range, surf.v_range)]
        pts = [tuple(mid)]
    reports = [surface_report(surf, u, v, p["paper_literal"]) for u, v in pts]
    rows = [[r["u"], r["v"], r["first_form"]["E"], r["first_form"]["F"], r["first_form"]["G"],
             r["second_form"]["L"], r["second_form"]["M"], r["second_form"]["N"],
             r["gaussian_curvature"]] for r in reports]
    header = ["u", "v", "E", "F", "G", "L", "M", "N", "K"]
    return True, {"surface": surf.describe(), "points": reports}, [(task.name, header, rows)]


def run_curve_sweep(scene, task, p, flags):
    curve = _get(scene, "curve", p, task)
    rows = [curve_scalars(curve, float(s), p["paper_literal"]) for s in curve.samples(p["samples"])]
    speed = assert_unit_speed(curve, p["samples"], p["eps_speed"])
    result = {"curve": curve.describe(), "unit_speed": speed.as_dict(),
              "columns": list(CurveScalars.COLUMNS), "rows": [list(r.row()) for r in rows]}
    return speed.passed, result, [(task.name, list(CurveScalars.COLUMNS), [r.row() for r in rows])]


def run_classify(scene, task, p, flags):
    curve = _get(scene, "curve", p, task)
    eps = p.get("eps_class")
    rows = [classify_position(curve, float(s), eps).as_dict() for s in curve.samples(p["samples"])]
    kinds = sorted({r["kind"] for r in rows})
    header = ["s", "kind", "delta", "lambda", "mu"]
    table = [[r[k] for k in header] for r in rows]
    return True, {"curve": curve.describe(), "kinds": kinds, "samples": rows}, [(task.name, header, table)]


def run_isometry_check(scene, task, p, flags):
    pair = _pair(scene, p, task, flags)
    eps = p.get("tol", 1e-9)
    iso = check_isometry(pair, p["grid"], eps)
    ids = check_second_derivative_identities(pair, p["grid"], eps)
    result = {"pair": pair.describe(), "isometry": iso.as_dict(), "second_derivatives": ids.as_dict()}
    rows = [[k, v] for k, v in iso.max_form.items()] + [[k, v] for k, v in iso.max_derivative.items()]
    rows += [["dot " + k, v] for k, v in ids.max_deviation.items()]
    return iso.passed and ids.passed, result, [(task.name, ["quantity", "max_deviation"], rows)]


def _theorem_rows(rep):
    return [[rep.theorem, rep.mode, x.s, x.lhs, x.rhs, x.residual] for x in rep.samples]


THEOREM_HEADER = ["theorem", "mode", "s", "lhs", "rhs", "residual"]


def run_theorem_verify(scene, task, p, flags):
    theorem = p.get("theorem")
    if theorem not in THEOREMS:
        raise InputError(f"task {task.name!r} needs a theorem in {THEOREMS}")
    pair = _pair(scene, p, task, flags)
    curve = _get(scene, "curve", p, task)
    tol = p.get("tol", TOL)
    lit = p["paper_literal"]
    n = p["samples"]
    if theorem == "geodesic":
        rep = geodesic_invariance_check(pair, curve, n, tol)
        rows = [[s, a, b, b - a] for s, a, b in rep.samples]
        return rep.passed, rep.as_dict(), [(task.name, ["s", "kappa_g", "kappa_g_bar", "difference"], rows)]
    if theorem == "asymptotic":
        try:
            rep = asymptotic_equivalence_check(pair, curve, n, p["component"], tol, lit)
        except HypothesisNotMet as exc:
            d = exc.report.as_dict() if exc.report is not None else {}
            d["hypothesis_not_met"] = str(exc)
            return False, d, [(task.name, ["key", "value"], sorted(d.items()))]
        d = rep.as_dict()
        return rep.passed, d, [(task.name, ["key", "value"], sorted(d.items()))]
    if theorem == "3.1":
        rep = theorem31_check(pair, curve, n, lit, tol)
        return rep.passed, rep.as_dict(), [(task.name, THEOREM_HEADER, _theorem_rows(rep))]
    reports = [deviation_report(theorem, pair, curve, n, mode, p["a"], p["b"], p["rhs"], lit, tol)
               for mode in MODE_NAMES[p["mode"]]]
    verdicts = [r.passed for r in reports if r.passed is not None]
    passed = all(verdicts) if verdicts else None
    rows = [row for r in reports for row in _theorem_rows(r)]
    return passed, {"reports": [r.as_dict() for r in reports]}, [(task.name, THEOREM_HEADER, rows)]


PLOT_COLUMNS = ["s", "x", "y", "z", "u", "v", "kappa", "tau", "kappa_n", "kappa_g"]


def run_plot_data(scene, task, p, flags):
    curve = _get(scene, "curve", p, task)
    rows = []
    for s in curve.samples(p["samples"]):
        cj = curve_jet(curve, float(s), 2)
        sc = curve_scalars(curve, float(s), p["paper_literal"])
        rows.append([sc.s, *cj.point.tolist(), cj.u[0], cj.v[0], sc.kappa, sc.tau, sc.kappa_n, sc.kappa_g])
    return True, {"columns": PLOT_COLUMNS, "rows": rows}, [(task.name, PLOT_COLUMNS, rows)]


RUNNERS = {"surface-report": run_surface_report, "curve-sweep": run_curve_sweep,
           "classify": run_classify, "isometry-check": run_isometry_check,
           "theorem-verify": run_theorem_verify, "plot-data": run_plot_data}


def _params(task: Task, flags: dict) -> dict:
    p = dict(DEFAULTS)
    p.update(task.params)
    for key in ("samples", "grid", "mode", "tol", "rhs", "a", "b", "component", "eps_class",
                "eps_speed"):
        if flags.get(key) is not None:
            p[key] = flags[key]
    if flags.get("paper_literal"):
        p["paper_literal"] = True
    return p


def run_task(scene: SceneFile, task: Task, flags: dict) -> TaskResult:
    p = _params(task, flags)
    shown = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(p.items())}
    try:
        passed, result, tables = RUNNERS[task.command](scene, task, p, flags)
    except IsocurveError as exc:
        if isinstance(exc, SceneError):
            raise
        return TaskResult(task.name, task.command, shown, False,
                          {"error": type(exc).__name__, "message": str(exc)})
    return TaskResult(task.name, task.command, shown, passed, result, tables)


def run(scene: SceneFile, command: str, flags: dict | None = None, task_name=None) -> RunReport:
    flags = flags or {}
    if command == "run":
        tasks = list(scene.tasks)
    else:
        tasks = [t for t in scene.tasks if t.command == command]
        adhoc = {k: flags[k] for k in ("surface", "curve", "pair", "theorem", "at") if flags.get(k)}
        if adhoc:
            tasks = [Task(f"{command}:cli", command, adhoc, 0)]
    if task_name is not None:
        tasks = [t for t in tasks if t.name == task_name]
        if not tasks:
            raise InputError(f"no task named {task_name!r} for command {command!r}")
    if not tasks:
        raise InputError(f"scene defines no {command!r} task; pass --surface/--curve/--pair")
    results = [run_task(scene, t, flags) for t in tasks]
    return RunReport(__version__, os.path.basename(scene.path), scene.sha256, command, results)


# ---------------------------------------------------------------- serialization

def to_json(report: RunReport) -> str:
    return json.dumps(normalize(report.as_dict()), indent=2, allow_nan=False) + "\n"


def to_csv(report: RunReport) -> str:
    """One block per task: a ``# task`` comment line, the header, then rows."""
    import csv
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    for i, t in enumerate(report.tasks):
        if i:
            out.write("\n")
        verdict = {True: "pass", False: "fail", None: "reported"}[t.passed]
        out.write(f"# task {t.name} ({t.command}) {verdict}\n")
        if not t.tables:
            w.writerow(["error", "message"])
            w.writerow([t.result.get("error", ""), t.result.get("message", "")])
        for _, header, rows in t.tables:
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(x) for x in row])
    return out.getvalue()


def to_text(report: RunReport) -> str:
    """Whitespace-separated columns for external plotting tools."""
    out = io.StringIO()
    for t in report.tasks:
        for _, header, rows in t.tables:
            out.write(f"# {t.name}\n# " + " ".join(header) + "\n")
            for row in rows:
                out.write(" ".join(fmt(x) for x in row) + "\n")
            out.write("\n")
    return out.getvalue()


# ---------------------------------------------------------------- argument parsing

def _grid(text):
    def fail(msg):
        raise argparse.ArgumentTypeError(msg)
    return parse_grid(text, fail)


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _positive_float(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _point(text):
    try:
        u, v = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected u,v") from None
    return (u, v)


def build_parser():
    ap = argparse.ArgumentParser(prog="isocurve",
                                 description="Curves on parametric surfaces and isometry invariants.")
    ap.add_argument("--version", action="version", version=f"isocurve {__version__}")
    ap.add_argument("command", choices=COMMANDS + ("run",),
                    help="task type to run; 'run' executes every task in the scene")
    ap.add_argument("--scene", required=True, help="scene file")
    ap.add_argument("--task", help="run only the named task")
    ap.add_argument("--surface", help="ad-hoc task on this surface")
    ap.add_argument("--curve", help="ad-hoc task on this curve")
    ap.add_argument("--pair", help="ad-hoc task on this pair")
    ap.add_argument("--theorem", choices=THEOREMS)
    ap.add_argument("--at", type=_point, action="append", help="surface-report point u,v (repeatable)")
    ap.add_argument("--format", choices=("json", "csv", "text"), default=None,
                    help="output format (default json; text for plot-data)")
    ap.add_argument("--output", "-o", help="write to this file instead of stdout")
    ap.add_argument("--tol", type=_positive_float, help="tolerance (default 1e-8 theorems, 1e-9 isometry)")
    ap.add_argument("--grid", type=_grid, help="verification grid NxM (default 50x50)")
    ap.add_argument("--samples", type=_positive_int, help="samples along each curve (default 50)")
    ap.add_argument("--mode", choices=("paper", "direct", "both"), help="deviation mode (default both)")
    ap.add_argument("--rhs", choices=("printed", "corrected"),
                    help="right-hand side of the phi_v and cross identities (default printed)")
    ap.add_argument("--a", type=float, help="tangent coefficient a (default 1)")
    ap.add_argument("--b", type=float, help="tangent coefficient b (default 0)")
    ap.add_argument("--component", choices=("tangent", "normal", "cross"),
                    help="component for the asymptotic check (default tangent)")
    ap.add_argument("--eps-class", type=_positive_float, dest="eps_class",
                    help="classification threshold (default 1e-7 (1 + |alpha|))")
    ap.add_argument("--eps-speed", type=_positive_float, dest="eps_speed",
                    help="allowed | |alpha'| - 1 | in curve-sweep (default 1e-6)")
    ap.add_argument("--orientation", choices=("keep", "flip"), default="keep",
                    help="flip the target chart normal")
    ap.add_argument("--paper-literal", action="store_true",
                    help="unnormalized normal, alternative Christoffel table and display terms")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    flags = {k: v for k, v in vars(args).items()
             if k not in ("command", "scene", "task", "format", "output")}
    try:
        scene = load_scene(args.scene)
        report = run(scene, args.command, flags, args.task)
    except (SceneError, InputError) as exc:
        print(f"isocurve: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    fmt_name = args.format or ("text" if args.command == "plot-data" else "json")
    text = {"json": to_json, "csv": to_csv, "text": to_text}[fmt_name](report)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
