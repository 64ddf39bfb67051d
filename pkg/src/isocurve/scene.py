"""Scene files: surfaces, curves, pairs and tasks in a sectioned key = value format.

See ``docs/scene-format.md`` for the grammar. Expressions are embedded verbatim
as values and parsed with :mod:`isocurve.expr`.
"""
from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .curve import CurveOnSurface, reparameterize_by_arc_length
from .errors import (DuplicateName, ExpressionSyntaxError, IsocurveError, ParseError,
                     UnknownIdentifier, UnresolvedReference)
from .expr import eval_scalar, parse
from .isometry import SurfacePair
from .surface import BUILTIN_SURFACES, EPS_IMMERSION, SurfaceChart, builtin_surface

KINDS = ("surface", "curve", "pair", "task")
COMMANDS = ("surface-report", "curve-sweep", "classify", "isometry-check", "theorem-verify",
            "plot-data")
THEOREMS = ("3.1", "3.2", "3.5", "3.8", "geodesic", "asymptotic")

_HEADER = re.compile(r"\[\s*([A-Za-z]+)\s+([A-Za-z0-9_.\-]+)\s*\]$")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_RANGE = re.compile(r"\s*(.+?)\s*\.\.\s*(.+?)\s*$")


@dataclass
class Entry:
    value: str
    line: int
    column: int
    key_column: int = 1


@dataclass
class Section:
    kind: str
    name: str
    line: int
    entries: dict = field(default_factory=dict)

    def get(self, key, default=None):
        e = self.entries.get(key)
        return default if e is None else e.value


@dataclass
class Task:
    name: str
    command: str
    params: dict
    line: int


@dataclass
class SceneFile:
    path: str
    sha256: str
    surfaces: dict
    curves: dict
    pairs: dict
    tasks: list


# ---------------------------------------------------------------- lexical layer

def read_sections(text: str, path=None):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if m is None:
                raise ParseError("malformed section header; expected [kind name]", lineno, col, path)
            kind, name = m.group(1).lower(), m.group(2)
            if kind not in KINDS:
                raise ParseError(f"unknown section kind {kind!r}; expected one of {KINDS}",
                                 lineno, col + 1, path)
            current = Section(kind, name, lineno)
            sections.append(current)
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", lineno, col, path)
        if current is None:
            raise ParseError("key outside of any section", lineno, col, path)
        key, _, value = line.partition("=")
        key = key.strip()
        if not _NAME.match(key):
            raise ParseError(f"invalid key {key!r}", lineno, col, path)
        if key in current.entries:
            raise ParseError(f"key {key!r} repeated in section {current.name!r}", lineno, col, path)
        rest = line[line.index("=") + 1:]
        vcol = line.index("=") + 2 + len(rest) - len(rest.lstrip())
        current.entries[key] = Entry(value.strip(), lineno, vcol, col)
    return sections


# ---------------------------------------------------------------- value helpers

class _Ctx:
    def __init__(self, path):
        self.path = path

    def fail(self, msg, entry_or_line, column=None):
        if isinstance(entry_or_line, Entry):
            raise ParseError(msg, entry_or_line.line, column or entry_or_line.column, self.path)
        raise ParseError(msg, entry_or_line, column, self.path)

    def require(self, sec, key):
        e = sec.entries.get(key)
        if e is None or not e.value:
            self.fail(f"{sec.kind} {sec.name!r} needs key {key!r}", sec.line)
        return e

    def number(self, entry, text=None):
        text = entry.value if text is None else text
        try:
            return float(eval_constant(text))
        except (ExpressionSyntaxError, UnknownIdentifier, IsocurveError) as exc:
            self.fail(f"bad number {text!r}: {exc}", entry)

    def range(self, entry):
        m = _RANGE.match(entry.value)
        if m is None:
            self.fail("expected 'a .. b'", entry)
        lo, hi = self.number(entry, m.group(1)), self.number(entry, m.group(2))
        if not lo < hi:
            self.fail(f"empty range {entry.value!r}", entry)
        return lo, hi

    def boolean(self, entry):
        v = entry.value.lower()
        if v in ("true", "yes", "1", "on"):
            return True
        if v in ("false", "no", "0", "off"):
            return False
        self.fail(f"expected true or false, got {entry.value!r}", entry)

    def vector(self, entry):
        parts = entry.value.split(",")
        if len(parts) != 3:
            self.fail("expected three comma-separated numbers", entry)
        return tuple(self.number(entry, p.strip()) for p in parts)

    def expression(self, entry, variables):
        try:
            return parse(entry.value, variables)
        except ExpressionSyntaxError as exc:
            self.fail(f"expression error: {exc}", entry, entry.column + exc.position)
        except UnknownIdentifier as exc:
            col = entry.column + (exc.position or 0)
            self.fail(f"unknown identifier {exc.name!r}", entry, col)


def eval_constant(text):
    return eval_scalar(parse(text, frozenset()), {})


def _check_keys(ctx, sec, allowed):
    for key, e in sec.entries.items():
        if key not in allowed:
            ctx.fail(f"unknown key {key!r} in {sec.kind} section", e, e.key_column)


# ---------------------------------------------------------------- section builders

SURFACE_KEYS = ("x", "y", "z", "u", "v", "builtin", "eps_immersion", "orientation")
CURVE_KEYS = ("host", "u", "v", "s", "t", "unit_speed", "origin")
PAIR_KEYS = ("source", "target", "u", "v", "orientation")
TASK_KEYS = ("command", "surface", "curve", "pair", "theorem", "samples", "grid", "mode", "a",
             "b", "tol", "at", "rhs", "component", "paper_literal", "eps_class", "eps_speed")


def _orientation(ctx, sec):
    e = sec.entries.get("orientation")
    if e is None:
        return 1
    if e.value in ("flip", "-1"):
        return -1
    if e.value in ("keep", "1", "+1"):
        return 1
    ctx.fail(f"orientation must be 'keep' or 'flip', got {e.value!r}", e)


def _build_surface(ctx, sec):
    _check_keys(ctx, sec, SURFACE_KEYS)
    b = sec.entries.get("builtin")
    eps = ctx.number(sec.entries["eps_immersion"]) if "eps_immersion" in sec.entries else EPS_IMMERSION
    if b is not None:
        if b.value not in BUILTIN_SURFACES:
            raise UnresolvedReference(b.value, b.line, ctx.path, b.column)
        base = builtin_surface(b.value)
        xs, ys, zs = base.x, base.y, base.z
        ur, vr = base.u_range, base.v_range
    else:
        xs, ys, zs = (ctx.expression(ctx.require(sec, k), {"u", "v"}) for k in "xyz")
        ur, vr = (-math.inf, math.inf), (-math.inf, math.inf)
    if "u" in sec.entries:
        ur = ctx.range(sec.entries["u"])
    if "v" in sec.entries:
        vr = ctx.range(sec.entries["v"])
    return SurfaceChart(sec.name, xs, ys, zs, ur, vr, eps, _orientation(ctx, sec))


def _build_curve(ctx, sec, surfaces):
    _check_keys(ctx, sec, CURVE_KEYS)
    host = ctx.require(sec, "host")
    if host.value not in surfaces:
        raise UnresolvedReference(host.value, host.line, ctx.path, host.column)
    params = [k for k in ("s", "t") if k in sec.entries]
    if len(params) != 1:
        ctx.fail(f"curve {sec.name!r} needs exactly one interval key, 's' or 't'", sec.line)
    param = params[0]
    interval = ctx.range(sec.entries[param])
    u = ctx.expression(ctx.require(sec, "u"), {param})
    v = ctx.expression(ctx.require(sec, "v"), {param})
    unit = ctx.boolean(sec.entries["unit_speed"]) if "unit_speed" in sec.entries else param == "s"
    origin = ctx.vector(sec.entries["origin"]) if "origin" in sec.entries else (0.0, 0.0, 0.0)
    curve = CurveOnSurface(sec.name, surfaces[host.value], u, v, interval, param, unit, origin)
    if not unit:
        try:
            curve = reparameterize_by_arc_length(curve)
        except IsocurveError as exc:
            ctx.fail(f"cannot reparameterize curve {sec.name!r}: {exc}", sec.line)
    return curve


def _build_pair(ctx, sec, surfaces):
    _check_keys(ctx, sec, PAIR_KEYS)
    charts = []
    for key in ("source", "target"):
        e = ctx.require(sec, key)
        if e.value not in surfaces:
            raise UnresolvedReference(e.value, e.line, ctx.path, e.column)
        charts.append(surfaces[e.value])
    src, tgt = charts
    if _orientation(ctx, sec) == -1:
        tgt = tgt.flipped()
    ranges = []
    for key, a, b in (("u", src.u_range, tgt.u_range), ("v", src.v_range, tgt.v_range)):
        if key in sec.entries:
            ranges.append(ctx.range(sec.entries[key]))
        else:
            lo, hi = max(a[0], b[0]), min(a[1], b[1])
            if not (math.isfinite(lo) and math.isfinite(hi)):
                ctx.fail(f"pair {sec.name!r} needs an explicit {key!r} range", sec.line)
            ranges.append((lo, hi))
    try:
        return SurfacePair(sec.name, src, tgt, ranges[0], ranges[1])
    except (ValueError, IsocurveError) as exc:
        ctx.fail(str(exc), sec.line)


def _build_task(ctx, sec, scene):
    _check_keys(ctx, sec, TASK_KEYS)
    cmd = ctx.require(sec, "command")
    if cmd.value not in COMMANDS:
        ctx.fail(f"unknown command {cmd.value!r}", cmd)
    params = {}
    for key, e in sec.entries.items():
        if key == "command":
            continue
        if key in ("surface", "curve", "pair"):
            table = {"surface": scene.surfaces, "curve": scene.curves, "pair": scene.pairs}[key]
            if e.value not in table:
                raise UnresolvedReference(e.value, e.line, ctx.path, e.column)
            params[key] = e.value
        elif key == "samples":
            n = ctx.number(e)
            if n != int(n) or n < 1:
                ctx.fail("samples must be a positive integer", e)
            params[key] = int(n)
        elif key in ("a", "b", "tol", "eps_class", "eps_speed"):
            params[key] = ctx.number(e)
        elif key == "paper_literal":
            params[key] = ctx.boolean(e)
        elif key == "grid":
            params[key] = parse_grid(e.value, lambda m: ctx.fail(m, e))
        elif key == "at":
            pts = []
            for chunk in e.value.split(";"):
                xy = [p.strip() for p in chunk.split(",")]
                if len(xy) != 2:
                    ctx.fail("expected 'u, v; u, v; ...'", e)
                pts.append(tuple(ctx.number(e, p) for p in xy))
            params[key] = pts
        elif key == "theorem":
            if e.value not in THEOREMS:
                ctx.fail(f"unknown theorem {e.value!r}; expected one of {THEOREMS}", e)
            params[key] = e.value
        elif key == "mode":
            if e.value not in ("paper", "direct", "both"):
                ctx.fail("mode must be paper, direct or both", e)
            params[key] = e.value
        elif key == "rhs":
            if e.value not in ("printed", "corrected"):
                ctx.fail("rhs must be printed or corrected", e)
            params[key] = e.value
        else:
            params[key] = e.value
    return Task(sec.name, cmd.value, params, sec.line)


def parse_grid(text, fail):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if m is None or int(m.group(1)) < 2 or int(m.group(2)) < 2:
        fail(f"grid must look like NxM with N, M >= 2, got {text!r}")
    return int(m.group(1)), int(m.group(2))


# ---------------------------------------------------------------- entry points

def loads(text: str, path=None) -> SceneFile:
    ctx = _Ctx(path)
    sections = read_sections(text, path)
    seen = {k: {} for k in KINDS}
    for sec in sections:
        if sec.name in seen[sec.kind]:
            raise DuplicateName(sec.name, sec.line, path)
        seen[sec.kind][sec.name] = sec
    scene = SceneFile(path or "<string>", hashlib.sha256(text.encode()).hexdigest(), {}, {}, {}, [])
    for sec in seen["surface"].values():
        scene.surfaces[sec.name] = _build_surface(ctx, sec)
    for sec in seen["curve"].values():
        scene.curves[sec.name] = _build_curve(ctx, sec, scene.surfaces)
    for sec in seen["pair"].values():
        scene.pairs[sec.name] = _build_pair(ctx, sec, scene.surfaces)
    for sec in seen["task"].values():
        scene.tasks.append(_build_task(ctx, sec, scene))
    return scene


def load_scene(path) -> SceneFile:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read scene: {exc.strerror}", path=str(path)) from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"scene is not UTF-8: {exc.reason}", path=str(path)) from None
    scene = loads(text, str(path))
    scene.sha256 = hashlib.sha256(raw).hexdigest()
    return scene
