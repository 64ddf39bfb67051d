"""Isometric chart pairs over a shared (u, v) domain."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .curve import CurveOnSurface
from .errors import DomainViolation, SingularBasis
from .surface import SurfaceChart, builtin_surface, chart_jet, first_form, unit_normal

EPS_ISO = 1e-9
FORM_KEYS = ("E", "F", "G")
DERIV_KEYS = ("E_u", "E_v", "F_u", "F_v", "G_u", "G_v")
DOT_KEYS = ("uu.u", "uv.u", "vv.u", "uu.v", "uv.v", "vv.v")


def thread_count() -> int:
    try:
        n = int(os.environ.get("ISOCURVE_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, min(n, os.cpu_count() or 1))


def parallel_map(fn, items):
    """Ordered map; uses up to ISOCURVE_THREADS worker threads."""
    n = thread_count()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True, eq=False)
class SurfacePair:
    """Source chart M and target chart M-bar sharing the coordinate domain."""

    name: str
    source: SurfaceChart
    target: SurfaceChart
    u_range: tuple
    v_range: tuple

    def __post_init__(self):
        for lo, hi in (self.u_range, self.v_range):
            if not lo < hi:
                raise ValueError(f"pair {self.name!r} has an empty domain")
        for chart in (self.source, self.target):
            if not (chart.contains(self.u_range[0], self.v_range[0])
                    and chart.contains(self.u_range[1], self.v_range[1])):
                raise DomainViolation(
                    f"shared domain of pair {self.name!r} leaves chart {chart.name!r}")

    def contains(self, u, v):
        su = 1e-9 * (1.0 + max(map(abs, self.u_range)))
        sv = 1e-9 * (1.0 + max(map(abs, self.v_range)))
        return (self.u_range[0] - su <= u <= self.u_range[1] + su
                and self.v_range[0] - sv <= v <= self.v_range[1] + sv)

    def flip_target(self):
        return replace(self, target=self.target.flipped())

    def grid(self, n, m):
        us = np.linspace(self.u_range[0], self.u_range[1], n)
        vs = np.linspace(self.v_range[0], self.v_range[1], m)
        return [(float(u), float(v)) for u in us for v in vs]

    def describe(self):
        return {"name": self.name, "source": self.source.name, "target": self.target.name,
                "u_range": list(self.u_range), "v_range": list(self.v_range),
                "target_orientation": self.target.orientation}


# ---------------------------------------------------------------- reports

@dataclass
class IsometryReport:
    pair: str
    grid: tuple
    eps_iso: float
    max_form: dict
    mean_form: dict
    max_derivative: dict
    worst_point: tuple
    orientation_sign: int
    passed: bool = field(init=False)

    def __post_init__(self):
        worst = max(list(self.max_form.values()) + list(self.max_derivative.values()))
        self.passed = bool(worst < self.eps_iso)

    @property
    def max_deviation(self):
        return max(list(self.max_form.values()) + list(self.max_derivative.values()))

    def as_dict(self):
        return {"pair": self.pair, "grid": list(self.grid), "eps_iso": self.eps_iso,
                "max_form": self.max_form, "mean_form": self.mean_form,
                "max_derivative": self.max_derivative, "worst_point": list(self.worst_point),
                "orientation_sign": self.orientation_sign, "pass": self.passed}


@dataclass
class IdentityReport:
    pair: str
    grid: tuple
    eps: float
    max_deviation: dict
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(max(self.max_deviation.values()) < self.eps)

    def as_dict(self):
        return {"pair": self.pair, "grid": list(self.grid), "eps": self.eps,
                "max_deviation": self.max_deviation, "pass": self.passed}


def _form_deviation(pair, point):
    u, v = point
    a = first_form(chart_jet(pair.source, u, v, 2)).as_dict()
    b = first_form(chart_jet(pair.target, u, v, 2)).as_dict()
    return [abs(a[k] - b[k]) for k in FORM_KEYS + DERIV_KEYS]


def check_isometry(pair: SurfacePair, grid=(50, 50), eps_iso: float = EPS_ISO) -> IsometryReport:
    """Compare E, F, G and their first derivatives on a grid over the shared domain."""
    points = pair.grid(*grid)
    rows = np.array(parallel_map(lambda p: _form_deviation(pair, p), points))
    keys = FORM_KEYS + DERIV_KEYS
    worst = int(np.argmax(rows.max(axis=1)))
    uc = 0.5 * (pair.u_range[0] + pair.u_range[1])
    vc = 0.5 * (pair.v_range[0] + pair.v_range[1])
    try:
        sign = pushforward(pair, uc, vc).orientation
    except SingularBasis:
        sign = 0
    return IsometryReport(
        pair=pair.name, grid=tuple(grid), eps_iso=eps_iso,
        max_form={k: float(rows[:, i].max()) for i, k in enumerate(FORM_KEYS)},
        mean_form={k: math.fsum(rows[:, i]) / len(points) for i, k in enumerate(FORM_KEYS)},
        max_derivative={k: float(rows[:, i + 3].max()) for i, k in enumerate(DERIV_KEYS)},
        worst_point=points[worst], orientation_sign=sign)


def second_derivative_dots(cj):
    pu, pv = cj.phi_u, cj.phi_v
    return (cj.phi_uu @ pu, cj.phi_uv @ pu, cj.phi_vv @ pu,
            cj.phi_uu @ pv, cj.phi_uv @ pv, cj.phi_vv @ pv)


def _dot_deviation(pair, point):
    u, v = point
    a = second_derivative_dots(chart_jet(pair.source, u, v, 2))
    b = second_derivative_dots(chart_jet(pair.target, u, v, 2))
    return [abs(x - y) for x, y in zip(a, b)]


def check_second_derivative_identities(pair: SurfacePair, grid=(50, 50),
                                       eps: float = EPS_ISO) -> IdentityReport:
    """phi_uu.phi_u and its five companions must agree between the charts."""
    rows = np.array(parallel_map(lambda p: _dot_deviation(pair, p), pair.grid(*grid)))
    return IdentityReport(pair.name, tuple(grid), eps,
                          {k: float(rows[:, i].max()) for i, k in enumerate(DOT_KEYS)})


# ---------------------------------------------------------------- pushforward

@dataclass(frozen=True, eq=False)
class PushforwardFrame:
    u: float
    v: float
    matrix: np.ndarray
    det: float

    @property
    def orientation(self) -> int:
        return 1 if self.det > 0 else -1

    def apply(self, x):
        return self.matrix @ np.asarray(x, dtype=float)

    def as_dict(self):
        return {"u": self.u, "v": self.v, "matrix": self.matrix.tolist(), "det": self.det}


def frame_from_jets(cj, cjbar, cond_max: float = 1e12) -> PushforwardFrame:
    B = np.column_stack([cj.phi_u, cj.phi_v, unit_normal(cj)])
    Bbar = np.column_stack([cjbar.phi_u, cjbar.phi_v, unit_normal(cjbar)])
    if np.linalg.cond(B) > cond_max:
        raise SingularBasis(f"source basis is singular at ({cj.u!r}, {cj.v!r})")
    P = np.linalg.solve(B.T, Bbar.T).T
    return PushforwardFrame(cj.u, cj.v, P, float(np.linalg.det(P)))


def pushforward(pair: SurfacePair, u: float, v: float) -> PushforwardFrame:
    """Linear map sending phi_u, phi_v, N to their counterparts on the target chart."""
    return frame_from_jets(chart_jet(pair.source, u, v, 1), chart_jet(pair.target, u, v, 1))


# ---------------------------------------------------------------- curves

def check_curve_in_domain(pair: SurfacePair, curve: CurveOnSurface, samples: int = 65):
    for s in curve.samples(samples):
        U, V = curve.param_jets(float(s), 0)
        if not pair.contains(U.value, V.value):
            raise DomainViolation(
                f"curve {curve.name!r} leaves the domain of pair {pair.name!r} at s={float(s)!r}")


def transport_curve(pair: SurfacePair, curve: CurveOnSurface, samples: int = 65) -> CurveOnSurface:
    """The image curve: identical coordinate functions hosted on the target chart."""
    if curve.host is not pair.source and curve.host.describe() != pair.source.describe():
        raise ValueError(f"curve {curve.name!r} is not hosted on the source of pair {pair.name!r}")
    check_curve_in_domain(pair, curve, samples)
    return curve.with_host(pair.target)


# ---------------------------------------------------------------- built-in pairs

ROTATED_SPHERE = ("-2*sin(u)*cos(v)", "2*cos(u)*cos(v)", "2*sin(v)")

BUILTIN_PAIRS = {
    "plane-cylinder": ("plane", "cylinder", (-3.0, 3.0), (-3.0, 3.0)),
    "cylinder-plane": ("cylinder", "plane", (-3.0, 3.0), (-3.0, 3.0)),
    "catenoid-helicoid": ("catenoid", "helicoid", (-3.0, 3.0), (-2.0, 2.0)),
    "helicoid-catenoid": ("helicoid", "catenoid", (-3.0, 3.0), (-2.0, 2.0)),
    "plane-sphere": ("plane", "sphere", (-1.0, 1.0), (-1.0, 1.0)),
}


def identity_pair(surface: SurfaceChart, u_range=None, v_range=None) -> SurfacePair:
    return SurfacePair(f"{surface.name}-identity", surface, surface,
                       tuple(u_range or surface.u_range), tuple(v_range or surface.v_range))


def builtin_pair(name: str) -> SurfacePair:
    if name == "sphere-rotated":
        sphere = builtin_surface("sphere")
        rotated = SurfaceChart.from_strings("sphere-rotated", *ROTATED_SPHERE,
                                            sphere.u_range, sphere.v_range)
        return SurfacePair(name, sphere, rotated, (-3.0, 3.0), (-1.4, 1.4))
    src, tgt, ur, vr = BUILTIN_PAIRS[name]
    return SurfacePair(name, builtin_surface(src), builtin_surface(tgt), ur, vr)
