"""Curves (u(s), v(s)) on a host chart: jets, Frenet frame, curvatures, classification."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.interpolate import PchipInterpolator

from .errors import (DomainViolation, NotANormalCurve, NotUnitSpeed, SingularSpeed,
                     VanishingCurvature)
from .expr import ExpressionAst, parse
from .jet import Jet, eval_jet, sqrt as jsqrt
from .surface import (ChartJet, SurfaceChart, chart_jet, christoffel, first_form,
                      second_form, unit_normal)

EPS_SPEED = 1e-6
EPS_KAPPA = 1e-9
EPS_SINGULAR_SPEED = 1e-8


def default_eps_class(alpha) -> float:
    return 1e-7 * (1.0 + float(np.linalg.norm(alpha)))


@dataclass(frozen=True, eq=False)
class CurveOnSurface:
    """Coordinate functions (u, v) of one parameter, hosted on a chart.

    ``param`` names the variable used by the coordinate expressions. The
    position vector used for classification is measured from ``origin``.
    """

    name: str
    host: SurfaceChart
    u_expr: ExpressionAst
    v_expr: ExpressionAst
    interval: tuple
    param: str = "s"
    unit_speed: bool = True
    origin: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.interval[0] < self.interval[1]:
            raise ValueError(f"curve {self.name!r} has an empty interval")
        pname = self._expr_param()
        for e in (self.u_expr, self.v_expr):
            extra = e.free - {pname}
            if extra:
                raise ValueError(f"curve {self.name!r} uses variables {sorted(extra)} besides {pname!r}")
        object.__setattr__(self, "origin", tuple(float(x) for x in self.origin))

    @classmethod
    def from_strings(cls, name, host, u, v, interval, param="s", unit_speed=True,
                     origin=(0.0, 0.0, 0.0)):
        vars_ = frozenset({param})
        return cls(name, host, parse(u, vars_), parse(v, vars_),
                   (float(interval[0]), float(interval[1])), param, unit_speed, origin)

    def _expr_param(self):
        return self.param

    def with_host(self, host: SurfaceChart) -> "CurveOnSurface":
        return replace(self, host=host)

    def check_param(self, s):
        a, b = self.interval
        slack = 1e-9 * (1.0 + max(abs(a), abs(b)))
        if not a - slack <= s <= b + slack:
            raise DomainViolation(f"s={s!r} outside [{a!r}, {b!r}] for curve {self.name!r}")

    def param_jets(self, s, order=3):
        """Univariate jets of u and v in the curve parameter at ``s``."""
        self.check_param(s)
        seed = {self.param: Jet.variable(s, 0, 1, order)}
        return eval_jet(self.u_expr, seed), eval_jet(self.v_expr, seed)

    def samples(self, n):
        return np.linspace(self.interval[0], self.interval[1], n)

    def describe(self):
        return {"name": self.name, "host": self.host.name, "u": str(self.u_expr),
                "v": str(self.v_expr), "param": self.param, "interval": list(self.interval),
                "unit_speed": self.unit_speed, "origin": list(self.origin)}


@dataclass(frozen=True, eq=False)
class CurveJet:
    """Curve derivatives at one parameter value, assembled by the chain rule."""

    s: float
    chart: ChartJet
    u: tuple  # (u, u', u'', u''')
    v: tuple
    point: np.ndarray
    alpha: np.ndarray  # point - origin
    d1: np.ndarray
    d2: np.ndarray
    d3: Optional[np.ndarray] = None


def curve_jet(curve: CurveOnSurface, s: float, order: int = 2) -> CurveJet:
    if order not in (2, 3):
        raise ValueError("order must be 2 or 3")
    U, V = curve.param_jets(s, order)
    u, v = U.derivatives(), V.derivatives()
    cj = chart_jet(curve.host, u[0], v[0], order)
    pu, pv = cj.phi_u, cj.phi_v
    d1 = u[1] * pu + v[1] * pv
    d2 = (u[2] * pu + v[2] * pv + u[1] ** 2 * cj.phi_uu
          + 2.0 * u[1] * v[1] * cj.phi_uv + v[1] ** 2 * cj.phi_vv)
    d3 = None
    if order == 3:
        d3 = (u[3] * pu + v[3] * pv
              + 3.0 * u[1] * u[2] * cj.phi_uu
              + 3.0 * (u[2] * v[1] + u[1] * v[2]) * cj.phi_uv
              + 3.0 * v[1] * v[2] * cj.phi_vv
              + u[1] ** 3 * cj.phi_uuu + 3.0 * u[1] ** 2 * v[1] * cj.phi_uuv
              + 3.0 * u[1] * v[1] ** 2 * cj.phi_uvv + v[1] ** 3 * cj.phi_vvv)
    return CurveJet(s=float(s), chart=cj, u=tuple(u), v=tuple(v), point=cj.phi,
                    alpha=cj.phi - np.asarray(curve.origin), d1=d1, d2=d2, d3=d3)


def composed_jet(curve: CurveOnSurface, s: float, order: int = 3):
    """Position jets obtained by substituting the parameter jets into the chart expressions."""
    U, V = curve.param_jets(s, order)
    return [eval_jet(c, {"u": U, "v": V}) for c in curve.host.components]


# ---------------------------------------------------------------- speed

def speed(curve: CurveOnSurface, s: float) -> float:
    """|alpha'(s)| from the first fundamental form."""
    U, V = curve.param_jets(s, 1)
    up, vp = U.partial(1), V.partial(1)
    curve.host.check_domain(U.value, V.value)
    seeds = {"u": Jet.variable(U.value, 0, 2, 1), "v": Jet.variable(V.value, 1, 2, 1)}
    comps = [eval_jet(c, seeds) for c in curve.host.components]
    pu = [c.partial(1, 0) for c in comps]
    pv = [c.partial(0, 1) for c in comps]
    E = pu[0] * pu[0] + pu[1] * pu[1] + pu[2] * pu[2]
    F = pu[0] * pv[0] + pu[1] * pv[1] + pu[2] * pv[2]
    G = pv[0] * pv[0] + pv[1] * pv[1] + pv[2] * pv[2]
    return math.sqrt(max(E * up * up + 2.0 * F * up * vp + G * vp * vp, 0.0))


@dataclass
class SpeedReport:
    samples: int
    max_deviation: float
    worst_s: float
    eps_speed: float

    @property
    def passed(self):
        return self.max_deviation < self.eps_speed

    def as_dict(self):
        return {"samples": self.samples, "max_deviation": self.max_deviation,
                "worst_s": self.worst_s, "eps_speed": self.eps_speed, "pass": self.passed}


def assert_unit_speed(curve: CurveOnSurface, samples: int = 33, eps_speed: float = EPS_SPEED,
                      raise_on_fail: bool = False) -> SpeedReport:
    worst, worst_s = -1.0, float("nan")
    for s in curve.samples(samples):
        dev = abs(speed(curve, s) - 1.0)
        if dev > worst:
            worst, worst_s = dev, float(s)
    report = SpeedReport(samples, worst, worst_s, eps_speed)
    if raise_on_fail and not report.passed:
        raise NotUnitSpeed(f"curve {curve.name!r}: ||alpha'| - 1| = {worst:.3g} at s={worst_s!r}")
    return report


# ---------------------------------------------------------------- arc-length reparameterization

class _ArcLengthTable:
    """s(t) on a node grid plus a monotone cubic inverse, refined by Newton steps."""

    def __init__(self, base: CurveOnSurface, nodes: int, rtol: float):
        self.base = base
        t0, t1 = base.interval
        self.t_nodes = np.linspace(t0, t1, nodes)
        sp = np.array([speed(base, t) for t in self.t_nodes])
        bad = np.flatnonzero(sp < EPS_SINGULAR_SPEED)
        if bad.size:
            raise SingularSpeed(
                f"speed {sp[bad[0]]:.3g} at t={float(self.t_nodes[bad[0]])!r} on curve {base.name!r}")
        sol = solve_ivp(lambda t, y: [speed(base, t)], (t0, t1), [0.0], method="RK45",
                        t_eval=self.t_nodes, rtol=rtol, atol=rtol * 1e-2)
        if not sol.success:
            raise SingularSpeed(f"arc-length integration failed: {sol.message}")
        self.s_nodes = sol.y[0]
        self.s_nodes[0] = 0.0
        if np.any(np.diff(self.s_nodes) <= 0.0):
            raise SingularSpeed(f"arc length not increasing on curve {base.name!r}")
        self.inverse = PchipInterpolator(self.s_nodes, self.t_nodes)
        self.length = float(self.s_nodes[-1])
        self._cache = {}

    def arc_length(self, t):
        i = int(np.clip(np.searchsorted(self.t_nodes, t) - 1, 0, len(self.t_nodes) - 2))
        with warnings.catch_warnings():
            # roundoff on short spans; the result is still at machine precision
            warnings.simplefilter("ignore", IntegrationWarning)
            extra, _ = quad(lambda x: speed(self.base, x), self.t_nodes[i], t,
                            epsabs=1e-15, epsrel=1e-14, limit=100)
        return self.s_nodes[i] + extra

    def t_of_s(self, s):
        t = float(self.inverse(s))
        lo, hi = self.base.interval
        for _ in range(8):
            step = (self.arc_length(t) - s) / speed(self.base, t)
            t = min(max(t - step, lo), hi)
            if abs(step) <= 1e-15 * (1.0 + abs(t)):
                break
        return t

    def t_jet(self, s):
        """Jet of t(s) to third order from dt/ds = 1/|alpha'(t)|."""
        key = float(s)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        t0 = self.t_of_s(s)
        pos = composed_jet(self.base, t0, 3)
        vel = [c.derivative() for c in pos]
        sig = jsqrt(vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2])
        s0, s1, s2 = sig.coeffs[0], sig.coeffs[1], sig.coeffs[3]
        T = Jet.constant(t0, 1, 3)
        for _ in range(3):
            rate = 1.0 / T.compose(s0, s1, s2, 0.0)
            T = rate.truncate(2).integral(t0)
        if len(self._cache) > 4096:
            self._cache.clear()
        self._cache[key] = T
        return T


@dataclass(frozen=True, eq=False)
class ArcLengthCurve(CurveOnSurface):
    """Arc-length reparameterization of a curve given in another parameter."""

    table: _ArcLengthTable = field(default=None, repr=False)

    def _expr_param(self):
        return self.table.base.param

    def param_jets(self, s, order=3):
        self.check_param(s)
        T = self.table.t_jet(s).truncate(order)
        bind = {self.table.base.param: T}
        return eval_jet(self.u_expr, bind), eval_jet(self.v_expr, bind)

    def t_of_s(self, s):
        return self.table.t_of_s(s)

    def describe(self):
        d = super().describe()
        d["reparameterized_from"] = self.table.base.describe()
        d["length"] = self.table.length
        return d


def reparameterize_by_arc_length(curve: CurveOnSurface, nodes: int = 257,
                                 rtol: float = 1e-12) -> ArcLengthCurve:
    """Unit-speed version of ``curve``; the new parameter is arc length from the start."""
    table = _ArcLengthTable(curve, nodes, rtol)
    return ArcLengthCurve(name=curve.name, host=curve.host, u_expr=curve.u_expr,
                          v_expr=curve.v_expr, interval=(0.0, table.length), param="s",
                          unit_speed=True, origin=curve.origin, table=table)


# ---------------------------------------------------------------- Frenet apparatus

@dataclass(frozen=True, eq=False)
class FrenetApparatus:
    s: float
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    kappa: float
    tau: float

    def as_dict(self):
        return {"s": self.s, "t": self.t.tolist(), "n": self.n.tolist(), "b": self.b.tolist(),
                "kappa": self.kappa, "tau": self.tau}


def frenet_from_jet(cj: CurveJet, eps_kappa: float = EPS_KAPPA) -> FrenetApparatus:
    kappa = float(np.linalg.norm(cj.d2))
    if kappa <= eps_kappa:
        raise VanishingCurvature(f"curvature {kappa:.3g} at s={cj.s!r}")
    t = cj.d1
    n = cj.d2 / kappa
    b = np.cross(t, n)
    tau = float("nan")
    if cj.d3 is not None:
        c = np.cross(cj.d1, cj.d2)
        tau = float(c @ cj.d3 / (c @ c))
    return FrenetApparatus(cj.s, t, n, b, kappa, tau)


def frenet(curve: CurveOnSurface, s: float, eps_kappa: float = EPS_KAPPA) -> FrenetApparatus:
    return frenet_from_jet(curve_jet(curve, s, 3), eps_kappa)


# ---------------------------------------------------------------- surface curvatures

def normal_curvature_from_jet(cj: CurveJet, normal: Optional[np.ndarray] = None) -> float:
    II = second_form(cj.chart, normal)
    up, vp = cj.u[1], cj.v[1]
    return up * up * II.L + 2.0 * up * vp * II.M + vp * vp * II.N


def normal_curvature(curve: CurveOnSurface, s: float) -> float:
    """kappa_n = u'^2 L + 2 u'v' M + v'^2 N."""
    return normal_curvature_from_jet(curve_jet(curve, s, 2))


def normal_curvature_extrinsic(curve: CurveOnSurface, s: float) -> float:
    cj = curve_jet(curve, s, 2)
    return float(cj.d2 @ unit_normal(cj.chart))


def beltrami_from_jet(cj: CurveJet, paper_literal: bool = False) -> float:
    I = first_form(cj.chart)
    g = christoffel(I, paper_literal=paper_literal)
    up, upp = cj.u[1], cj.u[2]
    vp, vpp = cj.v[1], cj.v[2]
    bracket = (g.g2_11 * up ** 3
               + (2.0 * g.g2_12 - g.g1_11) * up * up * vp
               + (g.g2_22 - 2.0 * g.g1_12) * up * vp * vp
               - g.g1_22 * vp ** 3
               + up * vpp - upp * vp)
    return cj.chart.orientation * bracket * I.W


def extrinsic_geodesic_from_jet(cj: CurveJet) -> float:
    return float(cj.d2 @ np.cross(unit_normal(cj.chart), cj.d1))


def geodesic_curvature(curve: CurveOnSurface, s: float, mode: str = "beltrami",
                       paper_literal: bool = False) -> float:
    cj = curve_jet(curve, s, 2)
    if mode == "beltrami":
        return beltrami_from_jet(cj, paper_literal)
    if mode == "extrinsic":
        return extrinsic_geodesic_from_jet(cj)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------- position classification

@dataclass(frozen=True)
class Classification:
    s: float
    kind: str
    dot_t: float  # delta, tangency defect
    dot_n: float  # lambda
    dot_b: float  # mu
    eps_class: float
    normal: bool
    osculating: bool
    rectifying: bool
    kappa: float = float("nan")

    def as_dict(self):
        # the expansion in chart derivatives carries lambda/kappa and mu/kappa
        return {"s": self.s, "kind": self.kind, "delta": self.dot_t, "lambda": self.dot_n,
                "mu": self.dot_b, "kappa": self.kappa, "lambda_over_kappa": self.dot_n / self.kappa,
                "mu_over_kappa": self.dot_b / self.kappa, "eps_class": self.eps_class,
                "normal": self.normal, "osculating": self.osculating, "rectifying": self.rectifying}


def classify_from_jet(cj: CurveJet, fr: FrenetApparatus, eps_class=None) -> Classification:
    a = cj.alpha
    eps = default_eps_class(a) if eps_class is None else eps_class
    dt, dn, db = float(a @ fr.t), float(a @ fr.n), float(a @ fr.b)
    is_normal, is_osc, is_rect = abs(dt) < eps, abs(db) < eps, abs(dn) < eps
    kind = ("normal" if is_normal else "osculating" if is_osc
            else "rectifying" if is_rect else "general")
    return Classification(cj.s, kind, dt, dn, db, eps, is_normal, is_osc, is_rect, fr.kappa)


def classify_position(curve: CurveOnSurface, s: float, eps_class=None) -> Classification:
    cj = curve_jet(curve, s, 3)
    return classify_from_jet(cj, frenet_from_jet(cj), eps_class)


def normal_decomposition(curve: CurveOnSurface, s: float, eps_class=None):
    """(lambda, mu) with alpha = lambda n + mu b; raises NotANormalCurve otherwise."""
    c = classify_position(curve, s, eps_class)
    if not c.normal:
        raise NotANormalCurve(s, c.dot_t)
    return c.dot_n, c.dot_b


@dataclass(frozen=True)
class CurveScalars:
    s: float
    kappa: float
    tau: float
    kappa_n: float
    kappa_g: float
    lam: float
    mu: float
    delta: float

    COLUMNS = ("s", "kappa", "tau", "kappa_n", "kappa_g", "lambda", "mu", "delta")

    def row(self):
        return (self.s, self.kappa, self.tau, self.kappa_n, self.kappa_g, self.lam, self.mu, self.delta)


def curve_scalars(curve: CurveOnSurface, s: float, paper_literal: bool = False) -> CurveScalars:
    """All per-sample scalars; frame-dependent entries are NaN where the curvature vanishes."""
    cj = curve_jet(curve, s, 3)
    kn = normal_curvature_from_jet(cj)
    kg = beltrami_from_jet(cj, paper_literal)
    delta = float(cj.alpha @ cj.d1)
    try:
        fr = frenet_from_jet(cj)
    except VanishingCurvature:
        nan = float("nan")
        return CurveScalars(float(s), float(np.linalg.norm(cj.d2)), nan, kn, kg, nan, nan, delta)
    return CurveScalars(float(s), fr.kappa, fr.tau, kn, kg,
                        float(cj.alpha @ fr.n), float(cj.alpha @ fr.b), delta)
