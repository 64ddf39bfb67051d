"""Parametric surface charts and their local differential apparatus."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DegenerateMetric, DomainViolation, NonImmersedPoint
from .expr import ExpressionAst, eval_scalar, parse
from .jet import Jet, eval_jet

EPS_IMMERSION = 1e-10
EPS_METRIC = 1e-20
_CHART_VARS = frozenset({"u", "v"})


def _slack(bounds):
    return 1e-9 * (1.0 + max((abs(b) for b in bounds if math.isfinite(b)), default=0.0))


@dataclass(frozen=True)
class SurfaceChart:
    name: str
    x: ExpressionAst
    y: ExpressionAst
    z: ExpressionAst
    u_range: tuple = (-math.inf, math.inf)
    v_range: tuple = (-math.inf, math.inf)
    eps_immersion: float = EPS_IMMERSION
    orientation: int = 1

    def __post_init__(self):
        for comp in (self.x, self.y, self.z):
            extra = comp.free - _CHART_VARS
            if extra:
                raise ValueError(f"chart {self.name!r} uses non-chart variables {sorted(extra)}")
        if not (self.u_range[0] < self.u_range[1] and self.v_range[0] < self.v_range[1]):
            raise ValueError(f"chart {self.name!r} has an empty domain")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def flipped(self):
        """Same chart with the opposite normal orientation."""
        return replace(self, orientation=-self.orientation)

    @classmethod
    def from_strings(cls, name, x, y, z, u_range=(-math.inf, math.inf),
                     v_range=(-math.inf, math.inf), eps_immersion=EPS_IMMERSION):
        return cls(name, parse(x, _CHART_VARS), parse(y, _CHART_VARS), parse(z, _CHART_VARS),
                   tuple(map(float, u_range)), tuple(map(float, v_range)), eps_immersion)

    @property
    def components(self):
        return (self.x, self.y, self.z)

    def contains(self, u, v) -> bool:
        su, sv = _slack(self.u_range), _slack(self.v_range)
        return (self.u_range[0] - su <= u <= self.u_range[1] + su
                and self.v_range[0] - sv <= v <= self.v_range[1] + sv)

    def check_domain(self, u, v):
        if not self.contains(u, v):
            raise DomainViolation(
                f"({u!r}, {v!r}) outside domain {self.u_range} x {self.v_range} of chart {self.name!r}")

    def position(self, u, v) -> np.ndarray:
        self.check_domain(u, v)
        env = {"u": u, "v": v}
        return np.array([eval_scalar(c, env) for c in self.components])

    def describe(self):
        return {"name": self.name, "x": str(self.x), "y": str(self.y), "z": str(self.z),
                "u_range": list(self.u_range), "v_range": list(self.v_range)}


# partial-derivative labels in ChartJet order, with their (i, j) multi-index
PARTIALS = (("phi_u", (1, 0)), ("phi_v", (0, 1)),
            ("phi_uu", (2, 0)), ("phi_uv", (1, 1)), ("phi_vv", (0, 2)),
            ("phi_uuu", (3, 0)), ("phi_uuv", (2, 1)), ("phi_uvv", (1, 2)), ("phi_vvv", (0, 3)))


@dataclass(frozen=True, eq=False)
class ChartJet:
    """Position and partial derivative vectors of a chart at one point."""

    u: float
    v: float
    order: int
    phi: np.ndarray
    phi_u: np.ndarray
    phi_v: np.ndarray
    phi_uu: Optional[np.ndarray] = None
    phi_uv: Optional[np.ndarray] = None
    phi_vv: Optional[np.ndarray] = None
    phi_uuu: Optional[np.ndarray] = None
    phi_uuv: Optional[np.ndarray] = None
    phi_uvv: Optional[np.ndarray] = None
    phi_vvv: Optional[np.ndarray] = None
    orientation: int = 1

    @property
    def normal_vector(self) -> np.ndarray:
        """Unnormalized normal phi_u x phi_v (negated for a flipped chart)."""
        a, b = self.phi_u, self.phi_v
        n = np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                      a[0] * b[1] - a[1] * b[0]])  # np.cross is slow on 3-vectors
        return n if self.orientation == 1 else -n

    @property
    def area_element(self) -> float:
        return float(np.linalg.norm(self.normal_vector))


def chart_jet(surface: SurfaceChart, u: float, v: float, order: int = 2) -> ChartJet:
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    surface.check_domain(u, v)
    seeds = {"u": Jet.variable(u, 0, 2, order), "v": Jet.variable(v, 1, 2, order)}
    comps = [eval_jet(c, seeds) for c in surface.components]
    fields = {"phi": np.array([c.value for c in comps])}
    for label, (i, j) in PARTIALS:
        if i + j <= order:
            fields[label] = np.array([c.partial(i, j) for c in comps])
    cj = ChartJet(u=float(u), v=float(v), order=order, orientation=surface.orientation, **fields)
    if cj.area_element <= surface.eps_immersion:
        raise NonImmersedPoint(
            f"|phi_u x phi_v| = {cj.area_element:.3g} at ({u!r}, {v!r}) on chart {surface.name!r}")
    return cj


@dataclass(frozen=True)
class FirstFundamentalForm:
    E: float
    F: float
    G: float
    E_u: float
    E_v: float
    F_u: float
    F_v: float
    G_u: float
    G_v: float

    @property
    def det(self) -> float:
        return self.E * self.G - self.F * self.F

    @property
    def W(self) -> float:
        return math.sqrt(self.det)

    def as_dict(self):
        d = {k: getattr(self, k) for k in ("E", "F", "G", "E_u", "E_v", "F_u", "F_v", "G_u", "G_v")}
        d["W"] = self.W
        return d


def first_form(jet: ChartJet) -> FirstFundamentalForm:
    """E, F, G and their first derivatives; the latter from second partials by the product rule."""
    if jet.order < 2:
        raise ValueError("first_form needs a chart jet of order >= 2")
    pu, pv = jet.phi_u, jet.phi_v
    puu, puv, pvv = jet.phi_uu, jet.phi_uv, jet.phi_vv
    return FirstFundamentalForm(
        E=float(pu @ pu), F=float(pu @ pv), G=float(pv @ pv),
        E_u=2.0 * float(puu @ pu), E_v=2.0 * float(puv @ pu),
        F_u=float(puu @ pv + pu @ puv), F_v=float(puv @ pv + pu @ pvv),
        G_u=2.0 * float(puv @ pv), G_v=2.0 * float(pvv @ pv),
    )


def unit_normal(jet: ChartJet) -> np.ndarray:
    n = jet.normal_vector
    norm = float(np.linalg.norm(n))
    if norm <= EPS_IMMERSION:
        raise NonImmersedPoint(f"|phi_u x phi_v| = {norm:.3g} at ({jet.u!r}, {jet.v!r})")
    return n / norm


@dataclass(frozen=True)
class SecondFundamentalForm:
    L: float
    M: float
    N: float

    def as_dict(self):
        return {"L": self.L, "M": self.M, "N": self.N}


def second_form(jet: ChartJet, normal: Optional[np.ndarray] = None) -> SecondFundamentalForm:
    """L, M, N against the unit normal, or against ``normal`` when one is supplied."""
    if jet.order < 2:
        raise ValueError("second_form needs a chart jet of order >= 2")
    n = unit_normal(jet) if normal is None else normal
    return SecondFundamentalForm(float(jet.phi_uu @ n), float(jet.phi_uv @ n), float(jet.phi_vv @ n))


@dataclass(frozen=True)
class ChristoffelSymbols:
    """Second-kind symbols; ``g1_12`` is Gamma^1_{12} (= Gamma^1_{21})."""

    g1_11: float
    g2_11: float
    g1_12: float
    g2_12: float
    g1_22: float
    g2_22: float

    @property
    def g1_21(self):
        return self.g1_12

    @property
    def g2_21(self):
        return self.g2_12

    def as_dict(self):
        return {k: getattr(self, k) for k in ("g1_11", "g2_11", "g1_12", "g2_12", "g1_22", "g2_22")}


def christoffel(form: FirstFundamentalForm, paper_literal: bool = False,
                eps: float = EPS_METRIC) -> ChristoffelSymbols:
    """Christoffel symbols of the second kind.

    ``paper_literal=True`` selects the alternative table, which has ``F E_v``
    in place of ``F E_u`` in Gamma^2_11 and ``F G_v`` in place of ``F G_u`` in
    Gamma^2_22. Both differences carry F and vanish on orthogonal charts.
    """
    E, F, G = form.E, form.F, form.G
    Eu, Ev, Fu, Fv, Gu, Gv = form.E_u, form.E_v, form.F_u, form.F_v, form.G_u, form.G_v
    w2 = E * G - F * F
    if w2 <= eps:
        raise DegenerateMetric(f"EG - F^2 = {w2!r}")
    d = 2.0 * w2
    if paper_literal:
        return ChristoffelSymbols(
            g1_11=(G * Eu + F * (Ev - 2.0 * Fu)) / d,
            g2_11=(E * (2.0 * Fu - Ev) - F * Ev) / d,
            g1_12=(G * Ev - F * Gu) / d,
            g2_12=(E * Gu - F * Ev) / d,
            g1_22=(G * (2.0 * Fv - Gu) - F * Gv) / d,
            g2_22=(E * Gv + F * (Gv - 2.0 * Fv)) / d,
        )
    return ChristoffelSymbols(
        g1_11=(G * Eu - 2.0 * F * Fu + F * Ev) / d,
        g2_11=(2.0 * E * Fu - E * Ev - F * Eu) / d,
        g1_12=(G * Ev - F * Gu) / d,
        g2_12=(E * Gu - F * Ev) / d,
        g1_22=(2.0 * G * Fv - G * Gu - F * Gv) / d,
        g2_22=(E * Gv - 2.0 * F * Fv + F * Gu) / d,
    )


def gaussian_curvature(first: FirstFundamentalForm, second: SecondFundamentalForm) -> float:
    return (second.L * second.N - second.M ** 2) / first.det


def surface_report(surface: SurfaceChart, u: float, v: float, paper_literal=False):
    cj = chart_jet(surface, u, v, order=2)
    I = first_form(cj)
    II = second_form(cj)
    return {
        "u": float(u), "v": float(v),
        "position": cj.phi.tolist(),
        "normal": unit_normal(cj).tolist(),
        "first_form": I.as_dict(),
        "second_form": II.as_dict(),
        "gaussian_curvature": gaussian_curvature(I, II),
        "christoffel": christoffel(I, paper_literal=paper_literal).as_dict(),
    }


# ---------------------------------------------------------------- built-in charts

BUILTIN_SURFACES = {
    "plane": ("u", "v", "0", (-10, 10), (-10, 10)),
    "cylinder": ("cos(u)", "sin(u)", "v", (-10, 10), (-10, 10)),
    "sphere": ("2*cos(u)*cos(v)", "2*sin(u)*cos(v)", "2*sin(v)", (-7, 7), (-1.5, 1.5)),
    "catenoid": ("cosh(v)*cos(u)", "cosh(v)*sin(u)", "v", (-10, 10), (-3, 3)),
    "helicoid": ("sinh(v)*cos(u)", "sinh(v)*sin(u)", "u", (-10, 10), (-3, 3)),
}


def builtin_surface(name: str) -> SurfaceChart:
    x, y, z, ur, vr = BUILTIN_SURFACES[name]
    return SurfaceChart.from_strings(name, x, y, z, ur, vr)
