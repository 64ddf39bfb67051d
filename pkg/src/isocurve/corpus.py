"""Named normal curves on the built-in isometric pairs.

Every entry is a unit-speed curve with constant distance to its origin, so its
position vector stays orthogonal to the tangent. Most have mu != 0, which is
where the tangential and cross-component identities are not trivially zero.
"""
from __future__ import annotations

import math

from .curve import CurveOnSurface, reparameterize_by_arc_length
from .isometry import SurfacePair, builtin_pair, identity_pair
from .surface import SurfaceChart, builtin_surface

SHEAR = 0.5


def sheared_pair() -> SurfacePair:
    """Plane and cylinder in a chart with F = 0.5 (non-orthogonal)."""
    plane = SurfaceChart.from_strings("sheared-plane", f"u + {SHEAR}*v", "v", "0",
                                      (-10, 10), (-10, 10))
    cyl = SurfaceChart.from_strings("sheared-cylinder", f"cos(u + {SHEAR}*v)",
                                    f"sin(u + {SHEAR}*v)", "v", (-10, 10), (-10, 10))
    return SurfacePair("sheared-plane-cylinder", plane, cyl, (-3.0, 3.0), (-3.0, 3.0))


def _circle(host, r, interval, origin=(0.0, 0.0, 0.0), name="circle"):
    return CurveOnSurface.from_strings(name, host, f"{r}*cos(s/{r})", f"{r}*sin(s/{r})",
                                       interval, origin=origin)


def _entries():
    pc = builtin_pair("plane-cylinder")
    cp = builtin_pair("cylinder-plane")
    ch = builtin_pair("catenoid-helicoid")
    hc = builtin_pair("helicoid-catenoid")
    sr = builtin_pair("sphere-rotated")
    sh = sheared_pair()
    v0 = 0.7
    c0 = math.cosh(v0)
    R = 1.5
    helix_like = CurveOnSurface.from_strings(
        "helicoid-normal", hc.source, f"{R}*cos(t)",
        f"log({R}*sin(t) + sqrt({R}^2*sin(t)^2 + 1))", (0.3, 2.8), param="t", unit_speed=False)
    lat = 0.5
    return {
        # mu = 0: position along the principal normal
        "circle-r2": (pc, _circle(pc.source, 2.0, (0.0, 6.0), name="circle-r2")),
        "offset-circle": (pc, _circle(pc.source, 1.5, (0.0, 9.0), (0.0, 0.0, -1.0),
                                      name="offset-circle")),
        "cylinder-circle": (cp, CurveOnSurface.from_strings(
            "cylinder-circle", cp.source, "s", "0.5", (-2.5, 2.5))),
        "catenoid-circle": (ch, CurveOnSurface.from_strings(
            "catenoid-circle", ch.source, f"s/{c0!r}", f"{v0}", (-3.0, 3.0))),
        "helicoid-normal": (hc, reparameterize_by_arc_length(helix_like)),
        "sphere-latitude": (sr, CurveOnSurface.from_strings(
            "sphere-latitude", sr.source, f"s/(2*cos({lat}))", f"{lat}", (-3.0, 3.0))),
        "sheared-circle": (sh, CurveOnSurface.from_strings(
            "sheared-circle", sh.source, f"1.5*cos(s/1.5) - {SHEAR}*1.5*sin(s/1.5)",
            "1.5*sin(s/1.5)", (0.0, 9.0), origin=(0.0, 0.0, -1.0))),
    }


_CACHE = {}


def corpus():
    """Mapping name -> (pair, curve); built once per process."""
    if not _CACHE:
        _CACHE.update(_entries())
    return dict(_CACHE)


def normal_curve(name):
    return corpus()[name]


def identity_circle():
    plane = builtin_surface("plane")
    pair = identity_pair(plane, (-3.0, 3.0), (-3.0, 3.0))
    return pair, _circle(plane, 2.0, (0.0, 6.0), name="circle-r2")
