import math

import numpy as np
import pytest

from isocurve.curve import (CurveOnSurface, assert_unit_speed, classify_position, curve_jet,
                            curve_scalars, frenet, geodesic_curvature, normal_curvature,
                            normal_curvature_extrinsic, normal_decomposition,
                            reparameterize_by_arc_length, speed)
from isocurve.errors import (DomainViolation, NotANormalCurve, NotUnitSpeed, SingularSpeed,
                             VanishingCurvature)
from isocurve.surface import builtin_surface

from conftest import random_unit_curve

A, B = 0.6, 0.8


def curve(host, u, v, interval=(-2.0, 2.0), **kw):
    return CurveOnSurface.from_strings("c", builtin_surface(host), u, v, interval, **kw)


@pytest.fixture
def circle():
    return curve("plane", "2*cos(s/2)", "2*sin(s/2)", (0.0, 6.0))


@pytest.fixture
def helix():
    return curve("cylinder", f"{A}*s", f"{B}*s")


def test_curve_jet_circle(circle):
    cj = curve_jet(circle, 0.0, 3)
    assert cj.alpha == pytest.approx([2, 0, 0], abs=1e-15)
    assert cj.d1 == pytest.approx([0, 1, 0], abs=1e-15)
    assert cj.d2 == pytest.approx([-0.5, 0, 0], abs=1e-15)
    assert cj.d3 == pytest.approx([0, -0.25, 0], abs=1e-15)


def test_curve_jet_helix(helix):
    cj = curve_jet(helix, 0.0)
    assert cj.d1 == pytest.approx([0, A, B], abs=1e-15)
    assert np.linalg.norm(cj.d1) == pytest.approx(1.0, abs=1e-15)


def test_constant_u_curve_tangent():
    c = curve("sphere", "0.4", "s/2", (-1.0, 1.0))
    cj = curve_jet(c, 0.3)
    assert cj.d1 == pytest.approx(0.5 * cj.chart.phi_v, abs=1e-15)


def test_third_derivative_matches_differences(helix):
    c = curve("catenoid", "0.4*s + 0.2*sin(s)", "0.3*cos(s)")
    h = 1e-3
    d2 = [curve_jet(c, 0.5 + k * h, 2).d2 for k in (-2, -1, 1, 2)]
    fd = (d2[0] - 8 * d2[1] + 8 * d2[2] - d2[3]) / (12 * h)
    assert curve_jet(c, 0.5, 3).d3 == pytest.approx(fd, abs=1e-9)


def test_domain_violation(circle):
    with pytest.raises(DomainViolation):
        curve_jet(circle, 7.0)


def test_speed(helix):
    assert speed(helix, 1.3) == pytest.approx(1.0, abs=1e-15)
    assert speed(curve("plane", "s", "0"), 0.5) == 1.0
    assert speed(curve("plane", "2*s", "0"), 0.5) == 2.0
    rep = assert_unit_speed(curve("plane", "2*s", "0"))
    assert not rep.passed and rep.max_deviation == pytest.approx(1.0)
    with pytest.raises(NotUnitSpeed):
        assert_unit_speed(curve("plane", "2*s", "0"), raise_on_fail=True)


def test_reparameterize_linear():
    r = reparameterize_by_arc_length(curve("plane", "2*t", "0", (0.0, 1.0), param="t"))
    assert r.interval == pytest.approx((0.0, 2.0), abs=1e-12)
    for s in (0.0, 0.37, 1.2, 2.0):
        assert curve_jet(r, s).u[0] == pytest.approx(s, abs=1e-12)


def test_reparameterize_helix_is_identity():
    base = curve("cylinder", f"{A}*t", f"{B}*t", (0.0, 3.0), param="t")
    r = reparameterize_by_arc_length(base)
    assert r.interval[1] == pytest.approx(3.0, abs=1e-10)
    for s in np.linspace(0, 3, 7):
        cj = curve_jet(r, s, 3)
        assert cj.u == pytest.approx((A * s, A, 0.0, 0.0), abs=1e-10)


def test_reparameterize_ellipse_unit_speed():
    r = reparameterize_by_arc_length(curve("plane", "3*cos(t)", "sin(t)", (0.0, 2.0), param="t"))
    assert assert_unit_speed(r, 41, 1e-8).passed
    for s in np.linspace(0, r.interval[1], 5):
        cj = curve_jet(r, s, 3)
        assert abs(cj.d1 @ cj.d2) < 1e-9  # derivative of |alpha'|^2 / 2
        assert abs(cj.d1 @ cj.d3 + cj.d2 @ cj.d2) < 1e-8


def test_singular_speed():
    with pytest.raises(SingularSpeed):
        reparameterize_by_arc_length(curve("plane", "t^2", "0", (0.0, 1.0), param="t"))


def test_frenet_circle(circle):
    fr = frenet(circle, 1.7)
    assert fr.kappa == pytest.approx(0.5, abs=1e-12)
    assert fr.tau == pytest.approx(0.0, abs=1e-12)
    assert fr.b == pytest.approx([0, 0, 1], abs=1e-12)


def test_frenet_helix(helix):
    fr = frenet(helix, 0.4)
    assert fr.kappa == pytest.approx(A * A, abs=1e-9)
    assert fr.tau == pytest.approx(A * B, abs=1e-9)


def test_frenet_line():
    with pytest.raises(VanishingCurvature):
        frenet(curve("plane", "s", "0"), 0.0)


def test_normal_curvature_examples(helix):
    assert normal_curvature(curve("plane", "s", "s^2/4"), 0.3) == 0.0
    assert normal_curvature(helix, 0.7) == pytest.approx(-A * A, abs=1e-12)
    eq = curve("sphere", "s/2", "0", (-3.0, 3.0))
    assert normal_curvature(eq, 1.0) == pytest.approx(-0.5, abs=1e-12)


def test_geodesic_curvature_examples(helix, circle):
    assert geodesic_curvature(helix, 0.2) == pytest.approx(0.0, abs=1e-12)
    assert abs(geodesic_curvature(circle, 2.0)) == pytest.approx(0.5, abs=1e-12)
    assert abs(geodesic_curvature(circle, 2.0, "extrinsic")) == pytest.approx(0.5, abs=1e-12)
    eq = curve("sphere", "s/2", "0", (-3.0, 3.0))
    assert geodesic_curvature(eq, 0.5) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        geodesic_curvature(eq, 0.5, "bogus")


def test_classification(circle):
    c = classify_position(circle, 1.0)
    assert c.kind == "normal"
    assert (c.dot_n, c.dot_b) == pytest.approx((-2.0, 0.0), abs=1e-9)
    assert normal_decomposition(circle, 1.0) == pytest.approx((-2.0, 0.0), abs=1e-9)
    great = curve("sphere", "s/2", "0", (-3.0, 3.0))
    assert normal_decomposition(great, 0.4) == pytest.approx((-2.0, 0.0), abs=1e-9)
    wavy = curve("plane", "1 + 0.2*sin(s)", "s", (-1.0, 1.0))
    c = classify_position(wavy, 0.5)
    assert not c.normal and c.dot_t == pytest.approx(curve_jet(wavy, 0.5).alpha @ curve_jet(wavy, 0.5).d1)


def test_line_through_origin_not_normal():
    # the frame is undefined on a straight line; the defect alpha.t = s is still visible
    line = curve("plane", "s", "0")
    assert curve_scalars(line, 1.5).delta == 1.5


def test_translated_circle_not_normal():
    c = curve("plane", "1 + 2*cos(s/2)", "2*sin(s/2)", (0.0, 6.0))
    with pytest.raises(NotANormalCurve) as err:
        normal_decomposition(c, 1.0)
    assert err.value.delta == pytest.approx(-math.sin(0.5), abs=1e-12)


def test_reconstruction(rng):
    sph = builtin_surface("sphere")
    for _ in range(5):
        c = random_unit_curve(rng, sph)
        for s in np.linspace(*c.interval, 5):
            fr = frenet(c, s)
            lam, mu = normal_decomposition(c, s)
            a = curve_jet(c, s).alpha
            assert np.linalg.norm(a - lam * fr.n - mu * fr.b) < 1e-7


def test_frame_orthonormal_and_serret_frenet(rng):
    hosts = ["cylinder", "sphere", "catenoid"]
    h = 1e-3
    checked = 0
    for name in hosts:
        c = random_unit_curve(rng, builtin_surface(name))
        s0, s1 = c.interval
        for s in np.linspace(s0 + 3 * h, s1 - 3 * h, 4):
            fr = frenet(c, s)
            if fr.kappa < 0.05 or abs(fr.tau) > 5:  # fixed-step differences need a tame frame
                continue
            assert max(abs(fr.t @ fr.n), abs(fr.t @ fr.b), abs(fr.n @ fr.b)) < 1e-9
            assert np.cross(fr.t, fr.n) @ fr.b > 0
            fs = [frenet(c, s + k * h) for k in (-2, -1, 1, 2)]

            def d(attr):
                v = [getattr(f, attr) for f in fs]
                return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)

            assert np.linalg.norm(d("t") - fr.kappa * fr.n) < 1e-6
            assert np.linalg.norm(d("n") + fr.kappa * fr.t - fr.tau * fr.b) < 1e-6
            assert np.linalg.norm(d("b") + fr.tau * fr.n) < 1e-6
            checked += 1
    assert checked >= 6


@pytest.mark.parametrize("host", ["plane", "cylinder", "sphere", "catenoid"])
def test_curvature_consistency(rng, host):
    surf = builtin_surface(host)
    for _ in range(3):
        c = random_unit_curve(rng, surf)
        for s in np.linspace(*c.interval, 9):
            kn = normal_curvature(c, s)
            assert abs(kn - normal_curvature_extrinsic(c, s)) < 1e-9
            kg = geodesic_curvature(c, s)
            assert abs(kg - geodesic_curvature(c, s, "extrinsic")) < 1e-8
            k = float(np.linalg.norm(curve_jet(c, s).d2))
            assert abs(k * k - kn * kn - kg * kg) < 1e-8


@pytest.mark.parametrize("host, normal", [("sphere", True), ("plane", False), ("cylinder", False)])
def test_normal_iff_constant_norm(rng, host, normal):
    c = random_unit_curve(rng, builtin_surface(host))
    ss = np.linspace(*c.interval, 9)
    norms = [curve_jet(c, s).alpha @ curve_jet(c, s).alpha for s in ss]
    drift = (max(norms) - min(norms)) / max(norms)
    all_normal = all(classify_position(c, s).normal for s in ss)
    assert all_normal == normal
    assert (drift < 1e-8) == normal


def test_origin_offset_changes_classification():
    c = curve("plane", "1.5*cos(s/1.5)", "1.5*sin(s/1.5)", (0.0, 9.0), origin=(0, 0, -1))
    lam, mu = normal_decomposition(c, 2.0)
    assert (lam, mu) == pytest.approx((-1.5, 1.0), abs=1e-12)
