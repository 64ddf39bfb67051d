import math

import pytest
from hypothesis import given, settings, strategies as st

from isocurve import _jetkernel_py, jet
from isocurve.errors import DomainError
from isocurve.jet import Jet, eval_jet, eval_jet_tree

from conftest import mp_eval, mp_fd_partials, random_cubic, random_expression, uv_expr

try:
    from isocurve import _jetkernel
except ImportError:  # extension not built
    _jetkernel = None


def seeds(u, v, order=3):
    return {"u": Jet.variable(u, 0, 2, order), "v": Jet.variable(v, 1, 2, order)}


def test_product_rule_example():
    j = eval_jet(uv_expr("u^2 + sin(v)"), seeds(1.0, 0.0, 2))
    assert [j.partial(1, 0), j.partial(0, 1), j.partial(2, 0), j.partial(1, 1), j.partial(0, 2)] == \
        [2.0, 1.0, 2.0, 0.0, 0.0]
    assert j.value == 1.0


def test_partial_order_guard():
    j = Jet.variable(1.0, 0, 2, 2)
    with pytest.raises(ValueError):
        j.partial(3, 0)


def test_univariate_derivative_and_integral():
    t = Jet.variable(0.3, 0, 1, 3)
    f = jet.exp(t)
    assert f.derivatives() == pytest.approx([math.exp(0.3)] * 4, rel=1e-15)
    g = f.derivative()
    assert g.order == 2 and g.derivatives() == pytest.approx([math.exp(0.3)] * 3, rel=1e-15)
    back = g.integral(f.value)
    assert back.coeffs == pytest.approx(f.coeffs, rel=1e-15)


def test_compose_matches_function():
    t = Jet.variable(0.7, 0, 1, 3)
    x = t * t
    s = math.sin(0.49)
    c = math.cos(0.49)
    assert x.compose(s, c, -s / 2, -c / 6).coeffs == pytest.approx(jet.sin(x).coeffs, abs=1e-15)


def test_immutable():
    j = Jet.constant(1.0)
    with pytest.raises(AttributeError):
        j.order = 2


@pytest.mark.parametrize("text, u", [("sqrt(u)", 0.0), ("log(u)", -1.0), ("u^0.5", -1.0),
                                     ("1/u", 0.0), ("exp(u)", 1e4)])
def test_jet_domain_errors(text, u):
    with pytest.raises(DomainError):
        eval_jet(uv_expr(text), seeds(u, 0.0))


def test_sqrt_at_zero_value_only():
    j = eval_jet(uv_expr("sqrt(u)"), seeds(0.0, 0.0, 0))
    assert j.value == 0.0


def test_tape_matches_tree_walker(rng):
    for _ in range(100):
        ast = uv_expr(random_expression(rng, 4))
        s = seeds(rng.uniform(-1, 1), rng.uniform(-1, 1))
        assert eval_jet(ast, s).coeffs == pytest.approx(eval_jet_tree(ast, s).coeffs, rel=1e-12, abs=1e-12)


@pytest.mark.skipif(_jetkernel is None, reason="compiled kernel not built")
def test_compiled_kernel_is_bit_identical(rng):
    for _ in range(200):
        ast = uv_expr(random_expression(rng, 4))
        ops, args, names = ast.tape()
        s = seeds(rng.uniform(-1, 1), rng.uniform(-1, 1))
        sd = [s[n].coeffs for n in names]
        for order in range(4):
            assert _jetkernel.eval_tape(ops, args, sd, order) == \
                _jetkernel_py.eval_tape(ops, args, sd, order)


@pytest.mark.skipif(_jetkernel is None, reason="compiled kernel not built")
def test_use_kernel_switch():
    prev = jet.use_kernel("python")
    try:
        assert jet.kernel is _jetkernel_py
    finally:
        jet.use_kernel(prev)
    with pytest.raises(ValueError):
        jet.use_kernel("fortran")


def test_finite_difference_oracle(rng):
    for _ in range(60):
        ast = uv_expr(random_expression(rng, 3))
        u, v = rng.uniform(-1, 1), rng.uniform(-1, 1)
        j = eval_jet(ast, seeds(u, v, 2))
        fd = mp_fd_partials(ast, u, v)
        for (i, k), ref in fd.items():
            assert abs(j.partial(i, k) - ref) / max(abs(ref), 1.0) < 1e-6


def test_steep_expressions_against_high_precision_derivatives(rng):
    # central differences at a fixed step are too coarse here; mpmath.diff is not
    import mpmath
    for _ in range(25):
        ast = uv_expr(random_expression(rng, 5, steep=True))
        u, v = rng.uniform(-1, 1), rng.uniform(-1, 1)
        j = eval_jet(ast, seeds(u, v, 3))

        def f(x, y):
            return mp_eval(ast.root, {"u": x, "v": y})

        for a in range(4):
            for b in range(4 - a):
                ref = float(mpmath.diff(f, (mpmath.mpf(u), mpmath.mpf(v)), (a, b)))
                assert abs(j.partial(a, b) - ref) <= 1e-9 * max(abs(ref), 1.0)


def test_cubic_exact(rng):
    for _ in range(50):
        text, c = random_cubic(rng)
        u, v = rng.uniform(-1, 1), rng.uniform(-1, 1)
        j = eval_jet(uv_expr(text), seeds(u, v, 3))
        for a in range(4):
            for b in range(4 - a):
                exact = sum(cf * math.perm(i, a) * math.perm(k, b) * u ** (i - a) * v ** (k - b)
                            for (i, k), cf in c.items() if i >= a and k >= b)
                assert j.partial(a, b) == pytest.approx(exact, rel=1e-12, abs=1e-12)


finite = st.floats(min_value=-3, max_value=3, allow_nan=False)


@given(finite, finite, finite, finite)
@settings(max_examples=200, deadline=None)
def test_ring_laws(a, b, c, d):
    x = Jet.variable(a, 0, 2, 3) * b + c
    y = Jet.variable(d, 1, 2, 3) + a
    assert (x * y).coeffs == pytest.approx((y * x).coeffs, abs=1e-12)
    assert (x * (y + 1.0)).coeffs == pytest.approx((x * y + x).coeffs, rel=1e-12, abs=1e-12)
    if abs(y.value) > 1e-3:
        assert ((x / y) * y).coeffs == pytest.approx(x.coeffs, rel=1e-9, abs=1e-9)


@given(st.floats(min_value=0.1, max_value=5), st.integers(min_value=-4, max_value=5))
@settings(max_examples=100, deadline=None)
def test_integer_power_matches_repeated_product(x0, n):
    x = Jet.variable(x0, 0, 1, 3)
    ref = Jet.constant(1.0, 1, 3)
    for _ in range(abs(n)):
        ref = ref * x
    if n < 0:
        ref = 1.0 / ref
    assert (x ** n).coeffs == pytest.approx(ref.coeffs, rel=1e-11, abs=1e-12)
