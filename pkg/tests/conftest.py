import os
import random

import mpmath
import pytest

from isocurve.expr import Binary, Const, Unary, Var, parse

mpmath.mp.dps = 40

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
ROOT = os.path.dirname(os.path.dirname(__file__))
SCENES = os.path.join(ROOT, "scenes")
REGEN = os.environ.get("ISOCURVE_REGEN_GOLDEN") == "1"


_MP_FUNCS = {
    "sin": mpmath.sin, "cos": mpmath.cos, "tan": mpmath.tan, "sinh": mpmath.sinh,
    "cosh": mpmath.cosh, "tanh": mpmath.tanh, "exp": mpmath.exp, "log": mpmath.log,
    "sqrt": mpmath.sqrt,
}


def mp_eval(node, env):
    """Extended-precision evaluation of an AST node; independent of the jet code."""
    if isinstance(node, Const):
        return mpmath.mpf(node.value) if node.name is None else {"pi": mpmath.pi, "e": mpmath.e}[node.name]
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        x = mp_eval(node.arg, env)
        return -x if node.op == "neg" else _MP_FUNCS[node.op](x)
    a, b = mp_eval(node.left, env), mp_eval(node.right, env)
    if node.op == "add":
        return a + b
    if node.op == "sub":
        return a - b
    if node.op == "mul":
        return a * b
    if node.op == "div":
        return a / b
    return a ** b


def mp_fd_partials(ast, u, v, h=1e-5):
    """Central differences at step h, evaluated in 40-digit arithmetic."""
    h = mpmath.mpf(h)
    u, v = mpmath.mpf(u), mpmath.mpf(v)

    def f(a, b):
        return mp_eval(ast.root, {"u": a, "v": b})

    f0 = f(u, v)
    d = {
        (1, 0): (f(u + h, v) - f(u - h, v)) / (2 * h),
        (0, 1): (f(u, v + h) - f(u, v - h)) / (2 * h),
        (2, 0): (f(u + h, v) - 2 * f0 + f(u - h, v)) / h ** 2,
        (0, 2): (f(u, v + h) - 2 * f0 + f(u, v - h)) / h ** 2,
        (1, 1): (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4 * h * h),
    }
    return {k: float(x) for k, x in d.items()}


# Random smooth expressions in u, v that stay well-defined on [-1, 1]^2.
_LEAVES = ["u", "v", "0.5", "1.3", "2", "pi"]
_SAFE_UNARY = [
    lambda a: f"sin({a})", lambda a: f"cos({a})", lambda a: f"tanh({a})",
    lambda a: f"exp(0.3*{a})", lambda a: f"sqrt(2 + sin({a}))", lambda a: f"log(3 + cos({a}))",
    lambda a: f"sinh(0.5*{a})", lambda a: f"cosh(0.5*{a})", lambda a: f"tan(0.3*sin({a}))",
    lambda a: f"-({a})",
]
# Unrestricted nesting: powers and sums grow without bound, so derivatives can be huge.
_STEEP_BINARY = [
    lambda a, b: f"({a}) + ({b})", lambda a, b: f"({a}) - ({b})", lambda a, b: f"({a})*({b})",
    lambda a, b: f"({a})/(2 + sin({b}))", lambda a, b: f"({a})^2", lambda a, b: f"({a})^3",
    lambda a, b: f"(2 + cos({a}))^0.5",
]
# Scale-controlled: every node stays O(1) and each level at most doubles the derivatives,
# which keeps the truncation error of a central difference at h = 1e-5 near 1e-9.
_SCALED_BINARY = [
    lambda a, b: f"0.5*(({a}) + ({b}))", lambda a, b: f"0.5*(({a}) - ({b}))",
    lambda a, b: f"tanh({a})*({b})", lambda a, b: f"({a})/(2 + sin({b}))",
    lambda a, b: f"tanh({a})^2", lambda a, b: f"(1 + 0.5*sin({a}))^3",
    lambda a, b: f"(2 + cos({a}))^0.5",
]


def random_expression(rng: random.Random, depth=3, steep=False) -> str:
    if depth == 0 or rng.random() < 0.2:
        return rng.choice(_LEAVES)
    if rng.random() < 0.5:
        return rng.choice(_SAFE_UNARY)(random_expression(rng, depth - 1, steep))
    op = rng.choice(_STEEP_BINARY if steep else _SCALED_BINARY)
    return op(random_expression(rng, depth - 1, steep), random_expression(rng, depth - 1, steep))


def random_cubic(rng: random.Random):
    """Random cubic in u, v as (text, coefficient dict)."""
    coeffs = {(i, j): rng.uniform(-2, 2) for i in range(4) for j in range(4) if i + j <= 3}
    text = " + ".join(f"({c!r})*u^{i}*v^{j}" for (i, j), c in coeffs.items())
    return text, coeffs


@pytest.fixture
def rng():
    return random.Random(20240611)


def uv_expr(text):
    return parse(text, {"u", "v"})


# Random smooth curves, reparameterized to unit speed.
BOX = {"plane": (0.0, 1.0), "cylinder": (0.0, 1.0), "sphere": (0.0, 0.6),
       "catenoid": (0.0, 1.0), "helicoid": (0.0, 1.0)}


def random_unit_curve(rng: random.Random, host, center=None, size=None, nodes=129):
    from isocurve.curve import CurveOnSurface, reparameterize_by_arc_length
    c0, r = BOX.get(host.name, (0.0, 1.0)) if center is None else (center, size)
    a = [rng.uniform(-r, r) for _ in range(6)]
    w = [rng.uniform(0.5, 2.0) for _ in range(2)]
    u = f"{c0 + a[0]!r} + {a[1]!r}*t + {a[2]!r}*sin({w[0]!r}*t)"
    v = f"{a[3]!r} + {a[4]!r}*t + {a[5]!r}*cos({w[1]!r}*t)"
    base = CurveOnSurface.from_strings("rand", host, u, v, (-1.0, 1.0), param="t", unit_speed=False)
    return reparameterize_by_arc_length(base, nodes=nodes)


# Acceptance criteria report one line each at the end of the session.
ACCEPTANCE = {}


def record_criterion(number, passed, detail):
    ACCEPTANCE[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
