import math

import pytest
from hypothesis import given, settings, strategies as st

from isocurve.errors import DomainError, ExpressionSyntaxError, UnknownIdentifier
from isocurve.expr import Binary, Const, Unary, Var, eval_scalar, parse, to_text, tokenize


def ev(text, **env):
    return eval_scalar(parse(text), env)


@pytest.mark.parametrize("text, env, expected", [
    ("1 + 2*3", {}, 7.0),
    ("2^3^2", {}, 512.0),
    ("2**3", {}, 8.0),
    ("-u^2", {"u": 3.0}, -9.0),
    ("(-u)^2", {"u": 3.0}, 9.0),
    ("u - v - 1", {"u": 5.0, "v": 2.0}, 2.0),
    ("u / v / 2", {"u": 8.0, "v": 2.0}, 2.0),
    ("2^-1", {}, 0.5),
    ("sin(pi/2) + e", {}, 1.0 + math.e),
    ("sqrt(4) * log(e)", {}, 2.0),
    ("1.5e2 + .5", {}, 150.5),
])
def test_evaluation(text, env, expected):
    assert eval_scalar(parse(text), env) == pytest.approx(expected, rel=1e-15)


def test_syntax_error_position():
    with pytest.raises(ExpressionSyntaxError) as err:
        parse("u + * v")
    assert err.value.position == 4


@pytest.mark.parametrize("text, pos", [("", 0), ("(u", 2), ("u v", 2), ("sin(", 4), ("u $ v", 2)])
def test_syntax_errors(text, pos):
    with pytest.raises(ExpressionSyntaxError) as err:
        parse(text)
    assert err.value.position == pos


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as err:
        parse("u + w")
    assert err.value.name == "w" and err.value.position == 4
    with pytest.raises(UnknownIdentifier):
        parse("foo(u)")
    with pytest.raises(UnknownIdentifier):
        parse("s", {"u", "v"})


def test_exponent_must_be_constant():
    with pytest.raises(ExpressionSyntaxError):
        parse("u^v")
    assert ev("u^(1/2)", u=4.0) == 2.0


@pytest.mark.parametrize("text, env", [
    ("log(u)", {"u": 0.0}), ("sqrt(u)", {"u": -1.0}), ("1/u", {"u": 0.0}),
    ("u^0.5", {"u": -2.0}), ("u^-1", {"u": 0.0}), ("exp(u)", {"u": 1e4}),
])
def test_domain_errors(text, env):
    with pytest.raises(DomainError):
        ev(text, **env)


def test_tokenizer_maps_double_star():
    kinds = [t[1] for t in tokenize("u**2")]
    assert kinds == ["u", "^", "2", ""]


def test_free_variables():
    assert parse("u*sin(v) + pi").free == {"u", "v"}
    assert parse("2").free == frozenset()


# ---------------------------------------------------------------- print / parse round trip

names = st.sampled_from(["u", "v"])
consts = st.floats(min_value=0.0, max_value=1e6, allow_nan=False).map(Const)


def nodes():
    return st.recursive(
        st.one_of(names.map(Var), consts, st.just(Const(math.pi, "pi"))),
        lambda kids: st.one_of(
            st.builds(Unary, st.sampled_from(["neg", "sin", "exp", "sqrt"]), kids),
            st.builds(Binary, st.sampled_from(["add", "sub", "mul", "div"]), kids, kids),
            st.builds(Binary, st.just("pow"), kids,
                      st.one_of(consts, st.builds(Unary, st.just("neg"), consts))),
        ),
        max_leaves=12)


@given(nodes())
@settings(max_examples=300, deadline=None)
def test_print_parse_round_trip(node):
    text = to_text(node)
    assert parse(text, {"u", "v"}).root == node
