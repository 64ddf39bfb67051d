"""Closed-form scalar expressions: parsing, printing and evaluation.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom (('^' | '**') unary)?          # right associative
    atom    := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

``NAME`` is a declared variable, one of the constants ``pi`` / ``e``, or
(followed by a parenthesis) one of the functions in :data:`FUNCTIONS`.
Exponents must be free of variables.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from . import _jetkernel_py as _k
from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifier

VARIABLES = frozenset({"u", "v", "s", "t"})
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")

_FUNC_OPCODE = {
    "sin": _k.OP_SIN, "cos": _k.OP_COS, "tan": _k.OP_TAN,
    "sinh": _k.OP_SINH, "cosh": _k.OP_COSH, "tanh": _k.OP_TANH,
    "exp": _k.OP_EXP, "log": _k.OP_LOG, "sqrt": _k.OP_SQRT,
}
_BIN_OPCODE = {"add": _k.OP_ADD, "sub": _k.OP_SUB, "mul": _k.OP_MUL, "div": _k.OP_DIV}


# ---------------------------------------------------------------- AST nodes

@dataclass(frozen=True)
class Const:
    value: float
    name: str | None = None


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a FUNCTIONS entry
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Const, Var, Unary, Binary]


def free_variables(node: Node) -> frozenset:
    if isinstance(node, Var):
        return frozenset({node.name})
    if isinstance(node, Const):
        return frozenset()
    if isinstance(node, Unary):
        return free_variables(node.arg)
    return free_variables(node.left) | free_variables(node.right)


@dataclass(frozen=True)
class ExpressionAst:
    """A parsed expression together with the variable set it was declared over."""

    root: Node
    variables: frozenset = VARIABLES
    _tape: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        unknown = free_variables(self.root) - self.variables
        if unknown:
            raise UnknownIdentifier(sorted(unknown)[0])
        object.__setattr__(self, "variables", frozenset(self.variables))

    def __str__(self):
        return to_text(self.root)

    @property
    def free(self) -> frozenset:
        return free_variables(self.root)

    def tape(self):
        """Postfix program ``(ops, args, slot_names)`` for the jet kernels."""
        if self._tape is None:
            names = tuple(sorted(self.free))
            ops, args = [], []
            _emit(self.root, {n: i for i, n in enumerate(names)}, ops, args)
            object.__setattr__(self, "_tape", (tuple(ops), tuple(args), names))
        return self._tape


# ---------------------------------------------------------------- tokenizer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
""", re.VERBOSE)


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos, text=text)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if value == "**":
                value = "^"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.variables = variables
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok, expected):
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ExpressionSyntaxError(f"unexpected {what}", tok[2], expected, self.text)

    def expect(self, value):
        tok = self.advance()
        if tok[1] != value or tok[0] == "end":
            self.fail(tok, repr(value))
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail(tok, "operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = "add" if self.advance()[1] == "+" else "sub"
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = "mul" if self.advance()[1] == "*" else "div"
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.advance()
            start = self.peek()[2]
            exponent = self.unary()
            if free_variables(exponent):
                raise ExpressionSyntaxError(
                    "exponent must be a constant expression", start, "constant", self.text)
            return Binary("pow", base, exponent)
        return base

    def atom(self):
        tok = self.advance()
        kind, value, pos = tok
        if kind == "num":
            return Const(float(value))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if value not in FUNCTIONS:
                    raise UnknownIdentifier(value, pos)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Unary(value, arg)
            if value in self.variables:
                return Var(value)
            if value in CONSTANTS:
                return Const(CONSTANTS[value], value)
            raise UnknownIdentifier(value, pos)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.fail(tok, "number, name or '('")


def parse(text: str, variables=VARIABLES) -> ExpressionAst:
    """Parse ``text`` into an :class:`ExpressionAst` over ``variables``."""
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0, "expression", text)
    variables = frozenset(variables)
    return ExpressionAst(_Parser(text, variables).parse(), variables)


# ---------------------------------------------------------------- printing

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOL = {"add": " + ", "sub": " - ", "mul": "*", "div": "/", "pow": "^"}


def _prec(node):
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return 3
    return 5


def _wrap(node, min_prec):
    text = to_text(node)
    return text if _prec(node) >= min_prec else f"({text})"


def to_text(node: Node) -> str:
    """Render ``node`` so that :func:`parse` rebuilds the same tree."""
    if isinstance(node, Const):
        if node.name is not None:
            return node.name
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return "-" + _wrap(node.arg, 3)
        return f"{node.op}({to_text(node.arg)})"
    p = _PREC[node.op]
    if node.op == "pow":
        return _wrap(node.left, 5) + "^" + _wrap(node.right, 3)
    return _wrap(node.left, p) + _SYMBOL[node.op] + _wrap(node.right, p + 1)


# ---------------------------------------------------------------- scalar evaluation

def _scalar_pow(x, c):
    if math.isfinite(c) and c == int(c):
        if x == 0.0 and c < 0:
            raise DomainError("zero raised to a negative power")
        try:
            return x ** int(c)
        except OverflowError:
            raise DomainError("overflow in pow") from None
    if x <= 0.0:
        raise DomainError(f"non-integer power of non-positive base {x!r}")
    try:
        return math.exp(c * math.log(x))
    except OverflowError:
        raise DomainError("overflow in pow") from None


def _scalar_func(name, x):
    if name == "log" and x <= 0.0:
        raise DomainError(f"log of non-positive value {x!r}")
    if name == "sqrt" and x < 0.0:
        raise DomainError(f"sqrt of negative value {x!r}")
    if name == "tan" and math.cos(x) == 0.0:
        raise DomainError("tan at a pole")
    try:
        return getattr(math, name)(x)
    except OverflowError:
        raise DomainError(f"overflow in {name}") from None


def _eval(node, env):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        x = _eval(node.arg, env)
        return -x if node.op == "neg" else _scalar_func(node.op, x)
    a = _eval(node.left, env)
    b = _eval(node.right, env)
    if node.op == "add":
        return a + b
    if node.op == "sub":
        return a - b
    if node.op == "mul":
        return a * b
    if node.op == "div":
        if b == 0.0:
            raise DomainError("division by zero")
        return a / b
    return _scalar_pow(a, b)


def eval_scalar(ast: ExpressionAst, bindings: Mapping[str, float]) -> float:
    missing = ast.free - set(bindings)
    if missing:
        raise KeyError(f"no binding for {sorted(missing)}")
    return float(_eval(ast.root, {k: float(v) for k, v in bindings.items()}))


# ---------------------------------------------------------------- tape compilation

def _emit(node, slots, ops, args):
    if isinstance(node, Const):
        ops.append(_k.OP_CONST)
        args.append(float(node.value))
    elif isinstance(node, Var):
        ops.append(_k.OP_VAR)
        args.append(float(slots[node.name]))
    elif isinstance(node, Unary):
        _emit(node.arg, slots, ops, args)
        ops.append(_k.OP_NEG if node.op == "neg" else _FUNC_OPCODE[node.op])
        args.append(0.0)
    elif node.op == "pow":
        _emit(node.left, slots, ops, args)
        ops.append(_k.OP_POW)
        args.append(_eval(node.right, {}))
    else:
        _emit(node.left, slots, ops, args)
        _emit(node.right, slots, ops, args)
        ops.append(_BIN_OPCODE[node.op])
        args.append(0.0)
