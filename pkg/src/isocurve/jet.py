"""Truncated Taylor jets in one or two variables, up to third order.

The arithmetic kernels come from the compiled ``_jetkernel`` extension when it
is importable and from ``_jetkernel_py`` otherwise. Set the environment
variable ``ISOCURVE_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import math
import os
from typing import Mapping

from . import _jetkernel_py
from ._jetkernel_py import INDEX, NSLOTS, SIZE, SLOT

if os.environ.get("ISOCURVE_PURE_PYTHON", "") not in ("", "0"):
    kernel = _jetkernel_py
else:
    try:
        from . import _jetkernel as kernel
    except ImportError:  # extension not built
        kernel = _jetkernel_py

_FACT = (1.0, 1.0, 2.0, 6.0)


def use_kernel(name):
    """Switch the active kernel ("cython" or "python"); returns the previous one."""
    global kernel
    previous = kernel.IMPLEMENTATION
    if name == "python":
        kernel = _jetkernel_py
    elif name == "cython":
        from . import _jetkernel
        kernel = _jetkernel
    else:
        raise ValueError(name)
    return previous


class Jet:
    """Immutable truncated Taylor expansion.

    ``coeffs`` holds Taylor coefficients (not derivatives) in the slot order of
    :data:`INDEX`; use :meth:`partial` for derivative values.
    """

    __slots__ = ("coeffs", "nvars", "order")

    def __init__(self, coeffs, nvars=2, order=3):
        if nvars not in (1, 2):
            raise ValueError("nvars must be 1 or 2")
        if not 0 <= order <= 3:
            raise ValueError("order must be between 0 and 3")
        c = [float(x) for x in coeffs] + [0.0] * (SIZE - len(coeffs))
        for k in range(SIZE):
            i, j = INDEX[k]
            if k >= NSLOTS[order] or (nvars == 1 and j > 0):
                c[k] = 0.0
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    @classmethod
    def _raw(cls, coeffs, nvars, order):
        self = object.__new__(cls)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "order", order)
        return self

    @classmethod
    def constant(cls, value, nvars=2, order=3):
        return cls._raw((float(value),) + (0.0,) * (SIZE - 1), nvars, order)

    @classmethod
    def variable(cls, value, index=0, nvars=2, order=3):
        """Seed jet for the ``index``-th independent variable at ``value``."""
        if index >= nvars:
            raise ValueError("variable index out of range")
        c = [0.0] * SIZE
        c[0] = float(value)
        if order >= 1:
            c[1 + index] = 1.0
        return cls._raw(c, nvars, order)

    @classmethod
    def from_derivatives(cls, derivs, nvars=1, order=3):
        """Univariate jet from ``[f, f', f'', f''']``."""
        c = [0.0] * SIZE
        for k, d in enumerate(derivs[: order + 1]):
            c[SLOT[(k, 0)]] = d / _FACT[k]
        return cls._raw(c, nvars, order)

    # -- accessors
    @property
    def value(self) -> float:
        return self.coeffs[0]

    def partial(self, i, j=0) -> float:
        """Partial derivative d^(i+j)/du^i dv^j at the expansion point."""
        if i + j > self.order:
            raise ValueError(f"order {i + j} exceeds jet order {self.order}")
        return self.coeffs[SLOT[(i, j)]] * _FACT[i] * _FACT[j]

    def derivatives(self):
        """Univariate derivatives ``[f, f', ..., f^(order)]``."""
        return [self.partial(k) for k in range(self.order + 1)]

    def derivative(self):
        """Jet of d/dx of a univariate jet, one order lower."""
        if self.nvars != 1:
            raise ValueError("derivative() needs a one-variable jet")
        c = [0.0] * SIZE
        for k in range(self.order):
            c[SLOT[(k, 0)]] = (k + 1) * self.coeffs[SLOT[(k + 1, 0)]]
        return Jet._raw(c, 1, max(self.order - 1, 0))

    def integral(self, value=0.0):
        """Antiderivative of a univariate jet with the given constant, one order higher."""
        if self.nvars != 1 or self.order >= 3:
            raise ValueError("integral() needs a one-variable jet of order < 3")
        c = [0.0] * SIZE
        c[0] = float(value)
        for k in range(self.order + 1):
            c[SLOT[(k + 1, 0)]] = self.coeffs[SLOT[(k, 0)]] / (k + 1)
        return Jet._raw(c, 1, self.order + 1)

    def truncate(self, order):
        return Jet(self.coeffs, self.nvars, min(order, self.order))

    def __repr__(self):
        n = NSLOTS[self.order]
        body = ", ".join(f"{INDEX[k]}: {self.coeffs[k]!r}" for k in range(n)
                         if self.nvars == 2 or INDEX[k][1] == 0)
        return f"Jet({{{body}}}, nvars={self.nvars}, order={self.order})"

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.coeffs, self.nvars, self.order) == (other.coeffs, other.nvars, other.order)

    def __hash__(self):
        return hash((self.coeffs, self.nvars, self.order))

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets of different arity")
            return other, min(self.order, other.order)
        return Jet.constant(other, self.nvars, self.order), self.order

    def __add__(self, other):
        other, order = self._coerce(other)
        return Jet._raw([a + b for a, b in zip(self.coeffs, other.coeffs)], self.nvars, order).truncate(order)

    __radd__ = __add__

    def __sub__(self, other):
        other, order = self._coerce(other)
        return Jet._raw([a - b for a, b in zip(self.coeffs, other.coeffs)], self.nvars, order).truncate(order)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet._raw([-a for a in self.coeffs], self.nvars, self.order)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet._raw([a * other for a in self.coeffs], self.nvars, self.order)
        other, order = self._coerce(other)
        return Jet._raw(kernel.mul(self.coeffs, other.coeffs, order), self.nvars, order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other, order = self._coerce(other)
        return Jet._raw(kernel.div(self.coeffs, other.coeffs, order), self.nvars, order)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.nvars, self.order) / self

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            raise TypeError("jet exponents must be constants")
        f = _jetkernel_py.pow_coeffs(self.value, float(exponent), self.order)
        return self._apply(f)

    def _apply(self, f):
        return Jet._raw(kernel.apply(self.coeffs, *f, self.order), self.nvars, self.order)

    def compose(self, f0, f1=0.0, f2=0.0, f3=0.0):
        """g(self) where (f0, f1, f2, f3) are g's Taylor coefficients at self.value."""
        return self._apply((f0, f1, f2, f3))


def _unary(opcode):
    def fn(x: Jet) -> Jet:
        return x._apply(_jetkernel_py.function_coeffs(opcode, x.value, x.order))
    return fn


sin = _unary(_jetkernel_py.OP_SIN)
cos = _unary(_jetkernel_py.OP_COS)
tan = _unary(_jetkernel_py.OP_TAN)
sinh = _unary(_jetkernel_py.OP_SINH)
cosh = _unary(_jetkernel_py.OP_COSH)
tanh = _unary(_jetkernel_py.OP_TANH)
exp = _unary(_jetkernel_py.OP_EXP)
log = _unary(_jetkernel_py.OP_LOG)
sqrt = _unary(_jetkernel_py.OP_SQRT)


def eval_jet(ast, bindings: Mapping[str, Jet]) -> Jet:
    """Truncated Taylor expansion of ``ast`` at the point described by ``bindings``.

    All binding jets must share arity and order. Variables that are declared but
    absent from the expression need no binding.
    """
    ops, args, names = ast.tape()
    jets = list(bindings.values())
    if not jets:
        raise ValueError("eval_jet needs at least one binding to fix arity and order")
    nvars, order = jets[0].nvars, jets[0].order
    for j in jets:
        if j.nvars != nvars or j.order != order:
            raise ValueError("binding jets must share arity and order")
    try:
        seeds = [bindings[n].coeffs for n in names]
    except KeyError as exc:
        raise KeyError(f"no binding for {exc.args[0]!r}") from None
    return Jet._raw(kernel.eval_tape(ops, args, seeds, order), nvars, order)


def eval_jet_tree(ast, bindings: Mapping[str, Jet]) -> Jet:
    """Reference tree-walking evaluator built on :class:`Jet` operators."""
    from .expr import Binary, Const, Unary, Var, _eval

    first = next(iter(bindings.values()))

    def walk(node):
        if isinstance(node, Const):
            return Jet.constant(node.value, first.nvars, first.order)
        if isinstance(node, Var):
            return bindings[node.name]
        if isinstance(node, Unary):
            x = walk(node.arg)
            return -x if node.op == "neg" else globals()[node.op](x)
        if node.op == "pow":
            return walk(node.left) ** _eval(node.right, {})
        a, b = walk(node.left), walk(node.right)
        return {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}[node.op](b)

    return walk(ast.root)


def isclose(a: Jet, b: Jet, rel=1e-12, abs_=1e-12) -> bool:
    return all(math.isclose(x, y, rel_tol=rel, abs_tol=abs_) for x, y in zip(a.coeffs, b.coeffs))
