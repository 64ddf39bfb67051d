"""Pure-Python jet kernels.

Jets are stored as 10 truncated Taylor coefficients of a function of (u, v)
in graded order::

    (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) (3,0) (2,1) (1,2) (0,3)

Slot ``k`` holds ``d^(i+j) f / du^i dv^j / (i! j!)``. A jet of order ``n``
only uses the first ``NSLOTS[n]`` slots; the rest stay zero. One-variable
jets use the ``(k, 0)`` slots.

The compiled module ``_jetkernel`` implements the same four entry points
(``mul``, ``div``, ``apply``, ``eval_tape``) and must agree with this one to
the last bit on every tape the parser can produce.
"""
import math

from .errors import DomainError

IMPLEMENTATION = "python"

INDEX = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3))
SLOT = {ij: k for k, ij in enumerate(INDEX)}
NSLOTS = (1, 3, 6, 10)
SIZE = 10

# tape opcodes; mirrored in _jetkernel.pyx
OP_CONST, OP_VAR, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW, OP_NEG = range(8)
OP_SIN, OP_COS, OP_TAN, OP_SINH, OP_COSH, OP_TANH, OP_EXP, OP_LOG, OP_SQRT = range(10, 19)


def _product_table(order):
    table = []
    for p in range(NSLOTS[order]):
        ip, jp = INDEX[p]
        for q in range(NSLOTS[order]):
            iq, jq = INDEX[q]
            if ip + jp + iq + jq <= order:
                table.append((p, q, SLOT[(ip + iq, jp + jq)]))
    return tuple(table)


PRODUCT = tuple(_product_table(n) for n in range(4))


def mul(a, b, order):
    out = [0.0] * SIZE
    for p, q, r in PRODUCT[order]:
        out[r] += a[p] * b[q]
    return out


def apply(a, f0, f1, f2, f3, order):
    """Compose a scalar function with Taylor coefficients f0..f3 at a[0] onto jet a."""
    out = [0.0] * SIZE
    out[0] = f0
    if order == 0:
        return out
    h = list(a)
    h[0] = 0.0
    n = NSLOTS[order]
    for k in range(1, n):
        out[k] = f1 * h[k]
    if order >= 2:
        h2 = mul(h, h, order)
        for k in range(3, n):
            out[k] += f2 * h2[k]
        if order >= 3:
            h3 = mul(h2, h, order)
            for k in range(6, n):
                out[k] += f3 * h3[k]
    return out


def reciprocal_coeffs(x):
    if x == 0.0:
        raise DomainError("division by zero")
    r = 1.0 / x
    return r, -r * r, r * r * r, -r * r * r * r


def div(a, b, order):
    return mul(a, apply(b, *reciprocal_coeffs(b[0]), order), order)


def _falling(c, k):
    out = 1.0
    for i in range(k):
        out *= c - i
    return out


def pow_coeffs(x, c, order):
    """Taylor coefficients of x**c for a constant exponent c."""
    if math.isfinite(c) and c == int(c) and abs(c) < 2.0 ** 53:
        n = int(c)
        coeffs = []
        for k, fact in enumerate((1.0, 1.0, 2.0, 6.0)):
            ff = _falling(n, k)
            if k > order or ff == 0.0:
                coeffs.append(0.0)
                continue
            e = n - k
            if x == 0.0 and e < 0:
                raise DomainError("zero raised to a negative power")
            try:
                coeffs.append(ff * x ** e / fact)
            except OverflowError:
                raise DomainError("overflow in pow") from None
        return tuple(coeffs)
    if x <= 0.0:
        raise DomainError(f"non-integer power of non-positive base {x!r}")
    try:
        xc = math.exp(c * math.log(x))
    except OverflowError:
        raise DomainError("overflow in pow") from None
    return (xc,
            c * xc / x,
            _falling(c, 2) * xc / (x * x) / 2.0,
            _falling(c, 3) * xc / (x * x * x) / 6.0)


def function_coeffs(op, x, order):
    """Taylor coefficients (f, f', f''/2, f'''/6) of an elementary function at x."""
    if op == OP_SIN:
        s, c = math.sin(x), math.cos(x)
        return s, c, -s / 2.0, -c / 6.0
    if op == OP_COS:
        s, c = math.sin(x), math.cos(x)
        return c, -s, -c / 2.0, s / 6.0
    if op == OP_TAN:
        if math.cos(x) == 0.0:
            raise DomainError("tan at a pole")
        t = math.tan(x)
        d1 = 1.0 + t * t
        return t, d1, t * d1, d1 * (2.0 + 6.0 * t * t) / 6.0
    if op == OP_SINH or op == OP_COSH:
        try:
            sh, ch = math.sinh(x), math.cosh(x)
        except OverflowError:
            raise DomainError("overflow in hyperbolic function") from None
        if op == OP_SINH:
            return sh, ch, sh / 2.0, ch / 6.0
        return ch, sh, ch / 2.0, sh / 6.0
    if op == OP_TANH:
        t = math.tanh(x)
        d1 = 1.0 - t * t
        return t, d1, -t * d1, d1 * (6.0 * t * t - 2.0) / 6.0
    if op == OP_EXP:
        try:
            e = math.exp(x)
        except OverflowError:
            raise DomainError("overflow in exp") from None
        return e, e, e / 2.0, e / 6.0
    if op == OP_LOG:
        if x <= 0.0:
            raise DomainError(f"log of non-positive value {x!r}")
        r = 1.0 / x
        return math.log(x), r, -r * r / 2.0, r * r * r / 3.0
    if op == OP_SQRT:
        if x < 0.0:
            raise DomainError(f"sqrt of negative value {x!r}")
        if x == 0.0:
            if order > 0:
                raise DomainError("sqrt derivative is singular at 0")
            return 0.0, 0.0, 0.0, 0.0
        r = math.sqrt(x)
        return r, 0.5 / r, -0.125 / (r * x), 0.0625 / (r * x * x)
    raise ValueError(f"unknown opcode {op}")


def eval_tape(ops, args, seeds, order):
    """Run a postfix tape; ``seeds`` holds one jet (length-10 list) per variable slot."""
    stack = []
    push = stack.append
    pop = stack.pop
    for op, arg in zip(ops, args):
        if op == OP_CONST:
            j = [0.0] * SIZE
            j[0] = arg
            push(j)
        elif op == OP_VAR:
            push(list(seeds[int(arg)]))
        elif op == OP_ADD:
            b = pop()
            a = stack[-1]
            for k in range(SIZE):
                a[k] += b[k]
        elif op == OP_SUB:
            b = pop()
            a = stack[-1]
            for k in range(SIZE):
                a[k] -= b[k]
        elif op == OP_MUL:
            b = pop()
            push(mul(pop(), b, order))
        elif op == OP_DIV:
            b = pop()
            push(div(pop(), b, order))
        elif op == OP_NEG:
            a = stack[-1]
            for k in range(SIZE):
                a[k] = -a[k]
        elif op == OP_POW:
            a = pop()
            push(apply(a, *pow_coeffs(a[0], arg, order), order))
        else:
            a = pop()
            push(apply(a, *function_coeffs(op, a[0], order), order))
    return stack.pop()
