# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled jet kernels; same contract as ``_jetkernel_py``."""
from libc.math cimport sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, pow, fabs, isinf
from libc.stdlib cimport malloc, free

from .errors import DomainError

IMPLEMENTATION = "cython"

DEF SIZE = 10

cdef int NSLOTS[4]
NSLOTS[:] = [1, 3, 6, 10]

# (p, q, r) triples per order, flattened; filled at import from the Python tables
cdef int PT[4][3 * 64]
cdef int PTLEN[4]


def _init_tables():
    from ._jetkernel_py import PRODUCT
    cdef int n, i
    for n in range(4):
        PTLEN[n] = len(PRODUCT[n])
        for i in range(PTLEN[n]):
            PT[n][3 * i] = PRODUCT[n][i][0]
            PT[n][3 * i + 1] = PRODUCT[n][i][1]
            PT[n][3 * i + 2] = PRODUCT[n][i][2]


_init_tables()


cdef inline void c_mul(const double* a, const double* b, double* out, int order) noexcept nogil:
    cdef int i, p, q, r
    for i in range(SIZE):
        out[i] = 0.0
    for i in range(PTLEN[order]):
        p = PT[order][3 * i]
        q = PT[order][3 * i + 1]
        r = PT[order][3 * i + 2]
        out[r] += a[p] * b[q]


cdef inline void c_apply(const double* a, double f0, double f1, double f2, double f3,
                         double* out, int order) noexcept nogil:
    cdef double h[SIZE]
    cdef double h2[SIZE]
    cdef double h3[SIZE]
    cdef int k, n
    for k in range(SIZE):
        out[k] = 0.0
    out[0] = f0
    if order == 0:
        return
    n = NSLOTS[order]
    for k in range(SIZE):
        h[k] = a[k]
    h[0] = 0.0
    for k in range(1, n):
        out[k] = f1 * h[k]
    if order >= 2:
        c_mul(h, h, h2, order)
        for k in range(3, n):
            out[k] += f2 * h2[k]
        if order >= 3:
            c_mul(h2, h, h3, order)
            for k in range(6, n):
                out[k] += f3 * h3[k]


cdef inline double falling(double c, int k) noexcept nogil:
    cdef double out = 1.0
    cdef int i
    for i in range(k):
        out *= c - i
    return out


cdef int c_pow_coeffs(double x, double c, int order, double* f) except -1:
    cdef int k, n, e
    cdef double ff
    cdef double fact[4]
    fact[:] = [1.0, 1.0, 2.0, 6.0]
    if fabs(c) < 9007199254740992.0 and c == <double><long long>c:
        n = <int>c
        for k in range(4):
            ff = falling(n, k)
            if k > order or ff == 0.0:
                f[k] = 0.0
                continue
            e = n - k
            if x == 0.0 and e < 0:
                raise DomainError("zero raised to a negative power")
            f[k] = pow(x, <double>e)
            if isinf(f[k]):
                raise DomainError("overflow in pow")
            f[k] = ff * f[k] / fact[k]
        return 0
    if x <= 0.0:
        raise DomainError(f"non-integer power of non-positive base {x!r}")
    cdef double xc = exp(c * log(x))
    if isinf(xc):
        raise DomainError("overflow in pow")
    f[0] = xc
    f[1] = c * xc / x
    f[2] = falling(c, 2) * xc / (x * x) / 2.0
    f[3] = falling(c, 3) * xc / (x * x * x) / 6.0
    return 0


cdef int c_function_coeffs(int op, double x, int order, double* f) except -1:
    cdef double s, c, t, d1, e, r, sh, ch
    if op == 10:
        s = sin(x); c = cos(x)
        f[0] = s; f[1] = c; f[2] = -s / 2.0; f[3] = -c / 6.0
    elif op == 11:
        s = sin(x); c = cos(x)
        f[0] = c; f[1] = -s; f[2] = -c / 2.0; f[3] = s / 6.0
    elif op == 12:
        if cos(x) == 0.0:
            raise DomainError("tan at a pole")
        t = tan(x)
        d1 = 1.0 + t * t
        f[0] = t; f[1] = d1; f[2] = t * d1; f[3] = d1 * (2.0 + 6.0 * t * t) / 6.0
    elif op == 13 or op == 14:
        sh = sinh(x); ch = cosh(x)
        if isinf(ch):
            raise DomainError("overflow in hyperbolic function")
        if op == 13:
            f[0] = sh; f[1] = ch; f[2] = sh / 2.0; f[3] = ch / 6.0
        else:
            f[0] = ch; f[1] = sh; f[2] = ch / 2.0; f[3] = sh / 6.0
    elif op == 15:
        t = tanh(x)
        d1 = 1.0 - t * t
        f[0] = t; f[1] = d1; f[2] = -t * d1; f[3] = d1 * (6.0 * t * t - 2.0) / 6.0
    elif op == 16:
        e = exp(x)
        if isinf(e):
            raise DomainError("overflow in exp")
        f[0] = e; f[1] = e; f[2] = e / 2.0; f[3] = e / 6.0
    elif op == 17:
        if x <= 0.0:
            raise DomainError(f"log of non-positive value {x!r}")
        r = 1.0 / x
        f[0] = log(x); f[1] = r; f[2] = -r * r / 2.0; f[3] = r * r * r / 3.0
    elif op == 18:
        if x < 0.0:
            raise DomainError(f"sqrt of negative value {x!r}")
        if x == 0.0:
            if order > 0:
                raise DomainError("sqrt derivative is singular at 0")
            f[0] = 0.0; f[1] = 0.0; f[2] = 0.0; f[3] = 0.0
            return 0
        r = sqrt(x)
        f[0] = r; f[1] = 0.5 / r; f[2] = -0.125 / (r * x); f[3] = 0.0625 / (r * x * x)
    else:
        raise ValueError(f"unknown opcode {op}")
    return 0


cdef int c_recip_coeffs(double x, double* f) except -1:
    if x == 0.0:
        raise DomainError("division by zero")
    cdef double r = 1.0 / x
    f[0] = r; f[1] = -r * r; f[2] = r * r * r; f[3] = -r * r * r * r
    return 0


cdef void load(object seq, double* out):
    cdef int k
    for k in range(SIZE):
        out[k] = seq[k]


cdef list store(const double* a):
    return [a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]]


def mul(a, b, int order):
    cdef double x[SIZE]
    cdef double y[SIZE]
    cdef double out[SIZE]
    load(a, x)
    load(b, y)
    c_mul(x, y, out, order)
    return store(out)


def apply(a, double f0, double f1, double f2, double f3, int order):
    cdef double x[SIZE]
    cdef double out[SIZE]
    load(a, x)
    c_apply(x, f0, f1, f2, f3, out, order)
    return store(out)


def div(a, b, int order):
    cdef double x[SIZE]
    cdef double y[SIZE]
    cdef double r[SIZE]
    cdef double out[SIZE]
    cdef double f[4]
    load(a, x)
    load(b, y)
    c_recip_coeffs(y[0], f)
    c_apply(y, f[0], f[1], f[2], f[3], r, order)
    c_mul(x, r, out, order)
    return store(out)


def eval_tape(ops, args, seeds, int order):
    cdef Py_ssize_t n = len(ops)
    cdef Py_ssize_t nseeds = len(seeds)
    cdef Py_ssize_t i
    cdef int k, op, sp = 0
    cdef double f[4]
    cdef double tmp[SIZE]
    cdef double tmp2[SIZE]
    cdef double* stack = <double*>malloc((n + 1) * SIZE * sizeof(double))
    cdef double* seedbuf = <double*>malloc((nseeds + 1) * SIZE * sizeof(double))
    cdef double* top
    cdef double* below
    cdef double arg
    if stack == NULL or seedbuf == NULL:
        free(stack)
        free(seedbuf)
        raise MemoryError()
    try:
        for i in range(nseeds):
            load(seeds[i], seedbuf + i * SIZE)
        for i in range(n):
            op = ops[i]
            arg = args[i]
            if op == 0:
                top = stack + sp * SIZE
                for k in range(SIZE):
                    top[k] = 0.0
                top[0] = arg
                sp += 1
            elif op == 1:
                top = stack + sp * SIZE
                below = seedbuf + (<int>arg) * SIZE
                for k in range(SIZE):
                    top[k] = below[k]
                sp += 1
            elif op == 2 or op == 3 or op == 4 or op == 5:
                sp -= 1
                top = stack + sp * SIZE
                below = stack + (sp - 1) * SIZE
                if op == 2:
                    for k in range(SIZE):
                        below[k] += top[k]
                elif op == 3:
                    for k in range(SIZE):
                        below[k] -= top[k]
                elif op == 4:
                    c_mul(below, top, tmp, order)
                    for k in range(SIZE):
                        below[k] = tmp[k]
                else:
                    c_recip_coeffs(top[0], f)
                    c_apply(top, f[0], f[1], f[2], f[3], tmp2, order)
                    c_mul(below, tmp2, tmp, order)
                    for k in range(SIZE):
                        below[k] = tmp[k]
            elif op == 7:
                top = stack + (sp - 1) * SIZE
                for k in range(SIZE):
                    top[k] = -top[k]
            else:
                top = stack + (sp - 1) * SIZE
                if op == 6:
                    c_pow_coeffs(top[0], arg, order, f)
                else:
                    c_function_coeffs(op, top[0], order, f)
                c_apply(top, f[0], f[1], f[2], f[3], tmp, order)
                for k in range(SIZE):
                    top[k] = tmp[k]
        return store(stack + (sp - 1) * SIZE)
    finally:
        free(stack)
        free(seedbuf)
