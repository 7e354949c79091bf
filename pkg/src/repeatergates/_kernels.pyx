# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid sweep for max-of-affine objectives."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _objective(double[:, ::1] coeffs, long[::1] expr_id, int n_expr,
                              double* x, int nvars, double* scratch) noexcept nogil:
    cdef Py_ssize_t p, k
    cdef double v, best
    for k in range(n_expr):
        scratch[k] = -1e300
    for p in range(coeffs.shape[0]):
        v = coeffs[p, 0]
        for k in range(nvars):
            v += coeffs[p, k + 1] * x[k]
        if v > scratch[expr_id[p]]:
            scratch[expr_id[p]] = v
    best = scratch[0]
    for k in range(1, n_expr):
        if scratch[k] < best:
            best = scratch[k]
    return best


def grid_minimize(double[:, ::1] coeffs, long[::1] expr_id, int n_expr, int q, int nvars):
    """Minimise over 0 < i1 < ... < in < q of the objective at (i/q).

    Returns (value, index tuple); ties keep the lexicographically first point.
    """
    if nvars < 1 or nvars > 3:
        raise ValueError("compiled sweep supports 1 to 3 variables")
    cdef double x[3]
    cdef double scratch[64]
    if n_expr > 64:
        raise ValueError("too many alternative expressions")
    cdef int i, j, k
    cdef int bi = -1, bj = -1, bk = -1
    cdef double best = 1e300, v
    cdef double inv = 1.0 / q
    with nogil:
        if nvars == 1:
            for i in range(1, q):
                x[0] = i * inv
                v = _objective(coeffs, expr_id, n_expr, x, 1, scratch)
                if v < best:
                    best = v; bi = i
        elif nvars == 2:
            for i in range(1, q):
                x[0] = i * inv
                for j in range(i + 1, q):
                    x[1] = j * inv
                    v = _objective(coeffs, expr_id, n_expr, x, 2, scratch)
                    if v < best:
                        best = v; bi = i; bj = j
        else:
            for i in range(1, q):
                x[0] = i * inv
                for j in range(i + 1, q):
                    x[1] = j * inv
                    for k in range(j + 1, q):
                        x[2] = k * inv
                        v = _objective(coeffs, expr_id, n_expr, x, 3, scratch)
                        if v < best:
                            best = v; bi = i; bj = j; bk = k
    idx = (bi, bj, bk)[:nvars]
    return best, idx
