# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementation of the hot kernel.

Semantics are defined by the numpy twin in _numpy.py; both must return
identical results up to floating-point rounding.  Matrices stay small
(responses of a handful, predictors of a few hundred), so everything is
written as straight loops over C-contiguous buffers.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, isfinite, log, sqrt

cnp.import_array()

STATUS_OK = 0
STATUS_NOT_SPD = 1
STATUS_SINGULAR_GRADIENT = 2

cdef double _PIVOT_RTOL = 1e-12
cdef double _UL_FLOOR = 1e-300
cdef double _UL_SINGULAR = 1e-12


cdef int _cholesky(double[:, ::1] a, double[:, ::1] chol, int q) noexcept nogil:
    """Lower Cholesky factor with the shared pivot rule; 0 on success."""
    cdef int i, j, k
    cdef double acc, max_diag, tol
    max_diag = 0.0
    for i in range(q):
        if a[i, i] > max_diag:
            max_diag = a[i, i]
    if max_diag <= 0.0:
        return 1
    tol = _PIVOT_RTOL * q * max_diag
    for i in range(q):
        for j in range(i + 1):
            acc = a[i, j]
            for k in range(j):
                acc -= chol[i, k] * chol[j, k]
            if i == j:
                if acc <= tol or not isfinite(acc):
                    return 1
                chol[i, i] = sqrt(acc)
            else:
                chol[i, j] = acc / chol[j, j]
    return 0


def smooth_eval(double[:, ::1] oyy, double[:, ::1] oyx,
                double[:, ::1] syy, double[:, ::1] syx, double[:, ::1] sxx,
                double[:, ::1] structure, double eta, double beta):
    """Smooth objective value and gradients; see the numpy twin."""
    cdef int q = oyy.shape[0]
    cdef int p = oyx.shape[1]
    cdef int i, j, k, status
    cdef double logdet, acc, u_l, value, coeff, wik

    grad_yy_arr = np.zeros((q, q))
    grad_yx_arr = np.zeros((q, p))
    cdef double[:, ::1] grad_yy = grad_yy_arr
    cdef double[:, ::1] grad_yx = grad_yx_arr

    chol_arr = np.zeros((q, q))
    cdef double[:, ::1] chol = chol_arr
    if _cholesky(oyy, chol, q) != 0:
        return STATUS_NOT_SPD, float("inf"), grad_yy_arr, grad_yx_arr, float("nan")

    logdet = 0.0
    for i in range(q):
        logdet += 2.0 * log(chol[i, i])

    # Invert the factor column by column, then assemble oinv = linv^t linv.
    linv_arr = np.zeros((q, q))
    cdef double[:, ::1] linv = linv_arr
    for j in range(q):
        linv[j, j] = 1.0 / chol[j, j]
        for i in range(j + 1, q):
            acc = 0.0
            for k in range(j, i):
                acc -= chol[i, k] * linv[k, j]
            linv[i, j] = acc / chol[i, i]
    oinv_arr = np.zeros((q, q))
    cdef double[:, ::1] oinv = oinv_arr
    for i in range(q):
        for j in range(q):
            acc = 0.0
            for k in range(i if i > j else j, q):
                acc += linv[k, i] * linv[k, j]
            oinv[i, j] = acc

    w_arr = np.zeros((q, p))
    g_arr = np.zeros((q, p))
    t_arr = np.zeros((q, p))
    cdef double[:, ::1] w = w_arr
    cdef double[:, ::1] g = g_arr
    cdef double[:, ::1] t = t_arr

    with nogil:
        for i in range(q):
            for k in range(q):
                acc = oinv[i, k]
                for j in range(p):
                    w[i, j] += acc * oyx[k, j]
        for i in range(q):
            for k in range(p):
                wik = w[i, k]
                if wik != 0.0:
                    for j in range(p):
                        g[i, j] += wik * sxx[k, j]
                        t[i, j] += wik * structure[k, j]

    u_l = 0.0
    value = -logdet
    for i in range(q):
        for j in range(q):
            value += syy[i, j] * oyy[i, j]
    for i in range(q):
        for j in range(p):
            u_l += oyx[i, j] * t[i, j]
            value += 2.0 * syx[i, j] * oyx[i, j] + oyx[i, j] * g[i, j]

    status = STATUS_OK
    coeff = 0.0
    if eta != 0.0:
        value += eta * ((u_l if u_l > 0.0 else 0.0) ** beta)
        if beta == 1.0:
            coeff = eta
        elif beta > 1.0:
            if u_l > 0.0:
                coeff = eta * beta * exp((beta - 1.0) * log(u_l if u_l > _UL_FLOOR else _UL_FLOOR))
        else:
            if u_l < _UL_SINGULAR:
                status = STATUS_SINGULAR_GRADIENT
            else:
                coeff = eta * beta * exp((beta - 1.0) * log(u_l))
    if status != STATUS_OK:
        return status, value, grad_yy_arr, grad_yx_arr, u_l

    # inner = g + coeff * t reused by both gradients; fold into g in place.
    if coeff != 0.0:
        for i in range(q):
            for j in range(p):
                g[i, j] += coeff * t[i, j]

    with nogil:
        for i in range(q):
            for j in range(q):
                acc = 0.0
                for k in range(p):
                    acc += g[i, k] * w[j, k]
                grad_yy[i, j] = acc
        # grad_yy currently holds inner @ w^t; fold in the remaining terms
        # and symmetrize in one triangular pass (syy and oinv are symmetric).
        for i in range(q):
            for j in range(i, q):
                acc = 0.5 * (grad_yy[i, j] + grad_yy[j, i])
                acc = syy[i, j] - oinv[i, j] - acc
                grad_yy[i, j] = acc
                grad_yy[j, i] = acc
        for i in range(q):
            for j in range(p):
                grad_yx[i, j] = 2.0 * (syx[i, j] + g[i, j])

    return STATUS_OK, value, grad_yy_arr, grad_yx_arr, u_l
