# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backend for the hot kernels.

Mirrors rnkmeans.kernels._py operation for operation; keep the two in
sync.  Built with -ffp-contract=off so the rotation arithmetic rounds
exactly like the numpy fallback.
"""

from libc.math cimport sqrt, fabs, copysign

import numpy as np

from rnkmeans.errors import JacobiConvergenceError


def pairwise_distances(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    out_arr = np.zeros((n, n))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                for k in range(d):
                    diff = x[i, k] - x[j, k]
                    acc += diff * diff
                acc = sqrt(acc)
                out[i, j] = acc
                out[j, i] = acc
    return out_arr


def cross_distances(double[:, ::1] x, double[:, ::1] c):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t m = c.shape[0]
    out_arr = np.empty((n, m))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    with nogil:
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(d):
                    diff = x[i, k] - c[j, k]
                    acc += diff * diff
                out[i, j] = sqrt(acc)
    return out_arr


cdef double _off_norm(double[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j] * a[i, j]
    return sqrt(acc)


cdef void _sweep(double[:, ::1] a, double[:, ::1] v, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t p, q, i
    cdef double apq, app, aqq, tau, t, c, s, aip, aiq, vip, viq
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            if apq == 0.0:
                continue
            app = a[p, p]
            aqq = a[q, q]
            tau = (aqq - app) / (2.0 * apq)
            if fabs(tau) < 1e150:
                t = copysign(1.0, tau) / (fabs(tau) + sqrt(1.0 + tau * tau))
            else:
                # tau^2 would overflow; the small root tends to 1/(2 tau)
                t = 0.5 / tau
            c = 1.0 / sqrt(1.0 + t * t)
            s = t * c
            for i in range(n):
                aip = a[i, p]
                aiq = a[i, q]
                a[i, p] = c * aip - s * aiq
                a[i, q] = s * aip + c * aiq
            for i in range(n):
                a[p, i] = a[i, p]
                a[q, i] = a[i, q]
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0
            for i in range(n):
                vip = v[i, p]
                viq = v[i, q]
                v[i, p] = c * vip - s * viq
                v[i, q] = s * vip + c * viq


def jacobi_eigh(double[:, ::1] a_in, double rel_tol=1e-10, int max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) in diagonal order, neither sorted
    nor sign-fixed; callers normalize.  Converges when the off-diagonal
    Frobenius norm falls below rel_tol * ||A||_F (computed on entry);
    raises JacobiConvergenceError after max_sweeps sweeps.
    """
    cdef Py_ssize_t n = a_in.shape[0]
    a_arr = np.array(a_in, dtype=np.float64, copy=True)
    v_arr = np.eye(n)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef double norm_sq = 0.0
    cdef double thresh, off
    cdef Py_ssize_t i, j
    cdef int sweep
    cdef bint converged = 0
    with nogil:
        for i in range(n):
            for j in range(n):
                norm_sq += a[i, j] * a[i, j]
    thresh = rel_tol * sqrt(norm_sq)
    for sweep in range(max_sweeps):
        with nogil:
            off = _off_norm(a, n)
        if off <= thresh:
            converged = 1
            break
        with nogil:
            _sweep(a, v, n)
    if not converged:
        with nogil:
            off = _off_norm(a, n)
        if off > thresh:
            raise JacobiConvergenceError(off, max_sweeps)
    return np.diagonal(a_arr).copy(), v_arr
