# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled eigenvalue kernel: largest eigenvalue of Xi diag(y^2) Xi^dagger.

Assembles each weighted Gram matrix in a stack buffer and calls LAPACK zheev
directly (eigenvalues only), avoiding the per-point array allocations of the
numpy fallback. The loop releases the GIL so batches can run on threads.
"""

import numpy as np

from scipy.linalg.cython_lapack cimport zheev

NAME = "native"

DEF NMAX = 16
DEF LWORK = 4 * NMAX + 64


def top_eigenvalues(xi, ysq):
    """Largest eigenvalue of Xi diag(ysq[p]) Xi^dagger for every row p."""
    cdef const double complex[:, ::1] xi_v = np.ascontiguousarray(xi, dtype=np.complex128)
    ysq2 = np.ascontiguousarray(np.atleast_2d(np.asarray(ysq, dtype=np.float64)))
    cdef const double[:, ::1] ysq_v = ysq2
    cdef int n = xi_v.shape[0]
    if xi_v.shape[1] != n:
        raise ValueError("xi must be square")
    if ysq_v.shape[1] != n:
        raise ValueError("ysq rows must have length n")
    if n > NMAX:
        raise ValueError("native kernel supports n <= %d" % NMAX)
    out = np.empty(ysq2.shape[0], dtype=np.float64)
    cdef double[::1] out_v = out
    cdef Py_ssize_t m = ysq_v.shape[0]

    cdef double complex a[NMAX * NMAX]
    cdef double complex work[LWORK]
    cdef double w[NMAX]
    cdef double rwork[3 * NMAX]
    cdef int lwork = LWORK
    cdef int info = 0
    cdef Py_ssize_t p
    cdef int i, j, k
    cdef double complex acc

    with nogil:
        for p in range(m):
            # column-major lower triangle of Xi diag(ysq[p]) Xi^dagger
            for j in range(n):
                for i in range(j, n):
                    acc = 0
                    for k in range(n):
                        acc = acc + xi_v[i, k] * ysq_v[p, k] * xi_v[j, k].conjugate()
                    a[j * n + i] = acc
            zheev("N", "L", &n, &a[0], &n, &w[0], &work[0], &lwork, &rwork[0], &info)
            if info != 0:
                break
            out_v[p] = w[n - 1]
    if info != 0:
        raise RuntimeError("zheev failed to converge (info=%d)" % info)
    return out
