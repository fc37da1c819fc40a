# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernel for dense linear generators."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from scipy.linalg.cython_blas cimport zgemv

cnp.import_array()


def rk4_evolve(cnp.ndarray[complex, ndim=2, mode="c"] generator,
               cnp.ndarray[complex, ndim=1] v0,
               double dt, Py_ssize_t nsteps, Py_ssize_t dim, double trace_tol):
    """Fixed-step RK4 for dv/dt = generator @ v.

    ``dim`` is the side of the unvectorized matrix; the trace is read from
    the column-stacked diagonal entries ``v[k * (dim + 1)]``. Stepping stops
    early once the trace drifts from its initial value by more than
    ``trace_tol``.

    Returns ``(v, steps_taken, max_trace_deviation)``.
    """
    cdef int n = <int>generator.shape[0]
    cdef int one = 1
    cdef char trans = b'T'
    cdef double complex c_one = 1.0
    cdef double complex c_zero = 0.0
    cdef double complex half = 0.5 * dt
    cdef double complex full = dt
    cdef double complex sixth = dt / 6.0
    cdef cnp.ndarray[complex, ndim=1, mode="c"] v = np.array(v0, dtype=complex, order="C")
    cdef cnp.ndarray[complex, ndim=1, mode="c"] k1 = np.empty(n, dtype=complex)
    cdef cnp.ndarray[complex, ndim=1, mode="c"] k2 = np.empty(n, dtype=complex)
    cdef cnp.ndarray[complex, ndim=1, mode="c"] k3 = np.empty(n, dtype=complex)
    cdef cnp.ndarray[complex, ndim=1, mode="c"] k4 = np.empty(n, dtype=complex)
    cdef cnp.ndarray[complex, ndim=1, mode="c"] tmp = np.empty(n, dtype=complex)
    cdef double complex* pl = <double complex*>generator.data
    cdef double complex* pv = <double complex*>v.data
    cdef double complex* p1 = <double complex*>k1.data
    cdef double complex* p2 = <double complex*>k2.data
    cdef double complex* p3 = <double complex*>k3.data
    cdef double complex* p4 = <double complex*>k4.data
    cdef double complex* pt = <double complex*>tmp.data
    cdef Py_ssize_t step, i
    cdef double complex tr0 = 0.0, tr
    cdef double dev, max_dev = 0.0

    if n != v.shape[0] or n != generator.shape[1] or dim * dim != n:
        raise ValueError("generator, state and dim are inconsistent")
    for i in range(dim):
        tr0 += pv[i * (dim + 1)]

    # row-major generator == column-major transpose, hence trans='T'
    for step in range(nsteps):
        zgemv(&trans, &n, &n, &c_one, pl, &n, pv, &one, &c_zero, p1, &one)
        for i in range(n):
            pt[i] = pv[i] + half * p1[i]
        zgemv(&trans, &n, &n, &c_one, pl, &n, pt, &one, &c_zero, p2, &one)
        for i in range(n):
            pt[i] = pv[i] + half * p2[i]
        zgemv(&trans, &n, &n, &c_one, pl, &n, pt, &one, &c_zero, p3, &one)
        for i in range(n):
            pt[i] = pv[i] + full * p3[i]
        zgemv(&trans, &n, &n, &c_one, pl, &n, pt, &one, &c_zero, p4, &one)
        for i in range(n):
            pv[i] = pv[i] + sixth * (p1[i] + 2.0 * p2[i] + 2.0 * p3[i] + p4[i])
        tr = 0.0
        for i in range(dim):
            tr += pv[i * (dim + 1)]
        dev = abs(tr - tr0)
        if dev != dev:
            return v, step + 1, float("inf")
        if dev > max_dev:
            max_dev = dev
        if max_dev > trace_tol:
            return v, step + 1, max_dev
    return v, nsteps, max_dev
