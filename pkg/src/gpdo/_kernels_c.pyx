# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled displacement-operator kernels; same contract as ``_kernels_py``.

The radial Laguerre recurrence is run per radius without materialising the
full (R, N+1, N+1) table, and the accumulation is fused into the recurrence.
All loops release the GIL so callers may run several lambda nodes in threads.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, lgamma

cnp.import_array()


cdef inline void _radial_column(double rho, int d, int N, double* q) noexcept nogil:
    """q[n] for n = 0..N-d at fixed d."""
    cdef double x = rho * rho
    cdef double q0, dd = d
    cdef int n, top = N - d
    if rho == 0.0:
        q0 = 1.0 if d == 0 else 0.0
    else:
        q0 = exp(dd * log(rho) - 0.5 * x - 0.5 * lgamma(dd + 1.0))
    q[0] = q0
    if top >= 1:
        q[1] = q0 * (1.0 + dd - x) / sqrt(dd + 1.0)
    for n in range(1, top):
        q[n + 1] = ((2.0 * n + 1.0 + dd - x) * q[n] - sqrt(n * (n + dd)) * q[n - 1]) / sqrt(
            (n + 1.0) * (n + 1.0 + dd))


cdef void _accumulate(const double[::1] rho, const double complex[:, ::1] C, int N,
                      double complex[:, ::1] out, double[::1] buf) noexcept nogil:
    cdef int R = rho.shape[0]
    cdef int r, d, n
    cdef double sgn
    cdef double complex cp, cm
    cdef double* q = &buf[0]
    for r in range(R):
        for d in range(N + 1):
            _radial_column(rho[r], d, N, q)
            cp = C[r, N + d]
            cm = C[r, N - d]
            sgn = -1.0 if (d % 2) else 1.0
            for n in range(N - d + 1):
                out[n + d, n] += cp * q[n]
                if d > 0:
                    out[n, n + d] += sgn * cm * q[n]


cdef void _trace(const double[::1] rho, const double complex[:, ::1] F, int N,
                 double complex[:, ::1] T, double[::1] buf) noexcept nogil:
    cdef int R = rho.shape[0]
    cdef int r, d, n
    cdef double sgn
    cdef double complex sp, sm
    cdef double* q = &buf[0]
    for r in range(R):
        for d in range(N + 1):
            _radial_column(rho[r], d, N, q)
            sp = 0.0
            sm = 0.0
            sgn = -1.0 if (d % 2) else 1.0
            for n in range(N - d + 1):
                # D[n+d, n] F[n, n+d] and D[n, n+d] F[n+d, n]
                sp = sp + q[n] * F[n, n + d]
                if d > 0:
                    sm = sm + q[n] * F[n + d, n]
            T[r, N + d] += sp
            if d > 0:
                T[r, N - d] += sgn * sm


def accumulate(rho, C, int N):
    cdef double[::1] rv = np.ascontiguousarray(rho, dtype=np.float64)
    cdef double complex[:, ::1] cv = np.ascontiguousarray(C, dtype=np.complex128)
    out = np.zeros((N + 1, N + 1), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out
    cdef double[::1] buf = np.empty(N + 1)
    if cv.shape[0] != rv.shape[0] or cv.shape[1] != 2 * N + 1:
        raise ValueError("angular sums must have shape (len(rho), 2N+1)")
    with nogil:
        _accumulate(rv, cv, N, ov, buf)
    return out


def trace_coeffs(rho, F, int N):
    cdef double[::1] rv = np.ascontiguousarray(rho, dtype=np.float64)
    cdef double complex[:, ::1] fv = np.ascontiguousarray(F, dtype=np.complex128)
    T = np.zeros((rv.shape[0], 2 * N + 1), dtype=np.complex128)
    cdef double complex[:, ::1] tv = T
    cdef double[::1] buf = np.empty(N + 1)
    if fv.shape[0] != N + 1 or fv.shape[1] != N + 1:
        raise ValueError("field matrix must be (N+1) x (N+1)")
    with nogil:
        _trace(rv, fv, N, tv, buf)
    return T


def displacement_matrix(alpha, int N):
    rho, phi = abs(alpha), np.angle(alpha)
    C = np.exp(1j * np.arange(-N, N + 1) * phi)[None, :]
    return accumulate(np.array([rho]), C, N)
