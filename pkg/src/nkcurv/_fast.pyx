# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tensor kernels.

Same contract as ``nkcurv._kernels.numpy_backend``; tensors are
C-contiguous float64 arrays.  Dimensions stay small (d <= 16), so plain
typed loops beat per-call einsum dispatch by a wide margin.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


cdef double _contract4(const double[:, :, :, ::1] T,
                       const double* x, const double* y,
                       const double* z, const double* u) noexcept nogil:
    cdef Py_ssize_t d = T.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double acc = 0.0, ai, aij, aijk
    for i in range(d):
        ai = x[i]
        if ai == 0.0:
            continue
        for j in range(d):
            aij = ai * y[j]
            if aij == 0.0:
                continue
            for k in range(d):
                aijk = aij * z[k]
                if aijk == 0.0:
                    continue
                for l in range(d):
                    acc += aijk * u[l] * T[i, j, k, l]
    return acc


def contract4(const double[:, :, :, ::1] T, const double[::1] x,
              const double[::1] y, const double[::1] z, const double[::1] u):
    """Multilinear evaluation T(x, y, z, u)."""
    return _contract4(T, &x[0], &y[0], &z[0], &u[0])


def sectional_batch(const double[:, :, :, ::1] T,
                    const double[:, ::1] X, const double[:, ::1] Y):
    """T(x_m, y_m, y_m, x_m) for row-paired batches X, Y of shape (m, d)."""
    cdef Py_ssize_t m = X.shape[0]
    cdef Py_ssize_t n
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for n in range(m):
            ov[n] = _contract4(T, &X[n, 0], &Y[n, 0], &Y[n, 0], &X[n, 0])
    return out


def transform4(const double[:, :, :, ::1] T, const double[:, ::1] A):
    """Pullback along A in every slot: out(x,y,z,u) = T(Ax, Ay, Az, Au)."""
    cdef Py_ssize_t d = T.shape[0]
    cdef Py_ssize_t a, b, c, e, i
    cdef double acc
    t1 = np.empty((d, d, d, d), dtype=np.float64)
    t2 = np.empty((d, d, d, d), dtype=np.float64)
    cdef double[:, :, :, ::1] w1 = t1
    cdef double[:, :, :, ::1] w2 = t2
    with nogil:
        # contract slot 4, then 3, then 2, then 1; each pass moves the
        # contracted axis to the rear so the inner loop stays contiguous
        for a in range(d):
            for b in range(d):
                for c in range(d):
                    for i in range(d):
                        acc = 0.0
                        for e in range(d):
                            acc += T[a, b, c, e] * A[e, i]
                        w1[i, a, b, c] = acc
        for i in range(d):
            for a in range(d):
                for b in range(d):
                    for c in range(d):
                        acc = 0.0
                        for e in range(d):
                            acc += w1[i, a, b, e] * A[e, c]
                        w2[c, i, a, b] = acc
        for c in range(d):
            for i in range(d):
                for a in range(d):
                    for b in range(d):
                        acc = 0.0
                        for e in range(d):
                            acc += w2[c, i, a, e] * A[e, b]
                        w1[b, c, i, a] = acc
        for b in range(d):
            for c in range(d):
                for i in range(d):
                    for a in range(d):
                        acc = 0.0
                        for e in range(d):
                            acc += w1[b, c, i, e] * A[e, a]
                        w2[a, b, c, i] = acc
    return t2


def antisym12_defect(const double[:, :, :, ::1] T):
    """max |T(x,y,z,u) + T(y,x,z,u)| over basis tuples."""
    cdef Py_ssize_t d = T.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double best = 0.0, v
    with nogil:
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    for l in range(d):
                        v = T[i, j, k, l] + T[j, i, k, l]
                        if v < 0.0:
                            v = -v
                        if v > best:
                            best = v
    return best


def antisym34_defect(const double[:, :, :, ::1] T):
    """max |T(x,y,z,u) + T(x,y,u,z)| over basis tuples."""
    cdef Py_ssize_t d = T.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double best = 0.0, v
    with nogil:
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    for l in range(d):
                        v = T[i, j, k, l] + T[i, j, l, k]
                        if v < 0.0:
                            v = -v
                        if v > best:
                            best = v
    return best


def bianchi_defect(const double[:, :, :, ::1] T):
    """max |T(x,y,z,u) + T(y,z,x,u) + T(z,x,y,u)| over basis tuples."""
    cdef Py_ssize_t d = T.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double best = 0.0, v
    with nogil:
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    for l in range(d):
                        v = T[i, j, k, l] + T[j, k, i, l] + T[k, i, j, l]
                        if v < 0.0:
                            v = -v
                        if v > best:
                            best = v
    return best
