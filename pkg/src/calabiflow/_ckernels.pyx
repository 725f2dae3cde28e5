# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-face kernels; same signatures and results as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, sqrt, sinh, tanh, sin, cos, tan, M_PI, INFINITY

cnp.import_array()


cdef inline void _angles(double a, double b, double c, bint hyperbolic,
                         double* out) noexcept nogil:
    cdef double sa = 0.5 * (b + c - a)
    cdef double sb = 0.5 * (a + c - b)
    cdef double sc = 0.5 * (a + b - c)
    cdef double s
    if sa <= 0.0:
        out[0] = M_PI; out[1] = 0.0; out[2] = 0.0
        return
    if sb <= 0.0:
        out[0] = 0.0; out[1] = M_PI; out[2] = 0.0
        return
    if sc <= 0.0:
        out[0] = 0.0; out[1] = 0.0; out[2] = M_PI
        return
    s = 0.5 * (a + b + c)
    if hyperbolic:
        s = sinh(s); sa = sinh(sa); sb = sinh(sb); sc = sinh(sc)
    out[0] = 2.0 * atan2(sqrt(sb * sc), sqrt(s * sa))
    out[1] = 2.0 * atan2(sqrt(sa * sc), sqrt(s * sb))
    out[2] = 2.0 * atan2(sqrt(sa * sb), sqrt(s * sc))


def triangle_angles(double a, double b, double c, bint hyperbolic):
    cdef double out[3]
    _angles(a, b, c, hyperbolic, out)
    return out[0], out[1], out[2]


def face_angles(lengths, bint hyperbolic):
    cdef double[:, ::1] L = np.ascontiguousarray(lengths, dtype=np.float64)
    cdef Py_ssize_t nf = L.shape[0], f
    result = np.empty((nf, 3), dtype=np.float64)
    cdef double[:, ::1] out = result
    with nogil:
        for f in range(nf):
            _angles(L[f, 0], L[f, 1], L[f, 2], hyperbolic, &out[f, 0])
    return result


def curvature(face_vertices, angles, Py_ssize_t n):
    cdef cnp.int64_t[:, ::1] fv = np.ascontiguousarray(face_vertices, dtype=np.int64)
    cdef double[:, ::1] A = np.ascontiguousarray(angles, dtype=np.float64)
    result = np.full(n, 2.0 * M_PI)
    cdef double[::1] K = result
    cdef Py_ssize_t f, c
    for f in range(fv.shape[0]):
        for c in range(3):
            K[fv[f, c]] -= A[f, c]
    return result


def edge_margins(edge_sides, angles, bint hyperbolic):
    cdef cnp.int64_t[:, :, ::1] es = np.ascontiguousarray(edge_sides, dtype=np.int64)
    cdef double[:, ::1] A = np.ascontiguousarray(angles, dtype=np.float64)
    cdef Py_ssize_t ne = es.shape[0], e
    cdef cnp.int64_t f0, c0, f1, c1
    cdef double facing, s0, s1
    result = np.empty(ne, dtype=np.float64)
    cdef double[::1] out = result
    for e in range(ne):
        f0 = es[e, 0, 0]; c0 = es[e, 0, 1]
        f1 = es[e, 1, 0]; c1 = es[e, 1, 1]
        if f0 == f1:
            out[e] = INFINITY
            continue
        facing = A[f0, c0] + A[f1, c1]
        if hyperbolic:
            s0 = A[f0, 0] + A[f0, 1] + A[f0, 2]
            s1 = A[f1, 0] + A[f1, 1] + A[f1, 2]
            out[e] = s0 + s1 - 2.0 * facing
        else:
            out[e] = M_PI - facing
    return result


def cotan_jacobian(face_vertices, angles, Py_ssize_t n):
    cdef cnp.int64_t[:, ::1] fv = np.ascontiguousarray(face_vertices, dtype=np.int64)
    cdef double[:, ::1] A = np.ascontiguousarray(angles, dtype=np.float64)
    result = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] L = result
    cdef Py_ssize_t f, c
    cdef cnp.int64_t a, b
    cdef double w
    # the diagonal collects the negated off-diagonal row entries, so rows sum to zero
    for f in range(fv.shape[0]):
        for c in range(3):
            a = fv[f, (c + 1) % 3]
            b = fv[f, (c + 2) % 3]
            if a == b:
                continue
            w = 1.0 / tan(A[f, c])
            L[a, b] -= w
            L[b, a] -= w
            L[a, a] += w
            L[b, b] += w
    return result


def hyperbolic_jacobian(face_vertices, lengths, angles, Py_ssize_t n):
    cdef cnp.int64_t[:, ::1] fv = np.ascontiguousarray(face_vertices, dtype=np.int64)
    cdef double[:, ::1] Lf = np.ascontiguousarray(lengths, dtype=np.float64)
    cdef double[:, ::1] A = np.ascontiguousarray(angles, dtype=np.float64)
    result = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] L = result
    cdef Py_ssize_t f, c, m, c1, c2
    cdef double sh[3]
    cdef double dl[3]
    cdef double dth[3]
    cdef double d, val
    for f in range(fv.shape[0]):
        for m in range(3):
            sh[m] = sinh(Lf[f, m])
            dl[m] = 2.0 * tanh(0.5 * Lf[f, m])
        for c in range(3):
            c1 = (c + 1) % 3
            c2 = (c + 2) % 3
            d = sh[c] / (sin(A[f, c]) * sh[c1] * sh[c2])
            dth[c] = d
            dth[c1] = -d * cos(A[f, c2])
            dth[c2] = -d * cos(A[f, c1])
            for m in range(3):
                val = -dth[m] * dl[m]
                L[fv[f, c], fv[f, (m + 1) % 3]] += val
                L[fv[f, c], fv[f, (m + 2) % 3]] += val
    return result
