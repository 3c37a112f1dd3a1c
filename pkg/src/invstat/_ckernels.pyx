# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels mirroring ``invstat._pykernels``.

The trace kernels accept float64 or long double stacks and return arrays of
the input precision.
"""
import numpy as np

cimport cython

ctypedef fused real:
    double
    long double


cdef inline real _tr2(const real[:, :, ::1] ms, Py_ssize_t a, Py_ssize_t b, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef real s = 0
    for i in range(n):
        for j in range(n):
            s += ms[a, i, j] * ms[b, j, i]
    return s


def _as_stack(ms_in):
    arr = np.asarray(ms_in)
    dt = np.longdouble if arr.dtype == np.longdouble else np.float64
    return np.ascontiguousarray(arr, dtype=dt)


def pair_traces(ms_in):
    arr = _as_stack(ms_in)
    out = np.empty((arr.shape[0], arr.shape[0]), dtype=arr.dtype)
    if arr.dtype == np.longdouble:
        _pair_traces[cython.longdouble](arr, out)
    else:
        _pair_traces[cython.double](arr, out)
    return out


cdef void _pair_traces(const real[:, :, ::1] ms, real[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t d = ms.shape[0], n = ms.shape[1], a, b
    cdef real v
    for a in range(d):
        for b in range(a, d):
            v = _tr2(ms, a, b, n)
            out[a, b] = v
            out[b, a] = v


def cubic_components(ms_in, ca, cb, cc, w2):
    arr = _as_stack(ms_in)
    d, n = arr.shape[0], arr.shape[1]
    out = np.empty((d, d, d), dtype=arr.dtype)
    tr = np.empty(d, dtype=arr.dtype)
    p = np.empty((d, d), dtype=arr.dtype)
    mab = np.empty((n, n), dtype=arr.dtype)
    if arr.dtype == np.longdouble:
        _cubic[cython.longdouble](arr, ca, cb, cc, w2, tr, p, mab, out)
    else:
        _cubic[cython.double](arr, ca, cb, cc, w2, tr, p, mab, out)
    return out


cdef void _cubic(const real[:, :, ::1] ms, real ca, real cb, real cc, real w2,
                 real[::1] tr, real[:, ::1] p, real[:, ::1] mab,
                 real[:, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t d = ms.shape[0], n = ms.shape[1]
    cdef Py_ssize_t a, b, c, i, j, k
    cdef real v, s, q
    for a in range(d):
        s = 0
        for i in range(n):
            s += ms[a, i, i]
        tr[a] = s
    _pair_traces(ms, p)
    for a in range(d):
        for b in range(a, d):
            if ca != 0:
                for i in range(n):
                    for k in range(n):
                        s = 0
                        for j in range(n):
                            s += ms[a, i, j] * ms[b, j, k]
                        mab[i, k] = s
            for c in range(b, d):
                q = 0
                if ca != 0:
                    for i in range(n):
                        for k in range(n):
                            q += mab[i, k] * ms[c, k, i]
                v = (ca * q
                     + cb * w2 * (tr[a] * p[b, c] + tr[b] * p[a, c] + tr[c] * p[a, b])
                     + cc * tr[a] * tr[b] * tr[c])
                out[a, b, c] = v
                out[a, c, b] = v
                out[b, a, c] = v
                out[b, c, a] = v
                out[c, a, b] = v
                out[c, b, a] = v


def score_moments(x_in, amats_in, offsets_in):
    cdef const double[:, ::1] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef const double[:, :, ::1] am = np.ascontiguousarray(amats_in, dtype=np.float64)
    cdef const double[::1] off = np.ascontiguousarray(offsets_in, dtype=np.float64)
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1], k = am.shape[0]
    cdef Py_ssize_t s, j, i, l
    cdef double prod, quad, row, mean = 0.0, m2 = 0.0, delta
    if m == 0:
        return 0, 0.0, 0.0
    vals_arr = np.empty(m)
    cdef double[::1] vals = vals_arr
    with nogil:
        for s in range(m):
            prod = 1.0
            for j in range(k):
                quad = 0.0
                for i in range(n):
                    row = 0.0
                    for l in range(n):
                        row += am[j, i, l] * x[s, l]
                    quad += x[s, i] * row
                prod *= 0.5 * quad - off[j]
            vals[s] = prod
            mean += prod
        mean /= m
        for s in range(m):
            delta = vals[s] - mean
            m2 += delta * delta
    return m, mean, m2
