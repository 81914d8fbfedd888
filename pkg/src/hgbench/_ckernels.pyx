# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled index kernels; same contract as ``_pykernels``.

No -ffast-math: the real-valued kernels must reproduce the pure-Python
summation order exactly.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline int64_t _isqrt(int64_t t) nogil:
    cdef int64_t r = <int64_t>sqrt(<double>t)
    while r * r > t:
        r -= 1
    while (r + 1) * (r + 1) <= t:
        r += 1
    return r


cdef inline int64_t _h(const int64_t[:] c, Py_ssize_t s, Py_ssize_t e) nogil:
    cdef Py_ssize_t i
    cdef int64_t h = 0
    for i in range(s, e):
        if c[i] >= i - s + 1:
            h = i - s + 1
        else:
            break
    return h


cdef inline int64_t _g(const int64_t[:] c, Py_ssize_t s, Py_ssize_t e, bint pad) nogil:
    cdef Py_ssize_t i
    cdef int64_t total = 0, g = 0, n = 0, r
    for i in range(s, e):
        n = i - s + 1
        total += c[i]
        if total >= n * n:
            g = n
        else:
            return g
    if pad and g == n:
        r = _isqrt(total)
        return r if r > n else n
    return g


cdef inline double _hm(const int64_t[:] c, const int64_t[:] a,
                       Py_ssize_t s, Py_ssize_t e) nogil:
    cdef Py_ssize_t i
    cdef double best = 0.0, r_eff = 0.0
    for i in range(s, e):
        r_eff += 1.0 / <double>a[i]
        if r_eff <= <double>c[i]:
            best = r_eff
        else:
            break
    return best


cdef inline double _hi(const int64_t[:] a, Py_ssize_t s, int64_t h) nogil:
    cdef Py_ssize_t i
    cdef int64_t tot = 0
    if h == 0:
        return 0.0
    for i in range(s, s + h):
        tot += a[i]
    return <double>h / (<double>tot / <double>h)


cdef inline int64_t _hreal(const double[:] x, Py_ssize_t s, Py_ssize_t e) nogil:
    cdef Py_ssize_t i
    cdef int64_t h = 0
    for i in range(s, e):
        if x[i] >= <double>(i - s + 1):
            h = i - s + 1
        else:
            break
    return h


def _i64(v):
    return np.ascontiguousarray(v, dtype=np.int64)


def _f64(v):
    return np.ascontiguousarray(v, dtype=np.float64)


def h_sorted(c):
    cdef const int64_t[:] cv = _i64(c)
    return int(_h(cv, 0, cv.shape[0]))


def g_sorted(c, pad=True):
    cdef const int64_t[:] cv = _i64(c)
    return int(_g(cv, 0, cv.shape[0], pad))


def hm_sorted(c, a):
    cdef const int64_t[:] cv = _i64(c)
    cdef const int64_t[:] av = _i64(a)
    return float(_hm(cv, av, 0, min(cv.shape[0], av.shape[0])))


def hi_sorted(a, h):
    cdef const int64_t[:] av = _i64(a)
    if h > av.shape[0]:
        raise ValueError("h exceeds the number of papers")
    return float(_hi(av, 0, h))


def hreal_sorted(x):
    cdef const double[:] xv = _f64(x)
    return int(_hreal(xv, 0, xv.shape[0]))


def h_batch(c, offsets):
    cdef const int64_t[:] cv = _i64(c)
    cdef const int64_t[:] off = _i64(offsets)
    cdef Py_ssize_t n = off.shape[0] - 1, i
    out = np.zeros(max(n, 0), dtype=np.int64)
    cdef int64_t[:] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _h(cv, off[i], off[i + 1])
    return out


def g_batch(c, offsets, pad=True):
    cdef const int64_t[:] cv = _i64(c)
    cdef const int64_t[:] off = _i64(offsets)
    cdef Py_ssize_t n = off.shape[0] - 1, i
    cdef bint p = pad
    out = np.zeros(max(n, 0), dtype=np.int64)
    cdef int64_t[:] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _g(cv, off[i], off[i + 1], p)
    return out


def hm_batch(c, a, offsets):
    cdef const int64_t[:] cv = _i64(c)
    cdef const int64_t[:] av = _i64(a)
    cdef const int64_t[:] off = _i64(offsets)
    cdef Py_ssize_t n = off.shape[0] - 1, i
    out = np.zeros(max(n, 0), dtype=np.float64)
    cdef double[:] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _hm(cv, av, off[i], off[i + 1])
    return out


def hi_batch(a, offsets, h):
    cdef const int64_t[:] av = _i64(a)
    cdef const int64_t[:] off = _i64(offsets)
    cdef const int64_t[:] hv = _i64(h)
    cdef Py_ssize_t n = off.shape[0] - 1, i
    out = np.zeros(max(n, 0), dtype=np.float64)
    cdef double[:] ov = out
    for i in range(n):
        if hv[i] > off[i + 1] - off[i]:
            raise ValueError("h exceeds the number of papers")
    with nogil:
        for i in range(n):
            ov[i] = _hi(av, off[i], hv[i])
    return out


def hreal_batch(x, offsets):
    cdef const double[:] xv = _f64(x)
    cdef const int64_t[:] off = _i64(offsets)
    cdef Py_ssize_t n = off.shape[0] - 1, i
    out = np.zeros(max(n, 0), dtype=np.int64)
    cdef int64_t[:] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _hreal(xv, off[i], off[i + 1])
    return out
