"""Pure-Python index kernels.

Reference twin of ``_ckernels.pyx``; both must agree bit for bit. Every
function expects its inputs already sorted by citations, descending (ties
by pub_id), which is done once by the caller.

Batch variants take CSR-packed segments: researcher ``i`` owns
``values[offsets[i]:offsets[i + 1]]``.
"""
from math import isqrt

import numpy as np


def h_sorted(c):
    h = 0
    for i, x in enumerate(c):
        if x >= i + 1:
            h = i + 1
        else:
            break
    return h


def g_sorted(c, pad=True):
    total = 0
    g = 0
    n = 0
    for i, x in enumerate(c):
        n = i + 1
        total += x
        if total >= n * n:
            g = n
        else:
            return g
    if pad and g == n:
        # fictitious zero-cited papers beyond the list
        return max(n, isqrt(total))
    return g


def hm_sorted(c, a):
    best = 0.0
    r_eff = 0.0
    for x, k in zip(c, a):
        r_eff += 1.0 / k
        if r_eff <= x:
            best = r_eff
        else:
            break
    return best


def hi_sorted(a, h):
    if h > len(a):
        raise ValueError("h exceeds the number of papers")
    if h == 0:
        return 0.0
    s = 0
    for i in range(h):
        s += a[i]
    return h / (s / h)


def hreal_sorted(x):
    h = 0
    for i, v in enumerate(x):
        if v >= i + 1:
            h = i + 1
        else:
            break
    return h


def _segments(offsets):
    off = offsets.tolist() if hasattr(offsets, "tolist") else list(offsets)
    return zip(off[:-1], off[1:])


def h_batch(c, offsets):
    cl = c.tolist() if hasattr(c, "tolist") else list(c)
    return np.array([h_sorted(cl[s:e]) for s, e in _segments(offsets)], dtype=np.int64)


def g_batch(c, offsets, pad=True):
    cl = c.tolist() if hasattr(c, "tolist") else list(c)
    return np.array([g_sorted(cl[s:e], pad) for s, e in _segments(offsets)], dtype=np.int64)


def hm_batch(c, a, offsets):
    cl = c.tolist() if hasattr(c, "tolist") else list(c)
    al = a.tolist() if hasattr(a, "tolist") else list(a)
    return np.array([hm_sorted(cl[s:e], al[s:e]) for s, e in _segments(offsets)],
                    dtype=np.float64)


def hi_batch(a, offsets, h):
    al = a.tolist() if hasattr(a, "tolist") else list(a)
    hl = h.tolist() if hasattr(h, "tolist") else list(h)
    return np.array([hi_sorted(al[s:e], hh) for (s, e), hh in zip(_segments(offsets), hl)],
                    dtype=np.float64)


def hreal_batch(x, offsets):
    xl = x.tolist() if hasattr(x, "tolist") else list(x)
    return np.array([hreal_sorted(xl[s:e]) for s, e in _segments(offsets)], dtype=np.int64)
