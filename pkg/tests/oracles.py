"""Brute-force reference implementations, deliberately naive.

They share no code with the kernels: each candidate value is checked
directly against the definition.
"""
import math
from fractions import Fraction


def h_brute(counts):
    counts = list(counts)
    best = 0
    for k in range(0, len(counts) + 1):
        if sum(1 for c in counts if c >= k) >= k:
            best = k
    return best


def g_brute(counts, pad=True):
    ordered = sorted(counts, reverse=True)
    total = sum(ordered)
    upper = int(math.sqrt(total)) + 2 if pad else len(ordered)
    best = 0
    for k in range(0, upper + 1):
        if not pad and k > len(ordered):
            break
        if sum(ordered[:k]) >= k * k:  # slicing past the end == zero padding
            best = k
    return best


def hm_exact(pairs):
    """(citations, n_authors) pairs, already in rank order; exact rational result."""
    best = Fraction(0)
    for r in range(1, len(pairs) + 1):
        r_eff = sum(Fraction(1, a) for _, a in pairs[:r])
        if r_eff <= pairs[r - 1][0]:
            best = max(best, r_eff)
    return best


def hreal_brute(values):
    values = list(values)
    best = 0
    for k in range(0, len(values) + 1):
        if sum(1 for v in values if v >= k) >= k:
            best = k
    return best
