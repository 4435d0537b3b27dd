"""Compiled inner loops for the exhaustive window checks."""

import numpy as np
from numba import njit


@njit(cache=True)
def associativity_scan(table, n):
    """Scan all triples of an addition table for ``(a+b)+c == a+(b+c)``.

    ``table[a, b]`` is ``-1`` when ``a + b`` is undefined, an element id below
    ``n`` when the sum lies in the window, and an id ``>= n`` naming an
    out-of-window sum. Triples needing a sum of an out-of-window element are
    inconclusive and counted separately.

    Returns ``(checked, inconclusive, a, b, c)`` with ``a = -1`` when no
    violation was found.
    """
    checked = 0
    inconclusive = 0
    for a in range(n):
        for b in range(n):
            ab = table[a, b]
            for c in range(n):
                bc = table[b, c]
                if ab < 0 and bc < 0:
                    checked += 1
                    continue
                if ab >= n or bc >= n:
                    inconclusive += 1
                    continue
                lhs = -1 if ab < 0 else table[ab, c]
                rhs = -1 if bc < 0 else table[a, bc]
                if lhs != rhs:
                    return checked, inconclusive, a, b, c
                checked += 1
    return checked, inconclusive, -1, -1, -1


def scan_associativity(table):
    n = table.shape[0]
    return associativity_scan(np.ascontiguousarray(table, dtype=np.int32), n)
