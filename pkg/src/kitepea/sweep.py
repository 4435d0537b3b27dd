"""Exhaustive RDP1 sweep over an n-perfect window, compiled for integer groups.

Every equal-sum quadruple ``a1 a2 = b1 b2`` of window elements is refined
twice: by the constructive case analysis and by the corner search. Both
are re-implemented here on flat integer arrays so that windows with
``10^8`` quadruples finish in minutes; :func:`reference_sweep` runs the
same loop through :mod:`kitepea.rdp` and the test suite checks the two
against each other.

Elements are encoded as a level plus ``m * d`` integers laid out index by
index, so ``values[i * d + c]`` is coordinate ``c`` of the ``i``-th entry.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .errors import UsageError
from .lexext import LexElement, NPerfectAlgebra
from .pogroup import Kind, RefinementTable

CASES = ("i", "ii", "iii", "iv", "iv^T", "v", "v^T", "vi", "vi^T", "vii", "viii", "ix")
_CASE_ID = {c: k for k, c in enumerate(CASES)}

# stats layout
_TOTAL, _BAD_CONSTRUCTIVE, _NO_CORNER, _DISAGREE = 0, 1, 2, 3
_CASE0 = 4


# ----------------------------------------------------------------------
# workspace
#
# All buffers live in one int64 matrix ``W``: row ``r`` holds an element
# with its level in column 0 and its values in columns 1..M. Passing a
# single array keeps call overhead in the inner loops low.

_Q = 0  # the quadruple a1, a2, b1, b2
_T = 4  # constructive table c11, c12, c21, c22
_B = 8  # table found by the corner search
_S = 12  # scratch: verification, inverses, interval ends
_LO, _HI, _DV = 16, 17, 18
_ROWS = 19


@njit(cache=True, inline="always")
def _mul(W, a, b, o, pw, off, m, d):
    """``W[o] = W[a] W[b]``; ``o`` must differ from ``b``."""
    la = W[a, 0]
    row = la + off
    for i in range(m):
        pi = pw[row, i]
        for c in range(d):
            W[o, 1 + i * d + c] = W[a, 1 + i * d + c] + W[b, 1 + pi * d + c]
    W[o, 0] = la + W[b, 0]


@njit(cache=True, inline="always")
def _inv(W, a, o, pw, off, m, d):
    """``W[o] = W[a]^-1``; ``o`` must differ from ``a``."""
    la = W[a, 0]
    row = -la + off
    for i in range(m):
        pi = pw[row, i]
        for c in range(d):
            W[o, 1 + i * d + c] = -W[a, 1 + pi * d + c]
    W[o, 0] = -la


@njit(cache=True, inline="always")
def _positive(W, r, M):
    if W[r, 0] != 0:
        return W[r, 0] > 0
    for k in range(1, M + 1):
        if W[r, k] < 0:
            return False
    return True


@njit(cache=True, inline="always")
def _equal(W, a, b, M):
    for k in range(M + 1):
        if W[a, k] != W[b, k]:
            return False
    return True


@njit(cache=True, inline="always")
def _is_zero(W, r, M):
    for k in range(M + 1):
        if W[r, k] != 0:
            return False
    return True


@njit(cache=True)
def _com(W, a, b, moving, phi_id, m, d):
    """The exact ``com`` rule for an abelian ``G``."""
    M = m * d
    if _is_zero(W, a, M) or _is_zero(W, b, M):
        return True
    la, lb = W[a, 0], W[b, 0]
    if la == 0 and lb == 0:
        return True
    if la >= 1 and lb >= 1:
        return phi_id
    f = a if la == 0 else b
    for i in range(m):
        if moving[i]:
            for c in range(d):
                if W[f, 1 + i * d + c] != 0:
                    return False
    return True


@njit(cache=True)
def _verify(W, t, pw, off, moving, phi_id, m, d):
    """Check the table in rows ``t..t+3`` against the quadruple."""
    M = m * d
    s = _S
    for r in range(4):
        if not _positive(W, t + r, M):
            return False
    # rows: c11 c12 = a1, c21 c22 = a2; columns: c11 c21 = b1, c12 c22 = b2
    _mul(W, t, t + 1, s, pw, off, m, d)
    if not _equal(W, s, _Q, M):
        return False
    _mul(W, t + 2, t + 3, s, pw, off, m, d)
    if not _equal(W, s, _Q + 1, M):
        return False
    _mul(W, t, t + 2, s, pw, off, m, d)
    if not _equal(W, s, _Q + 2, M):
        return False
    _mul(W, t + 1, t + 3, s, pw, off, m, d)
    if not _equal(W, s, _Q + 3, M):
        return False
    return _com(W, t + 1, t + 2, moving, phi_id, m, d)


# ----------------------------------------------------------------------
# constructive refinement


@njit(cache=True, inline="always")
def _corner(a2, b1):
    """Lower-corner refinement in Z: the first valid ``c11`` in ascending order."""
    c11 = b1 - a2
    return c11 if c11 > 0 else 0


@njit(cache=True)
def _constructive(W, pw, off, m, d):
    """Fill rows ``_T..`` with the constructive table; return the case id."""
    M = m * d
    T = _T
    transposed = W[0, 0] < W[2, 0]
    if transposed:
        x, y, u, v = 2, 3, 0, 1
    else:
        x, y, u, v = 0, 1, 2, 3
    n1, n2, m1 = W[x, 0], W[y, 0], W[u, 0]
    if n1 > m1:
        row = -m1 + off
        W[T, 0] = m1
        W[T + 1, 0] = n1 - m1
        W[T + 2, 0] = 0
        W[T + 3, 0] = n2
        for i in range(m):
            pi = pw[row, i]
            for c in range(d):
                k = 1 + i * d + c
                kp = 1 + pi * d + c
                W[T, k] = W[u, k]
                W[T + 1, k] = W[x, kp] - W[u, kp]
                W[T + 2, k] = 0
                W[T + 3, k] = W[y, k]
        if m1 >= 1 and n2 >= 1:
            case = 9 if transposed else 10
        elif n2 >= 1:
            case = 7 if transposed else 8
        elif m1 == 0:
            case = 4 if transposed else 3
        else:
            case = 6 if transposed else 5
    elif n1 == 0:
        W[T, 0] = 0
        W[T + 1, 0] = 0
        W[T + 2, 0] = 0
        W[T + 3, 0] = n2
        for k in range(1, M + 1):
            dd = 0
            if n2 >= 1:
                dd = W[y, k] if W[y, k] < W[v, k] else W[v, k]
            a2 = W[y, k] - dd
            c11 = _corner(a2, W[u, k])
            c21 = W[u, k] - c11
            W[T, k] = c11
            W[T + 1, k] = W[x, k] - c11
            W[T + 2, k] = c21
            W[T + 3, k] = a2 - c21 + dd
        case = 1 if n2 >= 1 else 0
    else:
        row = n1 + off
        shift = n2 >= 1
        dv = _DV
        for k in range(1, M + 1):
            lo = W[x, k]
            if W[y, k] < lo:
                lo = W[y, k]
            if W[u, k] < lo:
                lo = W[u, k]
            if W[v, k] < lo:
                lo = W[v, k]
            W[dv, k] = lo
        W[T, 0] = n1
        W[T + 1, 0] = 0
        W[T + 2, 0] = 0
        W[T + 3, 0] = n2
        for i in range(m):
            j = pw[row, i]
            for c in range(d):
                ki = 1 + i * d + c
                kj = 1 + j * d + c
                di = W[dv, ki]
                dj = W[dv, kj] if shift else 0
                a1 = W[x, ki] - di
                a2 = W[y, kj] - dj
                b1 = W[u, ki] - di
                c11 = _corner(a2, b1)
                c21 = b1 - c11
                W[T, ki] = di + c11
                W[T + 1, kj] = a1 - c11
                W[T + 2, kj] = c21
                W[T + 3, kj] = a2 - c21 + dj
        case = 11 if shift else 2
    if transposed:
        for k in range(M + 1):
            t = W[T + 1, k]
            W[T + 1, k] = W[T + 2, k]
            W[T + 2, k] = t
    return case


# ----------------------------------------------------------------------
# corner search


@njit(cache=True)
def _search(W, pw, off, moving, phi_id, m, d, n, bound):
    """First valid corner in canonical window order, written to rows ``_B..``."""
    M = m * d
    B = _B
    s_inv, s_lo, s_hi = _S + 1, _S + 2, _S + 3
    # lo = 0 v b1 a2^-1
    _inv(W, 1, s_inv, pw, off, m, d)
    _mul(W, 2, s_inv, s_lo, pw, off, m, d)
    lo_l = W[s_lo, 0]
    if lo_l < 0:
        lo_l = 0
        for k in range(M + 1):
            W[s_lo, k] = 0
    elif lo_l == 0:
        for k in range(1, M + 1):
            if W[s_lo, k] < 0:
                W[s_lo, k] = 0
    # hi = a1 ^ b1
    if W[0, 0] != W[2, 0]:
        src = 0 if W[0, 0] < W[2, 0] else 2
        for k in range(M + 1):
            W[s_hi, k] = W[src, k]
    else:
        W[s_hi, 0] = W[0, 0]
        for k in range(1, M + 1):
            W[s_hi, k] = W[0, k] if W[0, k] < W[2, k] else W[2, k]
    hi_l = W[s_hi, 0]
    if lo_l > hi_l:
        return False
    last = hi_l if hi_l < n else n
    for lev in range(lo_l, last + 1):
        r12 = W[0, 0] - lev
        r21 = W[2, 0] - lev
        pin = -1
        if not phi_id:
            if r12 >= 1 and r21 >= 1:
                continue
            if r12 == 0 and r21 >= 1:
                pin = 0
            elif r21 == 0 and r12 >= 1:
                pin = 2
        wlo = 0 if lev == 0 else -bound
        whi = 0 if lev == n else bound
        empty = False
        for k in range(1, M + 1):
            a = wlo
            b = whi
            if lev == lo_l and W[s_lo, k] > a:
                a = W[s_lo, k]
            if lev == hi_l and W[s_hi, k] < b:
                b = W[s_hi, k]
            if pin >= 0 and moving[(k - 1) // d]:
                p = W[pin, k]
                if p < a or p > b:
                    empty = True
                    break
                a = p
                b = p
            if a > b:
                empty = True
                break
            W[_LO, k] = a
            W[_HI, k] = b
        if empty:
            continue
        W[B, 0] = lev
        for k in range(1, M + 1):
            W[B, k] = W[_LO, k]
        while True:
            # c12 = c11^-1 a1, c21 = c11^-1 b1, c22 = c21^-1 a2
            _inv(W, B, s_inv, pw, off, m, d)
            _mul(W, s_inv, 0, B + 1, pw, off, m, d)
            _mul(W, s_inv, 2, B + 2, pw, off, m, d)
            _inv(W, B + 2, s_inv, pw, off, m, d)
            _mul(W, s_inv, 1, B + 3, pw, off, m, d)
            if _verify(W, B, pw, off, moving, phi_id, m, d):
                return True
            # advance the odometer, last coordinate fastest
            k = M
            while k >= 1:
                if W[B, k] < W[_HI, k]:
                    W[B, k] += 1
                    break
                W[B, k] = W[_LO, k]
                k -= 1
            if k < 1:
                break
    return False


# ----------------------------------------------------------------------
# the sweep


@njit(cache=True)
def _sweep(codes, pair_a, pair_b, starts, pw, off, moving, phi_id, m, d, n, bound, stats, first):
    M = m * d
    W = np.zeros((_ROWS, M + 1), dtype=np.int64)
    for g in range(starts.shape[0] - 1):
        s, e = starts[g], starts[g + 1]
        for p in range(s, e):
            for k in range(M + 1):
                W[0, k] = codes[pair_a[p], k]
                W[1, k] = codes[pair_b[p], k]
            for q in range(s, e):
                for k in range(M + 1):
                    W[2, k] = codes[pair_a[q], k]
                    W[3, k] = codes[pair_b[q], k]
                stats[0] += 1
                case = _constructive(W, pw, off, m, d)
                stats[4 + case] += 1
                ok = _verify(W, _T, pw, off, moving, phi_id, m, d)
                found = _search(W, pw, off, moving, phi_id, m, d, n, bound)
                if not ok:
                    stats[1] += 1
                    if first[0] < 0:
                        first[0] = p
                        first[1] = q
                        first[2] = 1
                if not found:
                    stats[2] += 1
                    if first[0] < 0:
                        first[0] = p
                        first[1] = q
                        first[2] = 2
                if ok != found:
                    stats[3] += 1


@njit(cache=True)
def _refine_one(quad, pw, off, moving, phi_id, m, d, n, bound):
    M = m * d
    W = np.zeros((_ROWS, M + 1), dtype=np.int64)
    W[:4] = quad
    case = _constructive(W, pw, off, m, d)
    ok = _verify(W, _T, pw, off, moving, phi_id, m, d)
    found = _search(W, pw, off, moving, phi_id, m, d, n, bound)
    return case, ok, W[_T : _T + 4].copy(), found, W[_B : _B + 4].copy()


# ----------------------------------------------------------------------
# Python side


@dataclass
class SweepResult:
    """Outcome of an exhaustive RDP1 sweep."""

    quadruples: int
    invalid_constructive: int
    missing_corner: int
    disagreements: int
    cases: dict = field(default_factory=dict)
    first_failure: Optional[str] = None
    elapsed_s: float = 0.0

    @property
    def ok(self):
        return self.invalid_constructive == 0 and self.missing_corner == 0 and self.disagreements == 0


class _Encoded:
    def __init__(self, A: NPerfectAlgebra, bound):
        G = A.group
        if G.kind not in (Kind.INTEGERS, Kind.INT_VECTORS) or A.m == 0:
            raise UsageError("the compiled sweep needs G = Z^d and a non-empty index set")
        if not G.abelian:  # pragma: no cover - guarded by the kind check
            raise UsageError("the compiled sweep assumes an abelian G")
        self.A = A
        self.bound = bound
        self.m = A.m
        self.d = G.dim
        self.off = 2 * A.n + 2
        self.pw = np.array([A.lex.power(k) for k in range(-self.off, self.off + 1)], dtype=np.int64)
        self.moving = np.array([A.phi(i) != i for i in range(A.m)], dtype=np.bool_)
        self.phi_id = bool(A.phi.is_identity())

    def encode(self, xs):
        """One row per element: the level, then the flattened values."""
        levels, vals = self.A.encode(xs)
        return np.ascontiguousarray(np.column_stack([levels, vals.reshape(len(xs), -1)]))

    def decode(self, row):
        d = self.d
        vals = []
        for i in range(self.m):
            chunk = [int(v) for v in row[1 + i * d : 1 + (i + 1) * d]]
            vals.append(chunk[0] if self.A.group.kind is Kind.INTEGERS else tuple(chunk))
        return LexElement(int(row[0]), tuple(vals))


def equal_sum_pairs(A: NPerfectAlgebra, window):
    """Pairs of window indices with a defined sum, grouped by that sum.

    Returns ``(pair_a, pair_b, starts)``: group ``g`` is
    ``range(starts[g], starts[g + 1])``.
    """
    fast = A.addition_codes(window)
    if fast is None:
        raise UsageError("equal_sum_pairs needs an integer-encodable algebra")
    defined, keys, _ = fast
    ia, ib = np.nonzero(defined)
    k = keys[ia, ib]
    order = np.argsort(k, kind="stable")
    ia, ib, k = ia[order], ib[order], k[order]
    cut = np.nonzero(np.diff(k))[0] + 1
    starts = np.concatenate(([0], cut, [len(k)])).astype(np.int64)
    return ia.astype(np.int64), ib.astype(np.int64), starts


def quadruple_count(A, bound):
    _, _, starts = equal_sum_pairs(A, A.window(bound))
    sizes = np.diff(starts)
    return int((sizes * sizes).sum())


def compiled_sweep(A: NPerfectAlgebra, bound) -> SweepResult:
    """Run both refinements over every equal-sum quadruple of the window."""
    t0 = time.perf_counter()
    enc = _Encoded(A, bound)
    window = A.window(bound)
    codes = enc.encode(window)
    pa, pb, starts = equal_sum_pairs(A, window)
    stats = np.zeros(_CASE0 + len(CASES), dtype=np.int64)
    first = np.full(3, -1, dtype=np.int64)
    _sweep(
        codes, pa, pb, starts, enc.pw, enc.off, enc.moving, enc.phi_id,
        enc.m, enc.d, A.n, bound, stats, first,
    )
    failure = None
    if first[0] >= 0:
        p, q, why = first
        r = A.render
        quad = f"a1={r(window[pa[p]])}, a2={r(window[pb[p]])}, b1={r(window[pa[q]])}, b2={r(window[pb[q]])}"
        failure = ("constructive table invalid: " if why == 1 else "no corner found: ") + quad
    return SweepResult(
        quadruples=int(stats[_TOTAL]),
        invalid_constructive=int(stats[_BAD_CONSTRUCTIVE]),
        missing_corner=int(stats[_NO_CORNER]),
        disagreements=int(stats[_DISAGREE]),
        cases={c: int(stats[_CASE0 + k]) for k, c in enumerate(CASES) if stats[_CASE0 + k]},
        first_failure=failure,
        elapsed_s=time.perf_counter() - t0,
    )


def compiled_refine(A: NPerfectAlgebra, bound, a1, a2, b1, b2):
    """Both refinements of one quadruple, as computed by the compiled code.

    Returns ``(case, constructive_ok, constructive_table, search_table)``
    where ``search_table`` is ``None`` if the corner search failed.
    """
    enc = _Encoded(A, bound)
    quad = enc.encode([a1, a2, b1, b2])
    case, ok, t, found, b = _refine_one(quad, enc.pw, enc.off, enc.moving, enc.phi_id, enc.m, enc.d, A.n, bound)
    table = RefinementTable(*(enc.decode(row) for row in t))
    search = RefinementTable(*(enc.decode(row) for row in b)) if found else None
    return CASES[case], bool(ok), table, search


def reference_sweep(A: NPerfectAlgebra, bound, limit=None) -> SweepResult:
    """The same sweep through the scalar implementations in :mod:`kitepea.rdp`."""
    from .rdp import LexAmbient, _search as search, lex_refine_rdp1, verify_table
    from .pogroup import RdpClass

    t0 = time.perf_counter()
    amb = LexAmbient(A, bound)
    window = A.window(bound)
    groups = {}
    for a in window:
        for b in window:
            s = A.add(a, b)
            if s is not None:
                groups.setdefault(s, []).append((a, b))
    res = SweepResult(0, 0, 0, 0)
    for pairs in groups.values():
        for a1, a2 in pairs:
            for b1, b2 in pairs:
                if limit is not None and res.quadruples >= limit:
                    break
                res.quadruples += 1
                ref = lex_refine_rdp1(A, a1, a2, b1, b2)
                res.cases[ref.case] = res.cases.get(ref.case, 0) + 1
                ok = verify_table(amb, ref.table, a1, a2, b1, b2, RdpClass.RDP1) is True
                found = search(amb, a1, a2, b1, b2, RdpClass.RDP1)[0] is not None
                quad = f"a1={A.render(a1)}, a2={A.render(a2)}, b1={A.render(b1)}, b2={A.render(b2)}"
                if not ok:
                    res.invalid_constructive += 1
                    res.first_failure = res.first_failure or "constructive table invalid: " + quad
                if not found:
                    res.missing_corner += 1
                    res.first_failure = res.first_failure or "no corner found: " + quad
                if ok != found:
                    res.disagreements += 1
    res.elapsed_s = time.perf_counter() - t0
    return res
