"""Lexicographic extensions ``Z x_phi G^I`` and their n-perfect intervals.

Elements are pairs ``(k, x)`` with ``k`` an integer level and ``x`` a tuple
indexed by ``I``. The product twists the second factor by a power of ``phi``::

    (k, x)(l, y) = (k + l, <x_i y_{phi^k(i)}>)

and the order is lexicographic: the level decides, then the tuple
componentwise. The interval ``[0, (n, e)]`` is an n-perfect pseudo effect
algebra whose elements split into slices ``E_0, ..., E_n`` by level.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import UsageError
from .pea import CheckReport, PeaUniverse, StateMap, check_normal_ideal, check_state, elements_for, timed
from .permutation import Permutation
from .pogroup import Kind, PoGroup, Verdict


class LexElement(NamedTuple):
    level: int
    values: tuple


def split_top_level(text):
    """Split on commas that are not nested inside brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


class LexGroup:
    """The po-group ``Z x_phi G^I`` with the lexicographic order."""

    def __init__(self, group: PoGroup, m: int, phi):
        if type(m) is not int or m < 0:
            raise UsageError(f"index size must be a non-negative integer, got {m!r}")
        if not isinstance(phi, Permutation):
            try:
                phi = Permutation(tuple(phi))
            except UsageError as exc:
                raise UsageError(f"not a bijection at phi: {exc}") from None
        if len(phi) != m:
            raise UsageError(f"phi has length {len(phi)}, expected {m}")
        self.group = group
        self.m = m
        self.phi = phi
        self._fixed = phi.fixed_points()

    def __repr__(self):
        return f"LexGroup({self.group}, m={self.m}, phi={list(self.phi)})"

    def __eq__(self, other):
        return isinstance(other, LexGroup) and (self.group, self.m, self.phi) == (other.group, other.m, other.phi)

    def __hash__(self):
        return hash((self.group, self.m, self.phi))

    def power(self, k):
        return self.phi.power(k).images

    @property
    def identity(self):
        return LexElement(0, (self.group.identity,) * self.m)

    def element(self, level, values):
        G = self.group
        x = LexElement(level, tuple(G.coerce(v) for v in values))
        self.validate(x)
        return x

    def is_member(self, x):
        return (
            isinstance(x, LexElement)
            and type(x.level) is int
            and len(x.values) == self.m
            and all(self.group.is_member(v) for v in x.values)
        )

    def validate(self, x):
        if not self.is_member(x):
            raise UsageError(f"{x!r} is not an element of {self}")

    def mul(self, x, y):
        G = self.group
        p = self.power(x.level)
        xv, yv = x.values, y.values
        return LexElement(x.level + y.level, tuple(G._mul(xv[i], yv[p[i]]) for i in range(self.m)))

    def inv(self, x):
        G = self.group
        p = self.power(-x.level)
        xv = x.values
        return LexElement(-x.level, tuple(G._inv(xv[p[i]]) for i in range(self.m)))

    def is_positive(self, x):
        if x.level != 0:
            return x.level > 0
        return all(self.group._is_positive(v) for v in x.values)

    def leq(self, x, y):
        if x.level != y.level:
            return x.level < y.level
        G = self.group
        return all(G._leq(a, b) for a, b in zip(x.values, y.values))

    def meet(self, x, y):
        if x.level != y.level:
            return x if x.level < y.level else y
        G = self.group
        return LexElement(x.level, tuple(G.meet(a, b) for a, b in zip(x.values, y.values)))

    def join(self, x, y):
        if x.level != y.level:
            return y if x.level < y.level else x
        G = self.group
        return LexElement(x.level, tuple(G.join(a, b) for a, b in zip(x.values, y.values)))

    def is_identity(self, x):
        return x == self.identity

    def com(self, p, q):
        """Elementwise commutation of ``[0, p]`` with ``[0, q]``.

        For abelian ``G`` this is decided exactly: two level-0 elements always
        commute; a nonzero level-0 ``f`` commutes with a higher-level element
        iff ``phi`` fixes every index in the support of ``f``; two elements
        above level 0 commute iff ``phi`` is the identity (or ``G`` or ``I``
        is trivial).
        """
        if not (self.is_positive(p) and self.is_positive(q)):
            raise UsageError("com expects positive elements")
        zero = self.identity
        if p == zero or q == zero:
            return Verdict(True)
        G = self.group
        if p.level == 0 and q.level == 0:
            for a, b in zip(p.values, q.values):
                v = G.com(a, b)
                if v.value is not True:
                    return v if v.value is None else Verdict(False, v.witness)
            return Verdict(True)
        if not G.abelian:
            return self._search_witness(p, q)
        trivial = G.is_trivial or self.m == 0
        if p.level >= 1 and q.level >= 1:
            if trivial or self.phi.is_identity():
                return Verdict(True)
            return Verdict(False, self._twist_witness(p, q))
        f, other = (p, q) if p.level == 0 else (q, p)
        e = G.identity
        moved = [i for i, v in enumerate(f.values) if v != e and i not in self._fixed]
        if not moved:
            return Verdict(True)
        i = moved[0]
        x = LexElement(0, tuple(f.values[i] if j == i else e for j in range(self.m)))
        return Verdict(False, (x, other) if f is p else (other, x))

    def _twist_witness(self, p, q):
        G = self.group
        e = G.identity
        i = next(j for j in range(self.m) if self.phi(j) != j)
        g = _small_positive(G)
        x = LexElement(0, tuple(g if j == i else e for j in range(self.m)))
        return (x, q)

    def _search_witness(self, p, q):
        for x in self._probe(p):
            for y in self._probe(q):
                if self.mul(x, y) != self.mul(y, x):
                    return Verdict(False, (x, y))
        return Verdict(None)

    def _probe(self, p):
        """Deterministic sample of ``[0, p]`` for non-abelian ``G``."""
        G = self.group
        e = G.identity
        out = [p]
        if p.level == 0:
            for i, v in enumerate(p.values):
                for g in G._interval_probe(v):
                    out.append(LexElement(0, tuple(g if j == i else e for j in range(self.m))))
        else:
            g = _small_positive(G)
            for i in range(self.m):
                out.append(LexElement(0, tuple(g if j == i else e for j in range(self.m))))
            out.append(LexElement(p.level, tuple(G._inv(g) for _ in range(self.m))))
        return [x for x in out if self.is_positive(x) and self.leq(x, p)]

    def render(self, x):
        G = self.group
        return f"({x.level})[" + ",".join(G.render(v) for v in x.values) + "]"

    def parse(self, text):
        text = text.strip()
        try:
            close = text.index(")")
            level = int(text[1:close])
            body = text[close + 1 :].strip()
            if not (text.startswith("(") and body.startswith("[") and body.endswith("]")):
                raise ValueError(text)
        except ValueError as exc:
            raise UsageError(f"cannot parse {text!r} as (k)[...]") from exc
        inner = body[1:-1]
        vals = [self.group.parse(p) for p in split_top_level(inner)] if inner.strip() else []
        return self.element(level, vals)


def _small_positive(G):
    if G.kind is Kind.AFFINE_RATIONAL:
        return (Fraction(2), Fraction(0))
    if G.kind is Kind.INT_VECTORS:
        return (1,) * G.dim
    if G.kind is Kind.LEX_INT:
        return (0, 1)
    if G.kind is Kind.INTEGERS:
        return 1
    return ()


class NPerfectAlgebra(PeaUniverse):
    """The interval ``[0, (n, e)]`` of a lexicographic extension."""

    def __init__(self, lex: LexGroup, n: int):
        if type(n) is not int or n < 1:
            raise UsageError(f"n must be a positive integer, got {n!r}")
        self.lex = lex
        self.n = n
        self.group = lex.group
        self.m = lex.m
        self._known = set()

    @classmethod
    def build(cls, group, m, phi, n):
        return cls(LexGroup(group, m, phi), n)

    @property
    def phi(self):
        return self.lex.phi

    def __repr__(self):
        return f"NPerfectAlgebra({self.group}, m={self.m}, phi={list(self.phi)}, n={self.n})"

    __str__ = __repr__

    @property
    def zero(self):
        return self.lex.identity

    @property
    def one(self):
        return LexElement(self.n, (self.group.identity,) * self.m)

    def is_member(self, x):
        if not self.lex.is_member(x) or not 0 <= x.level <= self.n:
            return False
        G = self.group
        if x.level == 0 and not all(G._is_positive(v) for v in x.values):
            return False
        if x.level == self.n and not all(G._leq(v, G.identity) for v in x.values):
            return False
        return True

    def element(self, level, values):
        x = self.lex.element(level, values)
        if not self.is_member(x):
            raise UsageError(f"{self.render(x)} is not in {self}")
        return x

    def _check(self, *xs):
        for x in xs:
            if x in self._known:
                continue
            if not self.is_member(x):
                raise UsageError(f"{x!r} is not an element of {self}")
            if len(self._known) > 1 << 20:
                self._known.clear()
            self._known.add(x)

    def slice_of(self, x):
        self._check(x)
        return x.level

    def add(self, a, b):
        self._check(a, b)
        if a.level + b.level > self.n:
            return None
        z = self.lex.mul(a, b)
        return z if self.is_member(z) else None

    def leq(self, a, b):
        self._check(a, b)
        return self.lex.leq(a, b)

    def negations(self, a):
        self._check(a)
        L = self.lex
        inv = L.inv(a)
        return L.mul(self.one, inv), L.mul(inv, self.one)

    def diffs(self, a, b):
        if not self.leq(a, b):
            return None, None
        L = self.lex
        return L.mul(b, L.inv(a)), L.mul(L.inv(a), b)

    @property
    def lattice_ordered(self):
        return self.group.lattice_ordered

    def meet(self, a, b):
        self._check(a, b)
        return self.lex.meet(a, b)

    def join(self, a, b):
        self._check(a, b)
        return self.lex.join(a, b)

    @property
    def enumerable(self):
        return self.group.enumerable_intervals

    def level_values(self, k, bound):
        """Admissible value tuples at level ``k`` in canonical order."""
        G = self.group
        if k == 0:
            base = G.positive_ball(bound)
        elif k == self.n:
            base = G.negative_ball(bound)
        else:
            base = G.ball(bound)
        return itertools.product(base, repeat=self.m)

    def window(self, bound):
        return [LexElement(k, v) for k in range(self.n + 1) for v in self.level_values(k, bound)]

    def window_size(self, bound):
        G = self.group
        half = G.half_ball_size(bound) ** self.m
        full = G.ball_size(bound) ** self.m
        return 2 * half + (self.n - 1) * full

    def random_element(self, rng, bound):
        G = self.group
        k = rng.randint(0, self.n)
        cone = "+" if k == 0 else "-" if k == self.n else None
        return LexElement(k, tuple(G.random_element(rng, bound, cone) for _ in range(self.m)))

    def render(self, x):
        return self.lex.render(x)

    def parse(self, text):
        x = self.lex.parse(text)
        if not self.is_member(x):
            raise UsageError(f"{text!r} is not in {self}")
        return x

    # batch paths -------------------------------------------------------

    def _encodable(self):
        return self.group.kind in (Kind.INTEGERS, Kind.INT_VECTORS) and self.m > 0

    def encode(self, elements):
        """``(levels, values)`` int64 arrays; values have shape ``(N, m, d)``."""
        d = self.group.dim
        levels = np.fromiter((x.level for x in elements), dtype=np.int64, count=len(elements))
        vals = np.zeros((len(elements), self.m, d), dtype=np.int64)
        for k, x in enumerate(elements):
            for i, v in enumerate(x.values):
                vals[k, i, :] = v if d > 1 else (v,)
        return levels, vals

    def addition_codes(self, elements):
        if not self._encodable():
            return None
        levels, vals = self.encode(elements)
        n_el = len(elements)
        span = int(np.abs(vals).max()) if vals.size else 0
        radix, offset = 4 * span + 1, 2 * span
        width = self.m * self.group.dim
        if (2 * self.n + 1) * radix**width >= 2**62:
            return None
        flat = vals.reshape(n_el, -1)

        def keys(lv, fl):
            key = lv.copy()
            for c in range(fl.shape[1]):
                key = key * radix + (fl[:, c] + offset)
            return key

        perms = {k: np.array(self.lex.power(k), dtype=np.int64) for k in range(self.n + 1)}
        defined = np.zeros((n_el, n_el), dtype=bool)
        out = np.zeros((n_el, n_el), dtype=np.int64)
        for i in range(n_el):
            k = int(levels[i])
            res_lv = levels + k
            res = vals[i][None] + vals[:, perms[k], :]
            ok = res_lv <= self.n
            ok &= (res_lv != 0) | np.all(res >= 0, axis=(1, 2))
            ok &= (res_lv != self.n) | np.all(res <= 0, axis=(1, 2))
            defined[i] = ok
            out[i] = keys(res_lv, res.reshape(n_el, -1))
        return defined, out, keys(levels, flat)

    def order_codes(self, elements):
        if not self._encodable():
            return None
        levels, vals = self.encode(elements)
        flat = vals.reshape(len(elements), -1)
        le = np.zeros((len(elements),) * 2, dtype=bool)
        for i in range(len(elements)):
            le[i] = (levels[i] < levels) | ((levels[i] == levels) & np.all(flat[i][None] <= flat, axis=1))
        return le


def canonical_state(A: NPerfectAlgebra):
    """The state ``(k, x) -> k/n``."""
    n = A.n
    return StateMap(lambda x: Fraction(x.level, n), f"level/{n}")


def check_slices(A: NPerfectAlgebra, bound=None, *, samples=None, seed=0):
    """Verify the slice structure of an n-perfect algebra on a window.

    Checks the partition into levels, the ordering of slices, the defined
    and undefined sums by level, the negation formulas, that ``E_0`` is a
    normal ideal, and the canonical state.
    """
    report = CheckReport("slices")
    with timed(report):
        elems = elements_for(A, bound, samples, seed)
        r = A.render
        n = A.n
        G = A.group
        e = G.identity
        L = A.lex

        def in_slice(x, k):
            if x.level != k:
                return False
            if k == 0:
                return all(G._is_positive(v) for v in x.values)
            if k == n:
                return all(G._leq(v, e) for v in x.values)
            return True

        bad = next(
            (x for x in elems if sum(in_slice(x, k) for k in range(n + 1)) != 1),
            None,
        )
        report.add("slices partition the window", bad is None, bad and f"a={r(bad)}", f"{len(elems)} elements")

        by_level = [[x for x in elems if x.level == k] for k in range(n + 1)]
        bad = None
        for k in range(n + 1):
            for j in range(k + 1, n + 1):
                for x in by_level[k]:
                    y = next((y for y in by_level[j] if not A.leq(x, y)), None)
                    if y is not None:
                        bad = f"a={r(x)} in E_{k}, b={r(y)} in E_{j}: a not below b"
                        break
                if bad:
                    break
            if bad:
                break
        report.add("lower slices lie below higher ones", bad is None, bad)

        bad_low = bad_high = bad_edge = None
        edge_defined = edge_total = 0
        for x in elems:
            for y in elems:
                s = A.add(x, y)
                k, j = x.level, y.level
                if k + j < n:
                    if s is None or s.level != k + j:
                        bad_low = bad_low or f"a={r(x)}, b={r(y)}: sum missing or off level"
                elif k + j > n:
                    if s is not None:
                        bad_high = bad_high or f"a={r(x)}, b={r(y)}: sum defined above the unit"
                else:
                    edge_total += 1
                    if s is not None:
                        edge_defined += 1
                        expected = L.mul(x, y)
                        if s != expected or not in_slice(s, n):
                            bad_edge = bad_edge or f"a={r(x)}, b={r(y)}: sum not in E_{n}"
                    elif A.is_member(L.mul(x, y)):
                        bad_edge = bad_edge or f"a={r(x)}, b={r(y)}: sum wrongly undefined"
        report.add("sums below level n are defined on the sum level", bad_low is None, bad_low)
        report.add("sums above level n are undefined", bad_high is None, bad_high)
        report.add(
            "sums reaching level n exist exactly when the product lies in E_n",
            bad_edge is None,
            bad_edge,
            f"{edge_defined} of {edge_total} defined",
        )

        bad = None
        for x in elems:
            minus, tilde = A.negations(x)
            k = x.level
            p_minus = L.power(n - k)
            p_tilde = L.power(-k)
            want_minus = LexElement(n - k, tuple(G._inv(x.values[p_minus[i]]) for i in range(A.m)))
            want_tilde = LexElement(n - k, tuple(G._inv(x.values[p_tilde[i]]) for i in range(A.m)))
            if minus != want_minus or tilde != want_tilde:
                bad = f"a={r(x)}: negations {r(minus)}, {r(tilde)} differ from the level formulas"
                break
            if A.add(minus, x) != A.one or A.add(x, tilde) != A.one:
                bad = f"a={r(x)}: negations do not sum to the unit"
                break
            if not (in_slice(minus, n - k) and in_slice(tilde, n - k)):
                bad = f"a={r(x)}: negations leave E_{n - k}"
                break
        report.add("negations map E_k onto E_(n-k)", bad is None, bad)

        sub = check_normal_ideal(A, lambda x: x.level == 0, elements=elems)
        for c in sub.checks:
            report.checks.append(type(c)(f"E_0 {c.name}", c.status, c.counterexample, c.detail))

        sub = check_state(A, canonical_state(A), elements=elems)
        for c in sub.checks:
            report.checks.append(type(c)(f"state k/n {c.name}", c.status, c.counterexample, c.detail))
    return report
