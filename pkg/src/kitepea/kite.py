"""Kite pseudo effect algebras.

A kite over a po-group ``G`` and an index set ``I = {0..m-1}`` with two
bijections ``lam`` and ``rho`` is the disjoint union of a *Lower* copy of
``(G+)^I`` and an *Upper* copy of ``(G-)^I``. Upper values are stored as the
negative-cone elements themselves. The addition is:

* Upper + Upper is undefined;
* ``U<s> + L<f> = U<s_i f_{rho^-1(i)}>`` when ``f_{rho^-1(i)} <= s_i^-1`` for all i;
* ``L<f> + U<s> = U<f_{lam^-1(i)} s_i>`` when ``f_{lam^-1(i)} <= s_i^-1`` for all i;
* Lower + Lower is componentwise.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np

from .errors import UsageError
from .pea import PeaUniverse
from .permutation import Permutation
from .pogroup import Kind, PoGroup

LOWER = "L"
UPPER = "U"
_CACHE_LIMIT = 1 << 20


class KiteElement(NamedTuple):
    cone: str
    values: tuple

    @property
    def is_lower(self):
        return self.cone == LOWER


def lower(*values):
    return KiteElement(LOWER, tuple(values))


def upper(*values):
    return KiteElement(UPPER, tuple(values))


def _perm(p, m, name):
    if not isinstance(p, Permutation):
        try:
            p = Permutation(tuple(p))
        except UsageError as exc:
            raise UsageError(f"not a bijection at {name}: {exc}") from None
    if len(p) != m:
        raise UsageError(f"{name} has length {len(p)}, expected {m}")
    return p


class KiteAlgebra(PeaUniverse):
    """The kite built from ``G``, ``m`` indices and the bijections ``lam``, ``rho``."""

    def __init__(self, group: PoGroup, m: int, lam, rho):
        if type(m) is not int or m < 0:
            raise UsageError(f"index size must be a non-negative integer, got {m!r}")
        self.group = group
        self.m = m
        self.lam = _perm(lam, m, "lambda")
        self.rho = _perm(rho, m, "rho")
        self._lam = self.lam.images
        self._rho = self.rho.images
        self._lam_inv = self.lam.inverse().images
        self._rho_inv = self.rho.inverse().images
        self._known = set()

    def __repr__(self):
        return f"KiteAlgebra({self.group}, m={self.m}, lam={list(self._lam)}, rho={list(self._rho)})"

    __str__ = __repr__

    # structure -------------------------------------------------------

    @property
    def zero(self):
        return KiteElement(LOWER, (self.group.identity,) * self.m)

    @property
    def one(self):
        return KiteElement(UPPER, (self.group.identity,) * self.m)

    def is_member(self, x):
        if not isinstance(x, KiteElement) or x.cone not in (LOWER, UPPER) or len(x.values) != self.m:
            return False
        G = self.group
        if not all(G.is_member(v) for v in x.values):
            return False
        if x.cone == LOWER:
            return all(G._is_positive(v) for v in x.values)
        e = G.identity
        return all(G._is_positive(G._inv(v)) or v == e for v in x.values)

    def element(self, cone, values):
        """Build and validate an element from raw values."""
        G = self.group
        x = KiteElement(cone, tuple(G.coerce(v) for v in values))
        if not self.is_member(x):
            raise UsageError(f"{self.render(x)} is not in the kite")
        return x

    def _check(self, *xs):
        known = self._known
        for x in xs:
            if x in known:
                continue
            if not self.is_member(x):
                raise UsageError(f"{x!r} is not an element of {self}")
            if len(known) > _CACHE_LIMIT:
                known.clear()
            known.add(x)

    def add(self, a, b):
        self._check(a, b)
        G = self.group
        if a.cone == UPPER:
            if b.cone == UPPER:
                return None
            s, f = a.values, b.values
            out = []
            for i in range(self.m):
                fi = f[self._rho_inv[i]]
                if not G._leq(fi, G._inv(s[i])):
                    return None
                out.append(G._mul(s[i], fi))
            return KiteElement(UPPER, tuple(out))
        if b.cone == UPPER:
            f, s = a.values, b.values
            out = []
            for i in range(self.m):
                fi = f[self._lam_inv[i]]
                if not G._leq(fi, G._inv(s[i])):
                    return None
                out.append(G._mul(fi, s[i]))
            return KiteElement(UPPER, tuple(out))
        return KiteElement(LOWER, tuple(G._mul(x, y) for x, y in zip(a.values, b.values)))

    def leq(self, a, b):
        self._check(a, b)
        if a.cone != b.cone:
            return a.cone == LOWER
        G = self.group
        return all(G._leq(x, y) for x, y in zip(a.values, b.values))

    def negations(self, a):
        self._check(a)
        G = self.group
        v = a.values
        r = range(self.m)
        if a.cone == UPPER:
            minus = KiteElement(LOWER, tuple(G._inv(v[self._lam[i]]) for i in r))
            tilde = KiteElement(LOWER, tuple(G._inv(v[self._rho[i]]) for i in r))
        else:
            minus = KiteElement(UPPER, tuple(G._inv(v[self._rho_inv[i]]) for i in r))
            tilde = KiteElement(UPPER, tuple(G._inv(v[self._lam_inv[i]]) for i in r))
        return minus, tilde

    def diffs(self, a, b):
        if not self.leq(a, b):
            return None, None
        G = self.group
        x, y = a.values, b.values
        r = range(self.m)

        def q(g, h):  # g^-1 h
            return G._mul(G._inv(g), h)

        def p(g, h):  # g h^-1
            return G._mul(g, G._inv(h))

        if a.cone == b.cone == LOWER:
            left = KiteElement(LOWER, tuple(p(y[i], x[i]) for i in r))
            right = KiteElement(LOWER, tuple(q(x[i], y[i]) for i in r))
        elif a.cone == LOWER:
            left = KiteElement(UPPER, tuple(p(y[i], x[self._rho_inv[i]]) for i in r))
            right = KiteElement(UPPER, tuple(q(x[self._lam_inv[i]], y[i]) for i in r))
        else:
            left = KiteElement(LOWER, tuple(p(y[self._lam[j]], x[self._lam[j]]) for j in r))
            right = KiteElement(LOWER, tuple(q(x[self._rho[j]], y[self._rho[j]]) for j in r))
        return left, right

    @property
    def lattice_ordered(self):
        return self.group.lattice_ordered

    def meet(self, a, b):
        self._check(a, b)
        if a.cone != b.cone:
            return a if a.cone == LOWER else b
        G = self.group
        return KiteElement(a.cone, tuple(G.meet(x, y) for x, y in zip(a.values, b.values)))

    def join(self, a, b):
        self._check(a, b)
        if a.cone != b.cone:
            return a if a.cone == UPPER else b
        G = self.group
        return KiteElement(a.cone, tuple(G.join(x, y) for x, y in zip(a.values, b.values)))

    # enumeration -----------------------------------------------------

    @property
    def enumerable(self):
        return self.group.enumerable_intervals

    def window(self, bound):
        """All Lower elements with values in ``[e, g^B]`` then all Upper ones in ``[g^-B, e]``."""
        G = self.group
        pos = G.positive_ball(bound)
        neg = G.negative_ball(bound)
        out = [KiteElement(LOWER, t) for t in itertools.product(pos, repeat=self.m)]
        out += [KiteElement(UPPER, t) for t in itertools.product(neg, repeat=self.m)]
        return out

    def window_size(self, bound):
        return 2 * self.group.half_ball_size(bound) ** self.m

    def random_element(self, rng, bound):
        cone = rng.choice((LOWER, UPPER))
        G = self.group
        sign = "+" if cone == LOWER else "-"
        return KiteElement(cone, tuple(G.random_element(rng, bound, sign) for _ in range(self.m)))

    def render(self, x):
        G = self.group
        return f"{x.cone}[" + ",".join(G.render(v) for v in x.values) + "]"

    def parse(self, text):
        text = text.strip()
        if len(text) < 3 or text[0] not in (LOWER, UPPER) or text[1] != "[" or text[-1] != "]":
            raise UsageError(f"cannot parse {text!r} as a kite element")
        from .lexext import split_top_level

        vals = [self.group.parse(p) for p in split_top_level(text[2:-1])] if text[2:-1].strip() else []
        return self.element(text[0], vals)

    # batch addition --------------------------------------------------

    def _encodable(self):
        return self.group.kind in (Kind.INTEGERS, Kind.INT_VECTORS)

    def _flat(self, elements):
        d = self.group.dim
        arr = np.zeros((len(elements), self.m, d), dtype=np.int64)
        cones = np.zeros(len(elements), dtype=np.int64)
        for k, x in enumerate(elements):
            cones[k] = 1 if x.cone == UPPER else 0
            for i, v in enumerate(x.values):
                arr[k, i, :] = v if d > 1 else (v,)
        return cones, arr

    @staticmethod
    def _keys(cones, arr, radix, offset):
        flat = arr.reshape(len(arr), -1) + offset
        key = cones.copy()
        for c in range(flat.shape[1]):
            key = key * radix + flat[:, c]
        return key

    def addition_codes(self, elements):
        if not self._encodable() or self.m == 0:
            return None
        cones, arr = self._flat(elements)
        span = int(np.abs(arr).max()) if arr.size else 0
        radix, offset = 4 * span + 1, 2 * span
        if 2 * radix ** (self.m * self.group.dim) >= 2**62:
            return None
        n = len(elements)
        lam_inv = np.array(self._lam_inv, dtype=np.int64)
        rho_inv = np.array(self._rho_inv, dtype=np.int64)
        defined = np.zeros((n, n), dtype=bool)
        keys = np.zeros((n, n), dtype=np.int64)
        is_up = cones == 1
        for i in range(n):
            a = arr[i]
            if is_up[i]:
                # U<s> + L<f>
                f = arr[:, rho_inv, :]
                ok = (~is_up) & np.all(f <= -a[None], axis=(1, 2))
                res = a[None] + f
                rc = np.ones(n, dtype=np.int64)
            else:
                f = a[lam_inv][None]
                ok_u = is_up & np.all(f <= -arr, axis=(1, 2))
                res = np.where(is_up[:, None, None], f + arr, a[None] + arr)
                ok = ok_u | ~is_up
                rc = is_up.astype(np.int64)
            defined[i] = ok
            keys[i] = self._keys(rc, res, radix, offset)
        return defined, keys, self._keys(cones, arr, radix, offset)

    def order_codes(self, elements):
        if not self._encodable():
            return None
        cones, arr = self._flat(elements)
        flat = arr.reshape(len(arr), -1)
        n = len(elements)
        le = np.zeros((n, n), dtype=bool)
        up = cones == 1
        for i in range(n):
            same = (cones == cones[i]) & np.all(flat[i][None] <= flat, axis=1)
            le[i] = same | (up if not up[i] else False)
        return le
