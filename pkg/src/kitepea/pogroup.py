"""Partially ordered groups, written multiplicatively.

Each :class:`PoGroup` is a small immutable descriptor; group elements are
plain Python values whose shape depends on the kind:

* ``integers``        ``int``
* ``int_vectors``     ``tuple`` of ``d`` ints, ordered componentwise
* ``lex_int``         ``(p, q)`` ints, ordered lexicographically
* ``affine_rational`` ``(a, b)`` Fractions with ``a > 0``; the map ``t -> a t + b``
* ``trivial``         ``()``

The affine group composes as ``(a, b)(c, d) = (ac, ad + b)``. Its positive cone
is ``a > 1`` or ``a == 1, b >= 0``, which makes it a non-abelian linearly
ordered group.
"""

from __future__ import annotations

import itertools
import operator
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import NotEnumerableError, NotLatticeError, UsageError


class Kind(str, Enum):
    INTEGERS = "integers"
    INT_VECTORS = "int_vectors"
    LEX_INT = "lex_int"
    AFFINE_RATIONAL = "affine_rational"
    TRIVIAL = "trivial"


class RdpClass(str, Enum):
    """Riesz-type refinement properties, weakest first."""

    RIP = "RIP"
    RDP0 = "RDP0"
    RDP = "RDP"
    RDP1 = "RDP1"
    RDP2 = "RDP2"

    @property
    def strength(self):
        return _STRENGTH[self]


_STRENGTH = {RdpClass.RIP: 0, RdpClass.RDP0: 0, RdpClass.RDP: 1, RdpClass.RDP1: 2, RdpClass.RDP2: 3}


@dataclass(frozen=True)
class RefinementTable:
    """A 2x2 table with rows summing to ``a1, a2`` and columns to ``b1, b2``."""

    c11: object
    c12: object
    c21: object
    c22: object

    def entries(self):
        return (self.c11, self.c12, self.c21, self.c22)

    def transpose(self):
        return RefinementTable(self.c11, self.c21, self.c12, self.c22)


class Verdict(NamedTuple):
    """A tri-state answer; ``value`` is ``None`` when undecided."""

    value: Optional[bool]
    witness: Optional[tuple] = None


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise UsageError(f"not a rational: {x!r}")


def render_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class PoGroup:
    """Descriptor of a partially ordered group of one of the shipped kinds."""

    kind: Kind
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.INT_VECTORS:
            if type(self.dim) is not int or self.dim < 1:
                raise UsageError(f"int_vectors needs a positive dimension, got {self.dim!r}")
        elif self.dim != 1:
            raise UsageError(f"{self.kind.value} takes no dimension")
        for name, fn in _FAST[self.kind].items():
            object.__setattr__(self, name, fn)

    # constructors -----------------------------------------------------

    @classmethod
    def integers(cls):
        return cls(Kind.INTEGERS)

    @classmethod
    def int_vectors(cls, d):
        return cls(Kind.INT_VECTORS, d)

    @classmethod
    def lex_int(cls):
        return cls(Kind.LEX_INT)

    @classmethod
    def affine_rational(cls):
        return cls(Kind.AFFINE_RATIONAL)

    @classmethod
    def trivial(cls):
        return cls(Kind.TRIVIAL)

    # flags ------------------------------------------------------------

    @property
    def known_subdirectly_irreducible(self):
        """``True``/``False`` when known, ``None`` when undetermined."""
        k = self.kind
        if k is Kind.INT_VECTORS:
            return self.dim == 1
        if k is Kind.AFFINE_RATIONAL:
            return None
        return True

    @property
    def enumerable_intervals(self):
        return self.kind in (Kind.INTEGERS, Kind.INT_VECTORS, Kind.TRIVIAL)

    @property
    def lattice_ordered(self):
        return True

    @property
    def abelian(self):
        return self.kind is not Kind.AFFINE_RATIONAL

    @property
    def linearly_ordered(self):
        return self.kind in (Kind.INTEGERS, Kind.LEX_INT, Kind.AFFINE_RATIONAL, Kind.TRIVIAL) or (
            self.kind is Kind.INT_VECTORS and self.dim == 1
        )

    @property
    def is_trivial(self):
        return self.kind is Kind.TRIVIAL

    def __str__(self):
        if self.kind is Kind.INT_VECTORS:
            return f"int_vectors({self.dim})"
        return self.kind.value

    # elements ---------------------------------------------------------

    @property
    def identity(self):
        k = self.kind
        if k is Kind.INTEGERS:
            return 0
        if k is Kind.INT_VECTORS:
            return (0,) * self.dim
        if k is Kind.LEX_INT:
            return (0, 0)
        if k is Kind.AFFINE_RATIONAL:
            return (Fraction(1), Fraction(0))
        return ()

    def coerce(self, g):
        """Normalise a user-supplied value to the canonical element shape."""
        k = self.kind
        if k is Kind.AFFINE_RATIONAL:
            if not isinstance(g, (tuple, list)) or len(g) != 2:
                raise UsageError(f"not an affine element: {g!r}")
            a, b = _frac(g[0]), _frac(g[1])
            if a <= 0:
                raise UsageError(f"affine element needs a positive slope: {g!r}")
            return (a, b)
        if k in (Kind.INT_VECTORS, Kind.LEX_INT) and isinstance(g, list):
            g = tuple(g)
        self.validate(g)
        return g

    def is_member(self, g):
        k = self.kind
        if k is Kind.INTEGERS:
            return type(g) is int
        if k is Kind.INT_VECTORS:
            return type(g) is tuple and len(g) == self.dim and all(type(x) is int for x in g)
        if k is Kind.LEX_INT:
            return type(g) is tuple and len(g) == 2 and all(type(x) is int for x in g)
        if k is Kind.AFFINE_RATIONAL:
            return (
                type(g) is tuple
                and len(g) == 2
                and all(isinstance(x, Fraction) for x in g)
                and g[0] > 0
            )
        return g == ()

    def validate(self, g):
        if not self.is_member(g):
            raise UsageError(f"{g!r} is not an element of {self}")

    def mul(self, g, h):
        self.validate(g)
        self.validate(h)
        return self._mul(g, h)

    def inv(self, g):
        self.validate(g)
        return self._inv(g)

    def div_left(self, g, h):
        """``g^-1 h``."""
        return self.mul(self.inv(g), h)

    def div_right(self, g, h):
        """``g h^-1``."""
        return self.mul(g, self.inv(h))

    def is_positive(self, g):
        self.validate(g)
        return self._is_positive(g)

    def leq(self, g, h):
        """``g <= h`` iff ``g^-1 h`` lies in the positive cone."""
        self.validate(g)
        self.validate(h)
        return self._leq(g, h)

    def lt(self, g, h):
        return g != h and self.leq(g, h)

    def meet(self, g, h):
        self.validate(g)
        self.validate(h)
        if self.kind is Kind.INT_VECTORS:
            return tuple(min(x, y) for x, y in zip(g, h))
        return g if self.leq(g, h) else h

    def join(self, g, h):
        self.validate(g)
        self.validate(h)
        if self.kind is Kind.INT_VECTORS:
            return tuple(max(x, y) for x, y in zip(g, h))
        return h if self.leq(g, h) else g

    def lower_bound(self, gs):
        """A common lower bound; the meet in every shipped kind."""
        gs = list(gs)
        if not gs:
            raise UsageError("lower_bound needs at least one element")
        out = gs[0]
        for g in gs[1:]:
            out = self.meet(out, g)
        return out

    def upper_bound(self, gs):
        gs = list(gs)
        if not gs:
            raise UsageError("upper_bound needs at least one element")
        out = gs[0]
        for g in gs[1:]:
            out = self.join(out, g)
        return out

    # enumeration ------------------------------------------------------

    def enumerate_interval(self, lo, hi):
        """List ``[lo, hi]`` in canonical (row-major ascending) order."""
        if not self.enumerable_intervals:
            raise NotEnumerableError(f"intervals of {self} are infinite")
        self.validate(lo)
        self.validate(hi)
        k = self.kind
        if k is Kind.TRIVIAL:
            return [()]
        if k is Kind.INTEGERS:
            return list(range(lo, hi + 1))
        ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
        return [tuple(t) for t in itertools.product(*ranges)]

    def generator_power(self, bound):
        """The element bounding the ball of radius ``bound``."""
        k = self.kind
        if k is Kind.INTEGERS:
            return bound
        if k is Kind.INT_VECTORS:
            return (bound,) * self.dim
        if k is Kind.TRIVIAL:
            return ()
        raise NotEnumerableError(f"{self} has no bounded balls")

    def ball(self, bound):
        g = self.generator_power(bound)
        return self.enumerate_interval(self._inv(g), g)

    def positive_ball(self, bound):
        return self.enumerate_interval(self.identity, self.generator_power(bound))

    def negative_ball(self, bound):
        return self.enumerate_interval(self._inv(self.generator_power(bound)), self.identity)

    def ball_size(self, bound):
        """Number of elements in ``ball(bound)``, without building it."""
        k = self.kind
        if k is Kind.TRIVIAL:
            return 1
        if k is Kind.INTEGERS:
            return 2 * bound + 1
        if k is Kind.INT_VECTORS:
            return (2 * bound + 1) ** self.dim
        raise NotEnumerableError(f"{self} has no bounded balls")

    def half_ball_size(self, bound):
        k = self.kind
        if k is Kind.TRIVIAL:
            return 1
        if k is Kind.INTEGERS:
            return bound + 1
        if k is Kind.INT_VECTORS:
            return (bound + 1) ** self.dim
        raise NotEnumerableError(f"{self} has no bounded balls")

    # sampling ---------------------------------------------------------

    _AFFINE_SLOPES = tuple(Fraction(s) for s in ("1/3", "1/2", "2/3", "1", "3/2", "2", "3"))
    _AFFINE_SHIFTS = tuple(Fraction(s) for s in ("-2", "-1", "-1/2", "0", "1/2", "1", "2"))

    def random_element(self, rng: random.Random, bound=2, cone=None):
        """Draw an element; ``cone`` is ``None``, ``"+"`` or ``"-"``."""
        g = self._draw(rng, bound)
        if cone is None:
            return g
        if self.kind is Kind.INT_VECTORS:
            g = tuple(abs(x) for x in g)
        elif not self._is_positive(g):
            g = self._inv(g)
        return g if cone == "+" else self._inv(g)

    def _draw(self, rng, bound):
        k = self.kind
        if k is Kind.INTEGERS:
            return rng.randint(-bound, bound)
        if k is Kind.INT_VECTORS:
            return tuple(rng.randint(-bound, bound) for _ in range(self.dim))
        if k is Kind.LEX_INT:
            return (rng.randint(-bound, bound), rng.randint(-bound, bound))
        if k is Kind.AFFINE_RATIONAL:
            return (rng.choice(self._AFFINE_SLOPES), rng.choice(self._AFFINE_SHIFTS))
        return ()

    # commutation ------------------------------------------------------

    def com(self, a, b):
        """Do ``[e, a]`` and ``[e, b]`` commute elementwise?

        Abelian kinds answer ``True``. The affine group answers ``True`` when
        both intervals lie in the translation subgroup, ``False`` with a
        witness when one is found among structured candidates, and ``None``
        otherwise.
        """
        if not (self.is_positive(a) and self.is_positive(b)):
            raise UsageError("com expects positive elements")
        if self.abelian or a == self.identity or b == self.identity:
            return Verdict(True)
        if a[0] == 1 and b[0] == 1:
            return Verdict(True)
        for x in self._interval_probe(a):
            for y in self._interval_probe(b):
                if self._mul(x, y) != self._mul(y, x):
                    return Verdict(False, (x, y))
        return Verdict(None)

    def _interval_probe(self, p):
        """Deterministic elements of ``[e, p]`` in the affine group."""
        e = self.identity
        a, b = p
        cands = [e, p]
        if a == 1:
            cands += [(Fraction(1), b / 2)]
        else:
            mid = (1 + a) / 2
            cands += [
                (Fraction(1), Fraction(1)),
                (Fraction(1), Fraction(2)),
                (mid, Fraction(0)),
                (mid, Fraction(1)),
                (mid, Fraction(-1)),
                (a, b - 1),
            ]
        out = []
        for c in cands:
            if c not in out and self._is_positive(c) and self._is_positive(self._mul(self._inv(c), p)):
                out.append(c)
        return out

    # refinement -------------------------------------------------------

    def refine(self, a1, a2, b1, b2, cls=RdpClass.RDP1):
        """A table refining ``a1 a2 = b1 b2`` whose entries are positive.

        Enumerable abelian kinds search ``c11`` over ``[e, a1]`` in canonical
        order and return the first table meeting ``cls``. Linearly ordered
        kinds use the two-case rule: put ``a1`` or ``b1`` in the corner, so one
        off-diagonal entry is the identity.
        """
        from .rdp import verify_table

        cls = RdpClass(cls)
        for g in (a1, a2, b1, b2):
            if not self.is_positive(g):
                raise UsageError(f"refine expects positive elements, got {self.render(g)}")
        if self._mul(a1, a2) != self._mul(b1, b2):
            raise UsageError("refine expects a1 a2 == b1 b2")
        if self.enumerable_intervals:
            for c11 in self.enumerate_interval(self.identity, a1):
                c12 = self._mul(self._inv(c11), a1)
                c21 = self._mul(self._inv(c11), b1)
                c22 = self._mul(self._inv(c21), a2)
                t = RefinementTable(c11, c12, c21, c22)
                if verify_table(self, t, a1, a2, b1, b2, cls) is True:
                    return t
            return None
        e = self.identity
        if self.leq(a1, b1):
            t = RefinementTable(a1, e, self._mul(self._inv(a1), b1), b2)
        else:
            t = RefinementTable(b1, self._mul(self._inv(b1), a1), e, a2)
        return t if verify_table(self, t, a1, a2, b1, b2, cls) is True else None

    # rendering --------------------------------------------------------

    def render(self, g):
        k = self.kind
        if k is Kind.INTEGERS:
            return str(g)
        if k is Kind.TRIVIAL:
            return "e"
        if k is Kind.AFFINE_RATIONAL:
            return f"({render_rational(g[0])},{render_rational(g[1])})"
        return "(" + ",".join(str(x) for x in g) + ")"

    def parse(self, text):
        """Inverse of :meth:`render`."""
        text = text.strip()
        k = self.kind
        try:
            if k is Kind.TRIVIAL:
                if text not in ("e", "()"):
                    raise ValueError(text)
                return ()
            if k is Kind.INTEGERS:
                return int(text)
            inner = text[1:-1] if text.startswith("(") and text.endswith(")") else text
            parts = [p.strip() for p in inner.split(",")]
            if k is Kind.AFFINE_RATIONAL:
                return self.coerce(tuple(Fraction(p) for p in parts))
            return self.coerce(tuple(int(p) for p in parts))
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"cannot parse {text!r} as an element of {self}") from exc

    def lattice_check(self):
        if not self.lattice_ordered:
            raise NotLatticeError(f"{self} is not lattice ordered")


def _int_pos(g):
    return g >= 0


def _unit_mul(g, h):
    return ()


def _unit_inv(g):
    return ()


def _always(*_):
    return True


def _vec_mul(g, h):
    return tuple(map(operator.add, g, h))


def _vec_inv(g):
    return tuple(map(operator.neg, g))


def _vec_leq(g, h):
    return all(map(operator.le, g, h))


def _vec_pos(g):
    return all(x >= 0 for x in g)


def _lex_pos(g):
    return g[0] > 0 or (g[0] == 0 and g[1] >= 0)


def _aff_mul(g, h):
    return (g[0] * h[0], g[0] * h[1] + g[1])


def _aff_inv(g):
    return (1 / g[0], -g[1] / g[0])


def _aff_pos(g):
    return g[0] > 1 or (g[0] == 1 and g[1] >= 0)


def _aff_leq(g, h):
    # g^-1 h = (h0/g0, (h1 - g1)/g0) with g0 > 0
    q = h[0] / g[0]
    return q > 1 or (q == 1 and h[1] >= g[1])


# Per-kind unchecked primitives, bound onto each descriptor as instance attributes.
_FAST = {
    Kind.INTEGERS: {
        "_mul": operator.add,
        "_inv": operator.neg,
        "_leq": operator.le,
        "_is_positive": _int_pos,
    },
    Kind.INT_VECTORS: {"_mul": _vec_mul, "_inv": _vec_inv, "_leq": _vec_leq, "_is_positive": _vec_pos},
    Kind.LEX_INT: {"_mul": _vec_mul, "_inv": _vec_inv, "_leq": operator.le, "_is_positive": _lex_pos},
    Kind.AFFINE_RATIONAL: {"_mul": _aff_mul, "_inv": _aff_inv, "_leq": _aff_leq, "_is_positive": _aff_pos},
    Kind.TRIVIAL: {
        "_mul": _unit_mul,
        "_inv": _unit_inv,
        "_leq": _always,
        "_is_positive": _always,
    },
}
