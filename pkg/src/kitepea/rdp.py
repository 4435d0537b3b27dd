"""Riesz decomposition: table verification, searches and the constructive refinement.

An *ambient* supplies what a refinement table needs: a (partial) product,
left quotients, positivity, the ``com`` relation and, optionally, meets and
an enumeration of corner candidates. Po-groups, n-perfect algebras (through
their lexicographic group) and arbitrary pseudo effect algebras each get an
adapter; :func:`ambient_for` picks the right one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NotEnumerableError, NotLatticeError, UsageError
from .lexext import LexElement, LexGroup, NPerfectAlgebra
from .pea import CheckReport, PeaUniverse, order_matrix, timed
from .pogroup import PoGroup, RdpClass, RefinementTable, Verdict


__all__ = [
    "RdpClass",
    "RefinementTable",
    "LexRefinement",
    "Classification",
    "ambient_for",
    "verify_table",
    "table_defects",
    "transpose_table",
    "brute_refine",
    "check_rip",
    "lex_refine_rdp1",
    "classify_rdp",
    "rip_sweep",
    "render_table",
]


# ----------------------------------------------------------------------
# ambients


class GroupAmbient:
    """Refinement inside the positive cone of a po-group."""

    def __init__(self, group: PoGroup):
        self.group = group
        self.identity = group.identity

    def compose(self, x, y):
        return self.group.mul(x, y)

    def quotient(self, c, a):
        """The ``z`` with ``c z = a``."""
        return self.group.mul(self.group.inv(c), a)

    def is_positive(self, x):
        return self.group.is_positive(x)

    def leq(self, x, y):
        return self.group.leq(x, y)

    def com(self, p, q):
        return self.group.com(p, q)

    def meet(self, p, q):
        return self.group.meet(p, q)

    def corner_candidates(self, a1, a2, b1, b2, cls):
        return self.group.enumerate_interval(self.identity, a1)

    def interval(self, lo, hi):
        return self.group.enumerate_interval(lo, hi)

    def render(self, x):
        return self.group.render(x)


class LexAmbient:
    """Refinement in the lexicographic group, with candidates from an n-perfect window.

    Corner candidates are restricted to ``[0 v b1 a2^-1, a1 ^ b1]``, outside
    of which some entry fails to be positive. For RDP1 over an abelian ``G``
    the candidates whose off-diagonal entries provably fail ``com`` are also
    skipped; both filters are exact, so the first remaining candidate is the
    first valid corner of the full window enumeration.
    """

    def __init__(self, algebra: NPerfectAlgebra, bound=None):
        self.algebra = algebra
        self.lex = algebra.lex
        self.bound = bound
        self.identity = self.lex.identity

    def compose(self, x, y):
        return self.lex.mul(x, y)

    def quotient(self, c, a):
        return self.lex.mul(self.lex.inv(c), a)

    def is_positive(self, x):
        return self.lex.is_positive(x)

    def leq(self, x, y):
        return self.lex.leq(x, y)

    def com(self, p, q):
        return self.lex.com(p, q)

    def meet(self, p, q):
        return self.lex.meet(p, q)

    def _box(self, k):
        G = self.algebra.group
        B = self.bound
        g = G.generator_power(B)
        lo = G.identity if k == 0 else G._inv(g)
        hi = G.identity if k == self.algebra.n else g
        return lo, hi

    def window_interval(self, lo: LexElement, hi: LexElement, pins=None):
        """Window elements of ``[lo, hi]`` in canonical order.

        ``pins`` maps a level to ``{index: value}`` constraints, or to
        ``None`` to skip the level altogether.
        """
        if self.bound is None:
            raise NotEnumerableError("lexicographic ambient has no window bound")
        A = self.algebra
        G = A.group
        if not G.enumerable_intervals:
            raise NotEnumerableError(f"intervals of {G} are infinite")
        first = max(lo.level, 0)
        last = min(hi.level, A.n)
        for k in range(first, last + 1):
            pin = None
            if pins is not None and k in pins:
                pin = pins[k]
                if pin is None:
                    continue
            wlo, whi = self._box(k)
            per_index = []
            for i in range(A.m):
                a = G.join(wlo, lo.values[i]) if k == lo.level else wlo
                b = G.meet(whi, hi.values[i]) if k == hi.level else whi
                if pin is not None and i in pin:
                    v = pin[i]
                    if not (G.leq(a, v) and G.leq(v, b)):
                        per_index = None
                        break
                    per_index.append([v])
                    continue
                if not G.leq(a, b):
                    per_index = None
                    break
                per_index.append(G.enumerate_interval(a, b))
            if per_index is None:
                continue
            for vals in itertools.product(*per_index):
                yield LexElement(k, tuple(vals))

    def corner_candidates(self, a1, a2, b1, b2, cls):
        L = self.lex
        lo = L.join(self.identity, L.mul(b1, L.inv(a2)))
        hi = L.meet(a1, b1)
        if not L.leq(lo, hi):
            return iter(())
        pins = None
        if RdpClass(cls) is RdpClass.RDP1 and self.algebra.group.abelian:
            pins = self._com_pins(a1, b1, lo, hi)
        return self.window_interval(lo, hi, pins)

    def _com_pins(self, a1, b1, lo, hi):
        L = self.lex
        G = L.group
        if G.is_trivial or L.m == 0 or L.phi.is_identity():
            return None
        moving = [i for i in range(L.m) if L.phi(i) != i]
        pins = {}
        for k in range(max(lo.level, 0), hi.level + 1):
            r12, r21 = a1.level - k, b1.level - k
            if r12 >= 1 and r21 >= 1:
                pins[k] = None
            elif r12 == 0 and r21 >= 1:
                pins[k] = {i: a1.values[i] for i in moving}
            elif r21 == 0 and r12 >= 1:
                pins[k] = {i: b1.values[i] for i in moving}
        return pins

    def interval(self, lo, hi):
        return list(self.window_interval(lo, hi))

    def render(self, x):
        return self.lex.render(x)


class PeaAmbient:
    """Refinement inside a pseudo effect algebra, searched over a window.

    ``com`` is decided over the window only: every pair below the two
    entries must commute.
    """

    def __init__(self, universe: PeaUniverse, bound=None, elements=None):
        self.universe = universe
        self.identity = universe.zero
        if elements is None and bound is not None and universe.enumerable:
            elements = universe.window(bound)
        self.elements = elements

    def _window(self):
        if self.elements is None:
            raise NotEnumerableError(f"{self.universe} has no enumerated window")
        return self.elements

    def compose(self, x, y):
        return self.universe.add(x, y)

    def quotient(self, c, a):
        return self.universe.diffs(c, a)[1]

    def is_positive(self, x):
        return self.universe.is_member(x)

    def leq(self, x, y):
        return self.universe.leq(x, y)

    def com(self, p, q):
        U = self.universe
        below_p = [x for x in self._window() if U.leq(x, p)]
        below_q = [y for y in self._window() if U.leq(y, q)]
        for x in below_p:
            for y in below_q:
                if U.add(x, y) != U.add(y, x):
                    return Verdict(False, (x, y))
        return Verdict(True)

    def meet(self, p, q):
        return self.universe.meet(p, q)

    def corner_candidates(self, a1, a2, b1, b2, cls):
        U = self.universe
        return [c for c in self._window() if U.leq(c, a1) and U.leq(c, b1)]

    def interval(self, lo, hi):
        U = self.universe
        return [c for c in self._window() if U.leq(lo, c) and U.leq(c, hi)]

    def render(self, x):
        return self.universe.render(x)


def ambient_for(obj, bound=None):
    if isinstance(obj, (GroupAmbient, LexAmbient, PeaAmbient)):
        return obj
    if isinstance(obj, PoGroup):
        return GroupAmbient(obj)
    if isinstance(obj, NPerfectAlgebra):
        return LexAmbient(obj, bound)
    if isinstance(obj, LexGroup):
        return LexAmbient(NPerfectAlgebra(obj, 1), None)
    if isinstance(obj, PeaUniverse):
        return PeaAmbient(obj, bound)
    raise UsageError(f"no refinement ambient for {obj!r}")


# ----------------------------------------------------------------------
# tables


def transpose_table(t: RefinementTable) -> RefinementTable:
    """Swap the roles of rows and columns."""
    return t.transpose()


def table_defects(ambient, t, a1, a2, b1, b2, cls=RdpClass.RDP1):
    """Reasons the table fails; an empty list means valid.

    Returns ``(defects, undecided)`` where ``undecided`` is true when the
    ``com`` side condition could not be settled.
    """
    amb = ambient_for(ambient)
    cls = RdpClass(cls)
    defects = []
    for name, c in zip(("c11", "c12", "c21", "c22"), t.entries()):
        if not amb.is_positive(c):
            defects.append(f"{name} = {amb.render(c)} is not positive")
    if defects:
        return defects, False
    for lhs, (x, y), target in (
        ("c11 c12", (t.c11, t.c12), a1),
        ("c21 c22", (t.c21, t.c22), a2),
        ("c11 c21", (t.c11, t.c21), b1),
        ("c12 c22", (t.c12, t.c22), b2),
    ):
        got = amb.compose(x, y)
        if got != target:
            shown = "undefined" if got is None else amb.render(got)
            defects.append(f"{lhs} = {shown}, expected {amb.render(target)}")
    if defects:
        return defects, False
    undecided = False
    if cls is RdpClass.RDP1:
        v = amb.com(t.c12, t.c21)
        if v.value is None:
            undecided = True
        elif not v.value:
            x, y = v.witness
            defects.append(f"c12 com c21 fails: {amb.render(x)} and {amb.render(y)} do not commute")
    elif cls is RdpClass.RDP2:
        try:
            m = amb.meet(t.c12, t.c21)
        except NotLatticeError:
            return defects, True
        if m != amb.identity:
            defects.append(f"c12 meet c21 = {amb.render(m)}, expected the identity")
    return defects, undecided


def verify_table(ambient, t, a1, a2, b1, b2, cls=RdpClass.RDP1):
    """``True``/``False`` when decided, ``None`` when ``com`` is undecided."""
    defects, undecided = table_defects(ambient, t, a1, a2, b1, b2, cls)
    if defects:
        return False
    return None if undecided else True


def render_table(ambient, t, a1=None, a2=None, b1=None, b2=None):
    """A 2x2 grid with row sums on the left and column sums underneath."""
    r = ambient_for(ambient).render
    cells = [[r(t.c11), r(t.c12)], [r(t.c21), r(t.c22)]]
    rows = [r(a1) if a1 is not None else "", r(a2) if a2 is not None else ""]
    foot = [r(b1) if b1 is not None else "", r(b2) if b2 is not None else ""]
    w0 = max(len(x) for x in rows)
    w1 = max(len(cells[0][0]), len(cells[1][0]), len(foot[0]))
    w2 = max(len(cells[0][1]), len(cells[1][1]), len(foot[1]))
    lines = [f"{rows[i]:>{w0}} | {cells[i][0]:<{w1}}  {cells[i][1]:<{w2}}" for i in range(2)]
    lines.append("-" * (w0 + 1) + "+" + "-" * (w1 + w2 + 3))
    lines.append(f"{'':>{w0}} | {foot[0]:<{w1}}  {foot[1]:<{w2}}")
    return "\n".join(lines)


def _check_quadruple(amb, a1, a2, b1, b2):
    for g in (a1, a2, b1, b2):
        if not amb.is_positive(g):
            raise UsageError(f"{amb.render(g)} is not positive")
    s, t = amb.compose(a1, a2), amb.compose(b1, b2)
    if s is None or t is None or s != t:
        raise UsageError("expected a1 a2 == b1 b2 with both products defined")


def _search(amb, a1, a2, b1, b2, cls):
    undecided = 0
    for c11 in amb.corner_candidates(a1, a2, b1, b2, cls):
        c12 = amb.quotient(c11, a1)
        c21 = amb.quotient(c11, b1)
        if c12 is None or c21 is None:
            continue
        c22 = amb.quotient(c21, a2)
        if c22 is None:
            continue
        t = RefinementTable(c11, c12, c21, c22)
        v = verify_table(amb, t, a1, a2, b1, b2, cls)
        if v is True:
            return t, undecided
        if v is None:
            undecided += 1
    return None, undecided


def brute_refine(ambient, a1, a2, b1, b2, cls=RdpClass.RDP1, bound=None):
    """The first valid table found by searching the corner ``c11``.

    The remaining entries are forced: ``c12 = c11^-1 a1``, ``c21 = c11^-1 b1``
    and ``c22 = c21^-1 a2``. Returns ``None`` when no candidate works.
    """
    amb = ambient_for(ambient, bound)
    _check_quadruple(amb, a1, a2, b1, b2)
    return _search(amb, a1, a2, b1, b2, cls)[0]


def check_rip(ambient, a1, a2, b1, b2, bound=None):
    """A ``c`` with ``a1, a2 <= c <= b1, b2``, or ``None``."""
    amb = ambient_for(ambient, bound)
    for a in (a1, a2):
        for b in (b1, b2):
            if not amb.leq(a, b):
                raise UsageError(f"{amb.render(a)} is not below {amb.render(b)}")
    for c in amb.interval(a1, b1):
        if amb.leq(a2, c) and amb.leq(c, b2):
            return c
    return None


# ----------------------------------------------------------------------
# constructive refinement in the lexicographic group


@dataclass(frozen=True)
class LexRefinement:
    """A table with the case that produced it.

    ``transposed`` records that the equation was solved with rows and
    columns exchanged (done whenever ``a1`` sits on a lower level than
    ``b1``) and the table transposed back.
    """

    table: RefinementTable
    case: str
    transposed: bool


def _case_label(n1, n2, m1, transposed):
    """Label of the normalised signature; ``^T`` marks the mirrored orientation."""
    if n1 == m1:
        return {(False, False): "i", (False, True): "ii", (True, False): "iii", (True, True): "ix"}[
            (n1 >= 1, n2 >= 1)
        ]
    if m1 >= 1 and n2 >= 1:
        return "vii" if transposed else "viii"
    if n2 >= 1:
        return "vi" if transposed else "vi^T"
    base = "iv" if m1 == 0 else "v"
    return base + "^T" if transposed else base


def lex_refine_rdp1(where, x1, x2, y1, y2) -> LexRefinement:
    """Refine ``x1 x2 = y1 y2`` between positive elements of a lexicographic group.

    ``where`` is a :class:`LexGroup` or :class:`NPerfectAlgebra`. Requires
    ``G`` itself to refine with RDP1 (every shipped kind does).
    """
    L = where.lex if isinstance(where, NPerfectAlgebra) else where
    for g in (x1, x2, y1, y2):
        L.validate(g)
        if not L.is_positive(g):
            raise UsageError(f"{L.render(g)} is not positive")
    if L.mul(x1, x2) != L.mul(y1, y2):
        raise UsageError("expected x1 x2 == y1 y2")
    transposed = x1.level < y1.level
    if transposed:
        x1, x2, y1, y2 = y1, y2, x1, x2
    t = _refine_normalized(L, x1, x2, y1, y2)
    case = _case_label(x1.level, x2.level, y1.level, transposed)
    if transposed:
        t = t.transpose()
    return LexRefinement(t, case, transposed)


def _refine_normalized(L, x1, x2, y1, y2):
    """Rows ``x1, x2`` and columns ``y1, y2`` with ``x1.level >= y1.level``."""
    G = L.group
    m = L.m
    e = G.identity
    n1, n2, m1 = x1.level, x2.level, y1.level
    x, y, u, v = x1.values, x2.values, y1.values, y2.values
    R = range(m)

    if n1 > m1:
        p = L.power(-m1)
        c12 = LexElement(n1 - m1, tuple(G._mul(G._inv(u[p[i]]), x[p[i]]) for i in R))
        return RefinementTable(y1, c12, L.identity, x2)

    k, l = n1, n2
    if k == 0:
        if l == 0:
            cells = [G.refine(x[i], y[i], u[i], v[i], RdpClass.RDP1) for i in R]
            return RefinementTable(
                LexElement(0, tuple(c.c11 for c in cells)),
                LexElement(0, tuple(c.c12 for c in cells)),
                LexElement(0, tuple(c.c21 for c in cells)),
                LexElement(0, tuple(c.c22 for c in cells)),
            )
        d = [G.lower_bound([y[i], v[i]]) for i in R]
        cells = [
            G.refine(x[i], G._mul(y[i], G._inv(d[i])), u[i], G._mul(v[i], G._inv(d[i])), RdpClass.RDP1)
            for i in R
        ]
        return RefinementTable(
            LexElement(0, tuple(c.c11 for c in cells)),
            LexElement(0, tuple(c.c12 for c in cells)),
            LexElement(0, tuple(c.c21 for c in cells)),
            LexElement(l, tuple(G._mul(cells[i].c22, d[i]) for i in R)),
        )

    # k >= 1: shift the row-one and column-one values by a common lower bound.
    # The second row and column are shifted only when they sit above level 0;
    # at level 0 they are already positive and a shift could push c22 below e.
    pk = L.power(k)
    back = L.power(-k)
    d = [G.lower_bound([x[i], y[i], u[i], v[i]]) for i in R]
    shift = l >= 1
    cells = []
    for i in R:
        j = pk[i]
        dj = d[j] if shift else e
        cells.append(
            G.refine(
                G._mul(G._inv(d[i]), x[i]),
                G._mul(y[j], G._inv(dj)),
                G._mul(G._inv(d[i]), u[i]),
                G._mul(v[j], G._inv(dj)),
                RdpClass.RDP1,
            )
        )
    c11 = LexElement(k, tuple(G._mul(d[i], cells[i].c11) for i in R))
    c12 = LexElement(0, tuple(cells[back[j]].c12 for j in R))
    c21 = LexElement(0, tuple(cells[back[j]].c21 for j in R))
    c22 = LexElement(l, tuple(G._mul(cells[back[j]].c22, d[j] if shift else e) for j in R))
    return RefinementTable(c11, c12, c21, c22)


# ----------------------------------------------------------------------
# classification


@dataclass
class Classification:
    """Observed refinement properties on a window."""

    strongest: Optional[RdpClass]
    holds: dict = field(default_factory=dict)
    report: CheckReport = None


def _positive_window(amb, ambient_obj, bound):
    if isinstance(amb, GroupAmbient):
        return amb.group.positive_ball(bound)
    if isinstance(amb, LexAmbient):
        return amb.algebra.window(bound)
    return amb._window()


def equal_sum_groups(amb, elements):
    """Group defined products ``a1 a2`` of window elements by value."""
    groups = {}
    for a in elements:
        for b in elements:
            s = amb.compose(a, b)
            if s is None:
                continue
            if isinstance(amb, LexAmbient) and not amb.algebra.is_member(s):
                continue
            groups.setdefault(s, []).append((a, b))
    return groups


def classify_rdp(ambient, bound):
    """Which of RIP, RDP0, RDP, RDP1, RDP2 hold on every window instance.

    Every equal-sum quadruple of the window is searched separately for RDP,
    RDP1 and RDP2 tables; RDP0 is read off the RDP tables; RIP is checked on
    all interpolation instances. The report also confirms that the observed
    classes respect the implication chain.
    """
    amb = ambient_for(ambient, bound)
    report = CheckReport("rdp_classify")
    holds = {}
    with timed(report):
        if isinstance(amb, GroupAmbient) and not amb.group.enumerable_intervals:
            for c in RdpClass:
                report.skip(c.value, f"{amb.group} is not enumerable")
            return Classification(None, {c: None for c in RdpClass}, report)
        if isinstance(amb, LexAmbient) and not amb.algebra.enumerable:
            for c in RdpClass:
                report.skip(c.value, f"{amb.algebra} is not enumerable")
            return Classification(None, {c: None for c in RdpClass}, report)
        elems = _positive_window(amb, ambient, bound)
        groups = equal_sum_groups(amb, elems)
        first_fail = {}
        unknown = {c: 0 for c in (RdpClass.RDP, RdpClass.RDP1, RdpClass.RDP2)}
        chain_bad = None
        count = 0
        lattice = True
        for pairs in groups.values():
            for a1, a2 in pairs:
                for b1, b2 in pairs:
                    count += 1
                    got = {}
                    for cls in (RdpClass.RDP2, RdpClass.RDP1, RdpClass.RDP):
                        if cls is RdpClass.RDP2 and not lattice:
                            got[cls] = None
                            continue
                        try:
                            t, und = _search(amb, a1, a2, b1, b2, cls)
                        except NotLatticeError:
                            lattice = False
                            got[cls] = None
                            continue
                        got[cls] = True if t is not None else (None if und else False)
                        if got[cls] is None:
                            unknown[cls] += 1
                        if got[cls] is False and cls not in first_fail:
                            r = amb.render
                            first_fail[cls] = f"a1={r(a1)}, a2={r(a2)}, b1={r(b1)}, b2={r(b2)}"
                    order = (RdpClass.RDP2, RdpClass.RDP1, RdpClass.RDP)
                    for strong, weak in zip(order, order[1:]):
                        if got[strong] is True and got[weak] is False and chain_bad is None:
                            r = amb.render
                            chain_bad = (
                                f"{strong.value} table but no {weak.value} table for "
                                f"a1={r(a1)}, a2={r(a2)}, b1={r(b1)}, b2={r(b2)}"
                            )
        for cls in (RdpClass.RDP2, RdpClass.RDP1, RdpClass.RDP):
            if cls is RdpClass.RDP2 and not lattice:
                holds[cls] = None
                report.skip(cls.value, "no lattice meets")
                continue
            if cls in first_fail:
                holds[cls] = False
            elif unknown[cls]:
                holds[cls] = None
            else:
                holds[cls] = True
            report.add(
                cls.value,
                holds[cls],
                first_fail.get(cls, "com undecided"),
                f"{count} quadruples" + (f", {unknown[cls]} undecided" if unknown[cls] else ""),
            )
        holds[RdpClass.RDP0] = holds[RdpClass.RDP]
        report.add(
            "RDP0",
            holds[RdpClass.RDP0],
            first_fail.get(RdpClass.RDP, "undecided"),
            "read off the RDP tables",
        )
        rip = rip_sweep(amb, bound)
        holds[RdpClass.RIP] = rip.failure is None
        report.add("RIP", rip.failure is None, rip.failure, f"{rip.instances} instances")
        chain_ok = chain_bad is None and not (holds[RdpClass.RDP] is True and holds[RdpClass.RIP] is False)
        report.add("implication chain", chain_ok, chain_bad or "RDP holds but RIP fails")
    strongest = None
    for cls in (RdpClass.RDP2, RdpClass.RDP1, RdpClass.RDP, RdpClass.RIP):
        if holds.get(cls) is True:
            strongest = cls
            break
    return Classification(strongest, holds, report)


@dataclass
class RipSweep:
    instances: int
    failure: Optional[str]


def rip_sweep(ambient, bound, elements=None):
    """Check interpolation for every ``a1, a2 <= b1, b2`` in a window.

    For each pair ``b1, b2`` the common lower set ``D`` is formed; every
    pair of ``D`` must have an upper bound inside ``D``. The witnesses are
    counted with a boolean matrix product over ``D``.
    """
    amb = ambient_for(ambient, bound)
    if elements is None:
        if isinstance(amb, GroupAmbient):
            elements = amb.group.ball(bound)
        elif isinstance(amb, LexAmbient):
            elements = amb.algebra.window(bound)
        else:
            elements = amb._window()
    n = len(elements)
    if isinstance(amb, LexAmbient):
        le = order_matrix(amb.algebra, elements)
    elif isinstance(amb, PeaAmbient):
        le = order_matrix(amb.universe, elements)
    else:
        le = np.array([[amb.leq(x, y) for y in elements] for x in elements], dtype=bool)
    instances = 0
    for i in range(n):
        for j in range(i, n):
            below = np.nonzero(le[:, i] & le[:, j])[0]
            if len(below) == 0:
                continue
            sub = le[np.ix_(below, below)].astype(np.float32)
            witnesses = sub @ sub.T
            instances += len(below) ** 2
            if (witnesses == 0).any():
                p, q = map(int, np.argwhere(witnesses == 0)[0])
                r = amb.render
                x, y = elements[below[p]], elements[below[q]]
                return RipSweep(
                    instances,
                    f"a1={r(x)}, a2={r(y)}, b1={r(elements[i])}, b2={r(elements[j])}",
                )
    return RipSweep(instances, None)
