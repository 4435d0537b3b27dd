"""Orbit structure of the twisting bijection and what it says about the algebra.

The kite over ``G`` with bijections ``lam``, ``rho`` is isomorphic to the
1-perfect interval of ``Z x_phi G^I`` with ``phi = lam o rho^-1``. The
orbits of ``phi`` then decide subdirect irreducibility and give the
factors of a subdirect decomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import UsageError, WindowTooLargeError
from .kite import LOWER, UPPER, KiteAlgebra, KiteElement
from .lexext import LexElement, NPerfectAlgebra
from .pea import CheckReport, timed
from .permutation import Permutation

DEFAULT_ISO_CAP = 20_000


def _as_perm(p, name):
    if isinstance(p, Permutation):
        return p
    try:
        return Permutation(tuple(p))
    except UsageError as exc:
        raise UsageError(f"not a bijection at {name}: {exc}") from None


def build_phi(lam, rho) -> Permutation:
    """The twist ``phi(i) = lam(rho^-1(i))`` of the lexicographic model of a kite."""
    lam, rho = _as_perm(lam, "lambda"), _as_perm(rho, "rho")
    if len(lam) != len(rho):
        raise UsageError(f"lambda and rho have different lengths ({len(lam)} and {len(rho)})")
    return lam.compose(rho.inverse())


# ----------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class ComponentPartition:
    """Orbits of a bijection, with the bijection restricted to each orbit.

    ``restrictions[k]`` acts on ``range(len(blocks[k]))``, where position
    ``p`` stands for the index ``blocks[k][p]``.
    """

    blocks: tuple
    restrictions: tuple

    def __len__(self):
        return len(self.blocks)

    def block_of(self, i):
        for k, b in enumerate(self.blocks):
            if i in b:
                return k
        raise KeyError(i)


def components(phi) -> ComponentPartition:
    """Orbits of ``phi`` as sorted index tuples, ordered by smallest element."""
    phi = _as_perm(phi, "phi")
    blocks = tuple(tuple(sorted(c)) for c in phi.cycles())
    restrictions = []
    for b in blocks:
        pos = {i: p for p, i in enumerate(b)}
        restrictions.append(Permutation(tuple(pos[phi(i)] for i in b)))
    return ComponentPartition(blocks, tuple(restrictions))


def canonical_form(phi) -> Optional[tuple]:
    """A renumbering under which ``phi`` becomes ``i -> i - 1 (mod m)``.

    Returns ``labels`` with ``labels[i]`` the new name of index ``i``, or
    ``None`` unless ``phi`` is a single cycle through all ``m >= 1`` indices.
    The cycle is walked from index 0: ``phi^t(0)`` is renamed ``-t mod m``.
    """
    phi = _as_perm(phi, "phi")
    m = len(phi)
    if m == 0 or len(phi.cycles()) != 1:
        return None
    labels = [0] * m
    i = 0
    for t in range(m):
        labels[i] = (-t) % m
        i = phi(i)
    return tuple(labels)


def conjugate(phi, labels) -> Permutation:
    """``phi`` rewritten in the new names: ``psi(labels[i]) = labels[phi(i)]``."""
    phi = _as_perm(phi, "phi")
    out = [0] * len(phi)
    for i in range(len(phi)):
        out[labels[i]] = labels[phi(i)]
    return Permutation(tuple(out))


# ----------------------------------------------------------------------
# irreducibility


class Decision(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class IrreducibilityDecision:
    decision: Decision
    rationale: str
    canonical: Optional[tuple] = None
    description: str = ""

    def to_dict(self):
        return {
            "decision": self.decision.value,
            "rationale": self.rationale,
            "canonical_form": list(self.canonical) if self.canonical is not None else None,
            "description": self.description,
        }


def _shape(A):
    """``(group, m, phi, n)`` for a kite or an n-perfect algebra."""
    if isinstance(A, KiteAlgebra):
        return A.group, A.m, build_phi(A.lam, A.rho), 1
    if isinstance(A, NPerfectAlgebra):
        return A.group, A.m, A.phi, A.n
    raise UsageError(f"expected a kite or an n-perfect algebra, got {type(A).__name__}")


def _small_description(n):
    return "2-element Boolean algebra" if n == 1 else f"{n + 1}-element chain"


def decide_subdirect_irreducibility(A) -> IrreducibilityDecision:
    """Decide from the group's own irreducibility and the connectivity of ``phi``."""
    G, m, phi, n = _shape(A)
    if G.is_trivial or m == 0:
        why = "trivial group" if G.is_trivial else "empty index set"
        return IrreducibilityDecision(
            Decision.YES,
            f"{why}: the algebra is the {_small_description(n)}, which is simple",
            description=_small_description(n),
        )
    parts = components(phi)
    flag = G.known_subdirectly_irreducible
    if flag is False:
        return IrreducibilityDecision(
            Decision.NO, f"{G} is not subdirectly irreducible, and irreducibility of the algebra requires it"
        )
    if len(parts) > 1:
        blocks = ", ".join("{" + ",".join(map(str, b)) + "}" for b in parts.blocks)
        return IrreducibilityDecision(
            Decision.NO, f"phi has {len(parts)} orbits ({blocks}); each orbit gives a proper factor"
        )
    labels = canonical_form(phi)
    desc = f"isomorphic to K with phi(i) = i-1 (mod {m})"
    if flag is None:
        return IrreducibilityDecision(
            Decision.UNKNOWN,
            f"phi is a single orbit, but subdirect irreducibility of {G} is undetermined",
            labels,
            desc,
        )
    return IrreducibilityDecision(
        Decision.YES, f"{G} is subdirectly irreducible and phi is a single orbit", labels, desc
    )


# ----------------------------------------------------------------------
# decomposition


@dataclass
class Factor:
    block: tuple
    algebra: NPerfectAlgebra
    decision: IrreducibilityDecision


@dataclass
class Decomposition:
    factors: list
    report: CheckReport = field(default_factory=lambda: CheckReport("decompose"))


def _lex_form(A):
    """The algebra as an n-perfect interval, with the map into it."""
    if isinstance(A, KiteAlgebra):
        return NPerfectAlgebra.build(A.group, A.m, build_phi(A.lam, A.rho), 1), lambda x: iso_phi(A, x)
    if isinstance(A, NPerfectAlgebra):
        return A, lambda x: x
    raise UsageError(f"expected a kite or an n-perfect algebra, got {type(A).__name__}")


def project(x: LexElement, block) -> LexElement:
    return LexElement(x.level, tuple(x.values[i] for i in block))


def decompose(A, bound=1, *, cap=DEFAULT_ISO_CAP) -> Decomposition:
    """One factor per orbit of ``phi``, with the projections checked on the window.

    A kite is first carried into its lexicographic model; the factors are
    n-perfect intervals over the restricted twists.
    """
    G, m, phi, n = _shape(A)
    L, to_lex = _lex_form(A)
    if G.is_trivial or m == 0:
        parts = ComponentPartition((tuple(range(m)),), (phi,))
    else:
        parts = components(phi)
    factors = [
        Factor(b, F, decide_subdirect_irreducibility(F))
        for b, F in ((b, NPerfectAlgebra.build(G, len(b), r, n)) for b, r in zip(parts.blocks, parts.restrictions))
    ]
    out = Decomposition(factors)
    report = out.report
    with timed(report):
        window = [to_lex(x) for x in A.window(bound)]
        if len(window) > cap:
            raise WindowTooLargeError(f"window of {len(window)} elements exceeds the cap of {cap}")
        for f in factors:
            tag = "{" + ",".join(map(str, f.block)) + "}"
            bad = None
            for x in window:
                for y in window:
                    s = L.add(x, y)
                    if s is None:
                        continue
                    px, py = project(x, f.block), project(y, f.block)
                    t = f.algebra.add(px, py)
                    if t != project(s, f.block):
                        bad = f"x={L.render(x)}, y={L.render(y)}: projected sum {_r(f.algebra, t)}, expected {L.render(project(s, f.block))}"
                        break
                if bad:
                    break
            ends = project(L.zero, f.block) == f.algebra.zero and project(L.one, f.block) == f.algebra.one
            if bad is None and not ends:
                bad = "0 or 1 is not preserved"
            report.add(f"projection onto {tag} is a homomorphism", bad is None, bad)
            image = {project(x, f.block) for x in window}
            missing = [y for y in f.algebra.window(bound) if y not in image]
            report.add(
                f"projection onto {tag} is onto the factor window",
                not missing,
                f"{f.algebra.render(missing[0])} is not hit" if missing else None,
            )
            if f.decision.decision is Decision.YES:
                report.add(f"factor {tag} is subdirectly irreducible", True)
            elif G.known_subdirectly_irreducible is True:
                report.add(f"factor {tag} is subdirectly irreducible", False, f.decision.rationale)
            else:
                report.add(f"factor {tag} is subdirectly irreducible", None, detail=f.decision.rationale)
        seen = {}
        clash = None
        for x in window:
            key = tuple(project(x, f.block) for f in factors)
            if key in seen and seen[key] != x:
                clash = f"{L.render(seen[key])} and {L.render(x)} have the same projections"
                break
            seen[key] = x
        report.add("projections are jointly injective", clash is None, clash, f"{len(window)} elements")
    return out


def _r(U, x):
    return "undefined" if x is None else U.render(x)


# ----------------------------------------------------------------------
# the isomorphism onto the lexicographic model


def iso_target(K: KiteAlgebra, phi=None) -> NPerfectAlgebra:
    return NPerfectAlgebra.build(K.group, K.m, phi if phi is not None else build_phi(K.lam, K.rho), 1)


def iso_phi(K: KiteAlgebra, x: KiteElement) -> LexElement:
    """Upper values keep their place at level 1; Lower values are reindexed by ``lam^-1``."""
    if x.cone == UPPER:
        return LexElement(1, x.values)
    if x.cone == LOWER:
        lam_inv = K.lam.inverse()
        return LexElement(0, tuple(x.values[lam_inv(i)] for i in range(K.m)))
    raise UsageError(f"{x!r} is not a kite element")


def check_iso(K: KiteAlgebra, bound=2, *, phi=None, cap=DEFAULT_ISO_CAP) -> CheckReport:
    """Check on the window that ``iso_phi`` is an isomorphism onto the lexicographic model.

    ``phi`` overrides the twist of the target, which turns the check into
    a negative control.
    """
    T = iso_target(K, phi)
    report = CheckReport("iso")
    with timed(report):
        W = K.window(bound)
        if len(W) > cap:
            raise WindowTooLargeError(f"window of {len(W)} elements exceeds the cap of {cap}")
        img = {x: iso_phi(K, x) for x in W}
        target = T.window(bound)
        values = list(img.values())
        bad = None
        if len(set(values)) != len(values):
            bad = "two elements have the same image"
        elif set(values) != set(target):
            extra = next((y for y in values if y not in set(target)), None)
            miss = next((y for y in target if y not in set(values)), None)
            bad = f"image {T.render(extra)} outside the window" if extra else f"{T.render(miss)} is not hit"
        report.add("bijection onto the window", bad is None, bad, f"{len(W)} elements")

        ok = iso_phi(K, K.zero) == T.zero and iso_phi(K, K.one) == T.one
        report.add("0 and 1 preserved", ok, None if ok else f"0 -> {T.render(iso_phi(K, K.zero))}, 1 -> {T.render(iso_phi(K, K.one))}")

        bad = None
        for x, y in itertools.product(W, repeat=2):
            s = K.add(x, y)
            t = T.add(img[x], img[y])
            if (s is None) != (t is None) or (s is not None and img.get(s, iso_phi(K, s)) != t):
                bad = (
                    f"x={K.render(x)}, y={K.render(y)}: x+y = {_r(K, s)} maps to "
                    f"{_r(T, None if s is None else iso_phi(K, s))}, but the image sum is {_r(T, t)}"
                )
                break
        report.add("addition preserved", bad is None, bad, f"{len(W) ** 2} pairs")

        bad = None
        for x, y in itertools.product(W, repeat=2):
            if K.leq(x, y) != T.leq(img[x], img[y]):
                bad = f"x={K.render(x)}, y={K.render(y)}: x <= y is {K.leq(x, y)} in the kite"
                break
        report.add("order preserved both ways", bad is None, bad)

        bad = None
        for x in W:
            km, kt = K.negations(x)
            tm, tt = T.negations(img[x])
            if iso_phi(K, km) != tm or iso_phi(K, kt) != tt:
                bad = f"x={K.render(x)}: negations {K.render(km)}, {K.render(kt)} do not map to {T.render(tm)}, {T.render(tt)}"
                break
        report.add("negations preserved", bad is None, bad)
    return report
