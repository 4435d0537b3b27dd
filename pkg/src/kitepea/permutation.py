"""Bijections of a finite index set ``{0, ..., m-1}``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import UsageError


@dataclass(frozen=True)
class Permutation:
    """A bijection stored as its image list: ``p(i) == p.images[i]``."""

    images: tuple

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        m = len(images)
        seen = [False] * m
        for i, j in enumerate(images):
            if type(j) is not int or not 0 <= j < m or seen[j]:
                raise UsageError(f"not a bijection: {list(images)} (entry {i})")
            seen[j] = True

    @classmethod
    def identity(cls, m):
        return cls(tuple(range(m)))

    @classmethod
    def cycle(cls, m):
        """The shift ``i -> i+1 (mod m)``."""
        return cls(tuple((i + 1) % m for i in range(m)))

    def __len__(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i]

    def __iter__(self):
        return iter(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"

    def inverse(self):
        return self.power(-1)

    def power(self, k):
        return _power(self, k)

    def compose(self, other):
        """``self o other``: apply ``other`` first."""
        if len(other) != len(self):
            raise UsageError("cannot compose permutations of different sizes")
        return Permutation(tuple(self.images[j] for j in other.images))

    def is_identity(self):
        return all(i == j for i, j in enumerate(self.images))

    def fixed_points(self):
        return frozenset(i for i, j in enumerate(self.images) if i == j)

    def cycles(self):
        """Cycles in order of their smallest element, each starting there."""
        seen = set()
        out = []
        for start in range(len(self)):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def order(self):
        from math import lcm

        return lcm(*(len(c) for c in self.cycles())) if len(self) else 1


@lru_cache(maxsize=4096)
def _power(p, k):
    m = len(p)
    if k < 0:
        inv = [0] * m
        for i, j in enumerate(p.images):
            inv[j] = i
        base = Permutation(tuple(inv))
        k = -k
    else:
        base = p
    out = list(range(m))
    for _ in range(k % base.order() if m else 0):
        out = [base.images[j] for j in out]
    return Permutation(tuple(out))
