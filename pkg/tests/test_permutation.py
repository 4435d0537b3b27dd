import pytest
from hypothesis import given
from hypothesis import strategies as st

from kitepea import Permutation, UsageError

perms = st.integers(0, 7).flatmap(lambda m: st.permutations(range(m))).map(lambda p: Permutation(tuple(p)))


def test_rejects_non_bijections():
    with pytest.raises(UsageError, match="not a bijection"):
        Permutation((0, 0))
    with pytest.raises(UsageError):
        Permutation((0, 2))


def test_cycle_and_identity():
    assert Permutation.cycle(3).images == (1, 2, 0)
    assert Permutation.identity(3).is_identity()
    assert Permutation((1, 0, 3, 2)).cycles() == [(0, 1), (2, 3)]
    assert Permutation((2, 0, 1)).order() == 3


def test_compose_applies_right_factor_first():
    p, q = Permutation((1, 2, 0)), Permutation((1, 0, 2))
    assert p.compose(q).images == tuple(p(q(i)) for i in range(3))


@given(perms)
def test_inverse_undoes(p):
    assert p.compose(p.inverse()).is_identity()
    assert p.inverse().compose(p).is_identity()


@given(perms, st.integers(-6, 6), st.integers(-6, 6))
def test_powers_add(p, a, b):
    assert p.power(a).compose(p.power(b)) == p.power(a + b)


@given(perms)
def test_cycles_partition_and_order(p):
    cyc = p.cycles()
    flat = sorted(i for c in cyc for i in c)
    assert flat == list(range(len(p)))
    assert p.power(p.order()).is_identity()
    for c in cyc:
        for a, b in zip(c, c[1:] + c[:1]):
            assert p(a) == b
