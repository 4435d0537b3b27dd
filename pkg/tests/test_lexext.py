
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from kitepea import Kind, LexElement, LexGroup, NPerfectAlgebra, PoGroup, UsageError, canonical_state, check_slices
from kitepea.pea import check_state

Z = PoGroup(Kind.INTEGERS)
SWAP = LexGroup(Z, 2, (1, 0))

small = st.integers(-4, 4)
perms = st.permutations(range(3)).map(tuple)


def lex_elems(m, levels=st.integers(-3, 3)):
    return st.tuples(levels, st.tuples(*[small] * m))


def as_lex(t):
    return LexElement(t[0], tuple(t[1]))


def test_product_inverse_minus():
    x, y, xy = oracles.LEX_PRODUCT
    assert SWAP.mul(as_lex(x), as_lex(y)) == as_lex(xy)
    x, xi = oracles.LEX_INVERSE
    assert SWAP.inv(as_lex(x)) == as_lex(xi)
    A = NPerfectAlgebra(SWAP, 1)
    x, xm = oracles.LEX_MINUS
    assert A.negations(as_lex(x))[0] == as_lex(xm)


@given(perms, lex_elems(3), lex_elems(3))
def test_product_matches_brute_force(phi, x, y):
    L = LexGroup(Z, 3, phi)
    assert tuple(L.mul(as_lex(x), as_lex(y))) == oracles.lex_mul(phi, x, y)
    assert L.leq(as_lex(x), as_lex(y)) == oracles.lex_leq(x, y)


@given(perms, lex_elems(3), lex_elems(3), lex_elems(3))
def test_group_and_translation_invariance(phi, x, y, z):
    L = LexGroup(Z, 3, phi)
    x, y, z = as_lex(x), as_lex(y), as_lex(z)
    assert L.mul(L.mul(x, y), z) == L.mul(x, L.mul(y, z))
    assert L.mul(x, L.inv(x)) == L.identity == L.mul(L.inv(x), x)
    if L.leq(x, y):
        assert L.leq(L.mul(z, x), L.mul(z, y))
        assert L.leq(L.mul(x, z), L.mul(y, z))


def test_parse_and_membership():
    A = NPerfectAlgebra(SWAP, 2)
    x = A.parse("(1)[-2,1]")
    assert x == LexElement(1, (-2, 1))
    assert A.render(x) == "(1)[-2,1]"
    with pytest.raises(UsageError):
        A.parse("(0)[-1,0]")
    with pytest.raises(UsageError):
        A.parse("(2)[1,0]")
    with pytest.raises(UsageError):
        NPerfectAlgebra(SWAP, 0)


def test_sums_by_level():
    A = NPerfectAlgebra(SWAP, 2)
    a, b = A.parse("(1)[0,0]"), A.parse("(1)[-1,-2]")
    assert A.add(a, b) == A.parse("(2)[-2,-1]")
    assert A.add(A.parse("(2)[0,0]"), A.parse("(0)[1,0]")) is None
    assert A.add(A.parse("(1)[0,0]"), A.parse("(1)[1,0]")) is None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_slices(n):
    report = check_slices(NPerfectAlgebra(SWAP, n), 1)
    assert report.ok, report.summary()


def test_canonical_state_value():
    n, k, want = oracles.STATE_ON_SLICE
    A = NPerfectAlgebra(SWAP, n)
    s = canonical_state(A)
    assert s(LexElement(k, (0, 0))) == want
    assert check_state(A, s, 1).ok


def test_window_size():
    A = NPerfectAlgebra(SWAP, 3)
    assert len(A.window(2)) == A.window_size(2) == 2 * 9 + 2 * 25


def test_com_rule_cases():
    L = LexGroup(Z, 3, (1, 0, 2))
    f_moved = LexElement(0, (1, 0, 0))
    f_fixed = LexElement(0, (0, 0, 5))
    top = LexElement(1, (0, 0, 0))
    assert L.com(f_moved, f_fixed).value is True
    assert L.com(f_fixed, top).value is True
    v = L.com(f_moved, top)
    assert v.value is False
    x, y = v.witness
    assert L.mul(x, y) != L.mul(y, x)
    assert L.com(top, top).value is False
    assert LexGroup(Z, 3, (0, 1, 2)).com(top, top).value is True


def _interval(L, p, bound):
    """Positive elements below ``p`` with levels in range and values in [-bound, bound]."""
    import itertools

    out = []
    for k in range(0, p.level + 1):
        for vals in itertools.product(range(-bound, bound + 1), repeat=L.m):
            x = LexElement(k, vals)
            if L.is_positive(x) and L.leq(x, p):
                out.append(x)
    return out


@given(
    st.sampled_from([(0, 1), (1, 0)]),
    st.integers(0, 1),
    st.tuples(st.integers(0, 2), st.integers(0, 2)),
    st.integers(0, 1),
    st.tuples(st.integers(0, 2), st.integers(0, 2)),
)
def test_com_rule_matches_bounded_search(phi, k, u, l, v):
    L = LexGroup(Z, 2, phi)
    p, q = LexElement(k, u), LexElement(l, v)
    verdict = L.com(p, q)
    clash = any(
        L.mul(x, y) != L.mul(y, x) for x in _interval(L, p, 2) for y in _interval(L, q, 2)
    )
    assert verdict.value is (not clash)
