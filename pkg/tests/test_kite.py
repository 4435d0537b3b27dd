import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from kitepea import KiteAlgebra, Kind, PoGroup, UsageError, lower, upper
from kitepea.pea import build_addition_table

Z = PoGroup(Kind.INTEGERS)
Z2 = PoGroup(Kind.INT_VECTORS, 2)

perm2 = st.sampled_from([(0, 1), (1, 0)])
perm3 = st.permutations(range(3)).map(tuple)
pos = st.integers(0, 4)


def test_upper_plus_lower():
    o = oracles.KITE_UPPER_PLUS_LOWER
    K = KiteAlgebra(Z, 2, (0, 1), o["rho"])
    assert K.add(upper(*o["s"]), lower(*o["f"])) == upper(*o["sum"])


def test_upper_plus_upper_undefined():
    K = KiteAlgebra(Z, 1, (0,), (0,))
    assert K.add(upper(0), upper(-3)) is None


def test_sum_undefined_past_the_unit():
    K = KiteAlgebra(Z, 1, (0,), (0,))
    assert K.add(upper(-1), lower(2)) is None
    assert K.add(upper(-1), lower(1)) == K.one


def test_tildes():
    o = oracles.KITE_LOWER_TILDE
    K = KiteAlgebra(Z, 2, o["lam"], (0, 1))
    assert K.negations(lower(*o["f"]))[1] == upper(*o["tilde"])
    o = oracles.KITE_UPPER_TILDE
    K = KiteAlgebra(Z, 2, (0, 1), o["rho"])
    assert K.negations(upper(*o["s"]))[1] == lower(*o["tilde"])


def test_rejects_bad_elements():
    K = KiteAlgebra(Z, 2, (0, 1), (0, 1))
    with pytest.raises(UsageError):
        K.add(lower(-1, 0), lower(0, 0))
    with pytest.raises(UsageError):
        K.element("U", (1, 0))
    with pytest.raises(UsageError, match="lambda"):
        KiteAlgebra(Z, 2, (0, 0), (0, 1))


def test_render_parse():
    K = KiteAlgebra(Z2, 2, (1, 0), (0, 1))
    x = upper((-1, 0), (0, -2))
    assert K.parse(K.render(x)) == x
    assert K.render(K.zero) == "L[(0,0),(0,0)]"


def test_window_size():
    K = KiteAlgebra(Z2, 2, (1, 0), (0, 1))
    assert len(K.window(1)) == K.window_size(1) == 2 * 4**2


@given(perm3, perm3, st.tuples(pos, pos, pos), st.booleans())
def test_negations_sum_to_unit(lam, rho, vals, up):
    K = KiteAlgebra(Z, 3, lam, rho)
    x = upper(*(-v for v in vals)) if up else lower(*vals)
    minus, tilde = K.negations(x)
    assert K.add(minus, x) == K.one
    assert K.add(x, tilde) == K.one
    assert K.negations(minus)[1] == x == K.negations(tilde)[0]


@given(perm2, perm2, st.tuples(pos, pos), st.tuples(pos, pos), st.booleans(), st.booleans())
def test_meet_join_bounds(lam, rho, u, v, ua, ub):
    K = KiteAlgebra(Z, 2, lam, rho)
    a = upper(*(-x for x in u)) if ua else lower(*u)
    b = upper(*(-x for x in v)) if ub else lower(*v)
    lo, hi = K.meet(a, b), K.join(a, b)
    assert K.leq(lo, a) and K.leq(lo, b)
    assert K.leq(a, hi) and K.leq(b, hi)


@pytest.mark.parametrize("lam,rho", list(itertools.product([(0, 1), (1, 0)], repeat=2)))
def test_vectorised_addition_matches_scalar(lam, rho):
    K = KiteAlgebra(Z, 2, lam, rho)
    W = K.window(2)
    defined, keys, ekeys = K.addition_codes(W)
    index = {int(k): i for i, k in enumerate(ekeys)}
    for i, x in enumerate(W):
        for j, y in enumerate(W):
            s = K.add(x, y)
            assert bool(defined[i, j]) == (s is not None)
            if s is not None and int(keys[i, j]) in index:
                assert W[index[int(keys[i, j])]] == s
    table = build_addition_table(K, W)
    assert table is not None
    le = K.order_codes(W)
    assert np.array_equal(le, np.array([[K.leq(x, y) for y in W] for x in W]))
