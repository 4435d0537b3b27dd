from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kitepea import KiteAlgebra, Kind, NPerfectAlgebra, PoGroup, Status, check_pea_axioms, check_symmetric, lower, upper
from kitepea.errors import WindowTooLargeError
from kitepea.pea import StateMap, check_normal_ideal, check_state, diffs, mv_ops, negations

Z = PoGroup(Kind.INTEGERS)


class CorruptedKite(KiteAlgebra):
    """A kite whose sum of two particular lower elements is wrong."""

    def add(self, a, b):
        if a == lower(1, 0) and b == lower(0, 1):
            return lower(2, 1)
        return super().add(a, b)

    def addition_codes(self, elements):
        return None


def test_kite_axioms_pass():
    K = KiteAlgebra(Z, 2, (1, 0), (0, 1))
    report = check_pea_axioms(K, 2)
    assert report.ok, report.summary()
    assert all(c.status is Status.PASS for c in report.checks)


def test_corrupted_addition_is_caught():
    K = CorruptedKite(Z, 2, (0, 1), (0, 1))
    report = check_pea_axioms(K, 2)
    assert not report.ok
    for c in report.failed:
        assert c.counterexample


def test_window_cap():
    K = KiteAlgebra(Z, 2, (0, 1), (0, 1))
    with pytest.raises(WindowTooLargeError):
        check_pea_axioms(K, 2, max_window=5)


def test_constant_state_fails_with_counterexample():
    K = KiteAlgebra(Z, 1, (0,), (0,))
    report = check_state(K, StateMap(lambda x: Fraction(1, 2), "half"), 2)
    assert report.status_of("s(1) = 1") is Status.FAIL
    assert report.status_of("additive") is Status.FAIL
    assert "s(a+b)" in report.failed[-1].counterexample


def test_zero_ideal_and_lower_cone():
    K = KiteAlgebra(Z, 2, (1, 0), (0, 1))
    assert check_normal_ideal(K, lambda x: x == K.zero, 2).ok
    # the lower cone is a normal ideal of the kite
    report = check_normal_ideal(K, lambda x: x.cone == "L", 2)
    assert report.ok, report.summary()


def test_upper_cone_is_not_an_ideal():
    K = KiteAlgebra(Z, 1, (0,), (0,))
    report = check_normal_ideal(K, lambda x: x.cone == "U", 2)
    assert report.status_of("contains zero") is Status.FAIL


def test_negations_and_diffs_helpers():
    K = KiteAlgebra(Z, 2, (1, 0), (0, 1))
    minus, tilde = negations(K, lower(1, 2))
    assert K.add(minus, lower(1, 2)) == K.one
    assert K.add(lower(1, 2), tilde) == K.one
    left, right = diffs(K, lower(1, 0), upper(-1, 0))
    assert K.add(left, lower(1, 0)) == upper(-1, 0)
    assert K.add(lower(1, 0), right) == upper(-1, 0)
    assert diffs(K, upper(0, 0), lower(0, 0)) == (None, None)


def test_mv_operations_on_a_chain():
    # the 3-element chain 0 < a < 1 as the 2-perfect interval over the trivial group
    A = NPerfectAlgebra.build(PoGroup(Kind.TRIVIAL), 0, (), 2)
    zero, mid, one = A.window(0)
    assert (zero.level, mid.level, one.level) == (0, 1, 2)
    assert mv_ops(A, mid, mid) == (one, zero)
    assert mv_ops(A, zero, mid) == (mid, zero)
    assert mv_ops(A, one, mid) == (one, mid)


def test_symmetric_on_commutative_kite():
    assert check_symmetric(KiteAlgebra(Z, 2, (0, 1), (0, 1)), 2).ok
    report = check_symmetric(KiteAlgebra(Z, 2, (0, 1), (1, 0)), 2)
    assert not report.ok
    assert "a^-" in report.failed[0].counterexample


def test_sample_is_distinct_and_seeded():
    A = NPerfectAlgebra.build(PoGroup(Kind.AFFINE_RATIONAL), 1, (0,), 1)
    s = A.sample(40, 7)
    assert len(s) == len(set(s)) == 40
    assert s == A.sample(40, 7)


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
def test_diffs_re_add(a, b, c, d):
    K = KiteAlgebra(Z, 2, (1, 0), (1, 0))
    x, y = lower(a, b), upper(-c, -d)
    left, right = diffs(K, x, y)
    assert K.add(left, x) == y == K.add(x, right)
