import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from kitepea import (
    KiteAlgebra,
    Kind,
    NPerfectAlgebra,
    Permutation,
    PoGroup,
    UsageError,
    build_phi,
    canonical_form,
    check_iso,
    components,
    decide_subdirect_irreducibility,
    decompose,
    iso_phi,
    lower,
    upper,
)
from kitepea.structure import Decision, conjugate

Z = PoGroup(Kind.INTEGERS)
perms = st.integers(1, 6).flatmap(lambda m: st.permutations(range(m))).map(tuple)


def test_phi_from_bijections():
    (lam, rho), phi = oracles.PHI_FROM_BIJECTIONS
    assert build_phi(lam, rho).images == phi
    with pytest.raises(UsageError, match="lambda"):
        build_phi((0, 0), (0, 1))
    with pytest.raises(UsageError):
        build_phi((0, 1), (0, 1, 2))


@pytest.mark.parametrize("phi,blocks", oracles.COMPONENTS)
def test_components(phi, blocks):
    assert [list(b) for b in components(phi).blocks] == [list(b) for b in blocks]


@given(perms)
def test_orbits_are_phi_invariant(phi):
    P = Permutation(phi)
    parts = components(P)
    for b, r in zip(parts.blocks, parts.restrictions):
        assert {P(i) for i in b} == set(b)
        for p, i in enumerate(b):
            assert b[r(p)] == P(i)


@given(perms)
def test_canonical_form_iff_single_cycle(phi):
    P = Permutation(phi)
    labels = canonical_form(P)
    assert (labels is not None) == (len(P.cycles()) == 1)
    if labels is not None:
        m = len(P)
        assert sorted(labels) == list(range(m))
        assert conjugate(P, labels).images == tuple((i - 1) % m for i in range(m))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_single_cycle_is_irreducible(m):
    A = NPerfectAlgebra.build(Z, m, Permutation.cycle(m), 1)
    d = decide_subdirect_irreducibility(A)
    assert d.decision is Decision.YES
    assert d.canonical is not None
    assert d.description == f"isomorphic to K with phi(i) = i-1 (mod {m})"


def test_two_orbits_decompose():
    A = NPerfectAlgebra.build(Z, 4, (1, 0, 3, 2), 1)
    assert decide_subdirect_irreducibility(A).decision is Decision.NO
    dec = decompose(A, 1)
    assert [f.block for f in dec.factors] == [(0, 1), (2, 3)]
    assert all(f.decision.decision is Decision.YES for f in dec.factors)
    assert dec.report.ok, dec.report.summary()


def test_non_irreducible_group():
    A = NPerfectAlgebra.build(PoGroup(Kind.INT_VECTORS, 2), 1, (0,), 1)
    assert decide_subdirect_irreducibility(A).decision is Decision.NO


def test_affine_single_orbit_is_unknown():
    A = NPerfectAlgebra.build(PoGroup(Kind.AFFINE_RATIONAL), 2, (1, 0), 1)
    assert decide_subdirect_irreducibility(A).decision is Decision.UNKNOWN


def test_trivial_group_is_two_element_algebra():
    K = KiteAlgebra(PoGroup(Kind.TRIVIAL), 3, (1, 2, 0), (0, 1, 2))
    d = decide_subdirect_irreducibility(K)
    assert d.decision is Decision.YES
    assert d.description == oracles.TRIVIAL_DESCRIPTION
    A = NPerfectAlgebra.build(Z, 0, (), 3)
    assert decide_subdirect_irreducibility(A).description == "4-element chain"


@given(perms)
def test_yes_means_single_factor(phi):
    A = NPerfectAlgebra.build(Z, len(phi), phi, 1)
    d = decide_subdirect_irreducibility(A)
    if d.decision is Decision.YES:
        assert len(components(phi)) == 1


def test_iso_spot_value():
    o = oracles.ISO_SPOT
    K = KiteAlgebra(Z, 2, o["lam"], o["rho"])
    s = K.add(upper(*o["x"]), lower(*o["y"]))
    assert s == upper(*o["sum"])
    assert tuple(iso_phi(K, s)) == o["image"]


BIJ3 = [(0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 1, 0)]


@pytest.mark.parametrize("m", [1, 2])
def test_iso_over_all_pairs(m):
    for lam, rho in itertools.product(itertools.permutations(range(m)), repeat=2):
        K = KiteAlgebra(Z, m, lam, rho)
        report = check_iso(K, 2)
        assert report.ok, report.summary()


@pytest.mark.parametrize("lam,rho", [(a, b) for a in BIJ3 for b in BIJ3[:2]])
def test_iso_three_indices(lam, rho):
    assert check_iso(KiteAlgebra(Z, 3, lam, rho), 1).ok


def test_iso_with_the_reversed_twist_fails():
    lam, rho = Permutation((1, 0, 2)), Permutation((0, 2, 1))
    K = KiteAlgebra(Z, 3, lam, rho)
    wrong = rho.inverse().compose(lam)
    assert wrong != build_phi(lam, rho)
    report = check_iso(K, 2, phi=wrong)
    assert not report.ok
    assert report.failed[0].counterexample
