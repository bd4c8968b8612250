#!/usr/bin/env python3
"""
Tests for the largeness / thickness / prethickness / meagerness
classifiers, on finite groups, G-spaces and windowed integer lines.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import PreconditionError
from src.groups import (
    FiniteSet,
    GSpace,
    WindowedGroup,
    cyclic,
    dihedral,
    interval,
    set_product,
    symmetric,
    translate,
)
from src.models import LIMITS, HorizonPolicy
from src.setcalc import (
    count_patterns,
    covers_window,
    is_k_m_prethick,
    is_k_meager,
    is_large,
    is_m_large,
    is_m_thick,
    is_thick,
    max_gap,
    window_cover_witness,
)


def _brute_large(A, m):
    G = A.carrier
    for j in range(1, m + 1):
        for F in itertools.combinations(range(G.order), j):
            if set_product(FiniteSet.of(G, F), A) == FiniteSet.full(G):
                return True
    return False


def test_m_large_finite():
    print("\n[TEST] m-large on finite groups...")
    G = cyclic(6)
    found = is_m_large(FiniteSet.of(G, [0, 1]), 3)
    assert found.status == "large"
    assert found.witness.F.to_list() == [0, 2, 4]
    assert found.witness.replay()

    assert is_m_large(FiniteSet.of(G, [0, 1]), 2).status == "not-large"
    assert is_m_large(FiniteSet.of(cyclic(5), [0]), 4).status == "not-large"
    whole = is_m_large(FiniteSet.full(G), 1)
    assert whole.witness.F.to_list() == [0]
    assert is_m_large(FiniteSet.empty(G), 6).status == "not-large"
    print("  [OK] {0,2,4} + {0,1} = Z6; singletons of Z5 need 5 shifts")


def test_m_large_windowed():
    """Multiples of 3 in [-27, 27] are 3-large but not 2-large in the inner window."""
    print("\n[TEST] m-large on a windowed line...")
    Z = WindowedGroup(1, 30)
    policy = HorizonPolicy(30, 3)
    A = FiniteSet.of(Z, range(-27, 28, 3))
    found = is_m_large(A, 3, policy)
    assert found.status == "large" and found.horizon_relative
    assert found.witness.F.to_list() == [-2, -1, 0]
    assert found.witness.replay()
    assert is_m_large(A, 2, policy).status == "not-large"
    with pytest.raises(PreconditionError):
        is_m_large(A, 3)
    print("  [OK] F = {-2, -1, 0}")


def test_m_thick():
    print("\n[TEST] m-thick verdicts...")
    G = cyclic(6)
    A = FiniteSet.of(G, [0, 1, 2, 3])
    thick = is_m_thick(A, 2)
    assert thick.verdict == "thick"
    assert len(thick.placements) == count_patterns(6, 2)
    assert thick.replay()

    thin = is_m_thick(A, 3)
    assert thin.verdict == "not-thick"
    assert thin.replay()
    assert len(thin.failing) == 3

    Z = WindowedGroup(1, 30)
    policy = HorizonPolicy(30, 3)
    multiples = FiniteSet.of(Z, range(-30, 31, 3))
    line = is_m_thick(multiples, 2, policy)
    assert line.verdict == "not-thick" and line.replay()
    full = is_m_thick(interval(Z, -30, 30), 3, policy)
    assert full.verdict == "thick" and full.replay()
    print("  [OK] exact placements on Z6, horizon verdicts on the line")


def test_budget_gives_undecided():
    print("\n[TEST] Budget exhaustion...")
    G = cyclic(40)
    A = FiniteSet.of(G, range(20))
    assert is_m_thick(A, 10).verdict == "undecided"
    assert is_m_large(A, 10, limits=LIMITS.with_budget(50)).status == "undecided"
    assert is_k_m_prethick(A, 3, 3, limits=LIMITS.with_budget(10)).status == "undecided"
    assert is_k_meager(A, 5, limits=LIMITS.with_budget(10)).status == "undecided"
    print("  [OK] undecided, never a guess")


def test_prethick():
    print("\n[TEST] (k, m)-prethick searches...")
    Z4 = cyclic(4)
    found = is_k_m_prethick(FiniteSet.of(Z4, [0]), 4, 4)
    assert found.status == "prethick"
    assert found.K.to_list() == [0, 1, 2, 3]
    assert is_k_m_prethick(FiniteSet.of(Z4, [0]), 3, 4).status == "not-prethick"

    Z8 = cyclic(8)
    A = FiniteSet.of(Z8, [0, 4])
    assert is_k_m_prethick(A, 2, 2).status == "not-prethick"
    found = is_k_m_prethick(A, 3, 2)
    assert found.status == "prethick"
    assert found.K.to_list() == [0, 1, 2]
    assert found.verdict.replay()
    print("  [OK] K = {0, 1, 2} makes {0, 4} 2-thick in Z8")


def test_meager():
    print("\n[TEST] k-meager certificates...")
    G = cyclic(6)
    point = FiniteSet.of(G, [0])
    meager = is_k_meager(point, 1)
    assert meager.status == "meager"
    assert len(meager.certificates) == 6
    assert meager.replay()
    thick = is_k_meager(point, 6)
    assert thick.status == "not-meager"
    assert thick.thick_K.to_list() == list(range(6))

    Z = WindowedGroup(1, 30)
    policy = HorizonPolicy(30, 3)
    sparse = is_k_meager(FiniteSet.of(Z, [0]), 2, policy)
    assert sparse.status == "meager" and sparse.replay()
    assert len(sparse.certificates) == count_patterns(7, 2)
    assert is_k_meager(interval(Z, -27, 27), 1, policy).status == "not-meager"
    print("  [OK] guards replay on Z6 and on the line")


def test_orbits_and_spaces():
    print("\n[TEST] Classifiers on a G-space with two orbits...")
    X = GSpace.from_table(cyclic(2), [[0, 1, 2], [1, 0, 2]])
    assert is_large(FiniteSet.of(X, [0, 2]))
    assert not is_large(FiniteSet.of(X, [0, 1]))
    assert is_thick(FiniteSet.of(X, [2]))
    assert not is_thick(FiniteSet.of(X, [0]))
    found = is_m_large(FiniteSet.of(X, [1, 2]), 2)
    assert found.status == "large" and found.witness.replay()
    print("  [OK] orbit criteria")


def test_window_helpers():
    print("\n[TEST] Window cover helpers...")
    Z = WindowedGroup(1, 20)
    S = FiniteSet.of(Z, [-10, -4, 3, 10])
    assert max_gap(S, -12, 12) == 7
    assert covers_window(interval(Z, -4, 4), S, -12, 12)
    assert not covers_window(interval(Z, -2, 2), S, -12, 12)
    witness = window_cover_witness(S, -12, 12)
    assert witness.F.to_list() == list(range(-3, 4))
    assert witness.replay()
    print("  [OK] gaps and symmetric covers agree")


@settings(derandomize=True, max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=8),
    m=st.integers(min_value=1, max_value=3),
    data=st.data(),
)
def test_large_matches_brute_force(n, m, data):
    G = cyclic(n)
    A = FiniteSet.of(G, data.draw(st.sets(st.integers(min_value=0, max_value=n - 1))))
    result = is_m_large(A, m)
    assert (result.status == "large") == _brute_large(A, m)
    if result.witness is not None:
        assert len(result.witness.F) <= m and result.witness.replay()


def test_evens_reach_the_horizon():
    """Even numbers over the whole window: 1-meager, and 2-prethick through K = {-1, 0}."""
    print("\n[TEST] Classifiers on a set touching the horizon...")
    Z = WindowedGroup(1, 30)
    policy = HorizonPolicy(30, 1)
    evens = FiniteSet.of(Z, range(-30, 31, 2))
    meager = is_k_meager(evens, 1, policy)
    assert meager.status == "meager"
    assert len(meager.certificates) == 3 and meager.replay()

    found = is_k_m_prethick(evens, 2, 2, policy)
    assert found.status == "prethick"
    assert found.K.to_list() == [-1, 0]
    assert found.shifts_tried == 4 and found.verdict.replay()
    assert is_k_meager(evens, 2, policy).status == "not-meager"
    print("  [OK] no overflow; K = {-1, 0} fills the window")


def _naive_thick(A, m):
    G = A.carrier
    members = set(A.to_list())
    return all(
        any(all(G.mul(f, x) in members for f in F) for x in range(G.order))
        for j in range(1, m + 1)
        for F in itertools.combinations(range(G.order), j)
    )


def _shift(K, A):
    G = A.carrier
    return FiniteSet.of(G, [G.mul(k, a) for k in K for a in A.to_list()])


def _naive_prethick(A, k, m):
    n = A.carrier.order
    return any(
        _naive_thick(_shift(K, A), m)
        for j in range(1, k + 1)
        for K in itertools.combinations(range(n), j)
    )


def _naive_meager(A, k):
    n = A.carrier.order
    return not any(
        len(_shift(K, A)) == n
        for j in range(1, k + 1)
        for K in itertools.combinations(range(n), j)
    )


@settings(derandomize=True, max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=10),
    k=st.integers(min_value=1, max_value=2),
    m=st.integers(min_value=1, max_value=2),
    data=st.data(),
)
def test_thick_prethick_meager_match_brute_force(n, k, m, data):
    G = cyclic(n)
    A = FiniteSet.of(G, data.draw(st.sets(st.integers(min_value=0, max_value=n - 1))))
    thick = is_m_thick(A, m)
    assert (thick.verdict == "thick") == _naive_thick(A, m)
    assert thick.replay()
    assert (is_k_m_prethick(A, k, m).status == "prethick") == _naive_prethick(A, k, m)
    meager = is_k_meager(A, k)
    assert (meager.status == "meager") == _naive_meager(A, k)
    assert meager.replay()


def _non_abelian():
    return [symmetric(3), dihedral(4)]


def test_thick_iff_complement_not_large():
    print("\n[TEST] A is m-thick exactly when its complement is not m-large...")
    groups = [cyclic(n) for n in range(1, 9)] + _non_abelian()
    checked = 0
    for G in groups:
        for mask in range(2 ** G.order):
            A = FiniteSet.of(G, [x for x in range(G.order) if mask >> x & 1])
            rest = A.complement()
            for m in (1, 2):
                thick = is_m_thick(A, m).verdict == "thick"
                assert thick == (is_m_large(rest, m).status == "not-large"), (G.name, A.to_list(), m)
                checked += 1

    X = GSpace.from_table(cyclic(2), [[0, 1, 2], [1, 0, 2]])
    for mask in range(8):
        A = FiniteSet.of(X, [x for x in range(3) if mask >> x & 1])
        assert is_thick(A) == (not is_large(A.complement()))
    print(f"  [OK] {checked} (A, m) pairs on groups of order <= 8")


def _right_translate(A, x):
    G = A.carrier
    return FiniteSet.of(G, G.mul_table[A.members, x])


@settings(derandomize=True, max_examples=60, deadline=None)
@given(
    which=st.integers(min_value=0, max_value=3),
    k=st.integers(min_value=1, max_value=2),
    m=st.integers(min_value=1, max_value=2),
    data=st.data(),
)
def test_verdicts_ignore_translation(which, k, m, data):
    G = [cyclic(6), cyclic(7), *_non_abelian()][which]
    A = FiniteSet.of(G, data.draw(st.sets(st.integers(min_value=0, max_value=G.order - 1))))
    x = data.draw(st.integers(min_value=0, max_value=G.order - 1))

    def verdicts(S):
        return (
            is_m_large(S, m).status,
            is_m_thick(S, m).verdict,
            is_k_m_prethick(S, k, m).status,
            is_k_meager(S, k).status,
        )

    expected = verdicts(A)
    assert verdicts(translate(x, A)) == expected
    assert verdicts(_right_translate(A, x)) == expected


@settings(derandomize=True, max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=9),
    data=st.data(),
)
def test_verdicts_are_monotone(n, data):
    G = cyclic(n)
    bigger = data.draw(st.sets(st.integers(min_value=0, max_value=n - 1)))
    smaller = data.draw(st.sets(st.sampled_from(sorted(bigger)))) if bigger else set()
    A, B = FiniteSet.of(G, smaller), FiniteSet.of(G, bigger)

    for m in (1, 2, 3):
        if is_m_large(A, m).status == "large":
            assert is_m_large(B, m).status == "large"
            assert is_m_large(A, m + 1).status == "large"
        if is_m_thick(A, m).verdict == "thick":
            assert is_m_thick(B, m).verdict == "thick"
        if is_m_thick(A, m + 1).verdict == "thick":
            assert is_m_thick(A, m).verdict == "thick"
    for k in (1, 2):
        if is_k_m_prethick(A, k, 2).status == "prethick":
            assert is_k_m_prethick(B, k, 2).status == "prethick"
            assert is_k_m_prethick(A, k + 1, 2).status == "prethick"
        if is_k_meager(B, k).status == "meager":
            assert is_k_meager(A, k).status == "meager"
        if is_k_meager(A, k + 1).status == "meager":
            assert is_k_meager(A, k).status == "meager"


def run_all_tests():
    print("=" * 60)
    print("Set Classifiers - Test Suite")
    print("=" * 60)

    tests = [
        ("m-large finite", test_m_large_finite),
        ("m-large windowed", test_m_large_windowed),
        ("m-thick", test_m_thick),
        ("Budget", test_budget_gives_undecided),
        ("Prethick", test_prethick),
        ("Meager", test_meager),
        ("G-spaces", test_orbits_and_spaces),
        ("Window helpers", test_window_helpers),
        ("Largeness vs brute force", test_large_matches_brute_force),
        ("Evens up to the horizon", test_evens_reach_the_horizon),
        ("Thick, prethick, meager vs brute force", test_thick_prethick_meager_match_brute_force),
        ("Thick vs complement large", test_thick_iff_complement_not_large),
        ("Translation invariance", test_verdicts_ignore_translation),
        ("Monotonicity", test_verdicts_are_monotone),
    ]

    results = []
    for name, test_func in tests:
        try:
            test_func()
            results.append((name, True))
        except Exception as e:
            print(f"\n  [ERROR] Test '{name}' failed: {e!r}")
            results.append((name, False))

    print("\n" + "=" * 60)
    for name, passed in results:
        print(f"  {'[PASS]' if passed else '[FAIL]'} - {name}")
    passed_count = sum(1 for _, p in results if p)
    print(f"\n  Results: {passed_count}/{len(results)} tests passed")
    return 0 if passed_count == len(results) else 1


if __name__ == '__main__':
    import sys
    sys.exit(run_all_tests())
