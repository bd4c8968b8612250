#!/usr/bin/env python3
"""
Tests for greedy covers, separated nets and prethick cells of covers.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.covering import (
    cover_bound,
    greedy_cover,
    max_E_separated,
    partition_large_cell,
    prethick_cell,
)
from src.errors import PreconditionError
from src.groups import (
    FiniteSet,
    WindowedGroup,
    clipped_product,
    cyclic,
    dihedral,
    interval,
    inverse_set,
    set_product,
    symmetric,
)
from src.models import HorizonPolicy
from src.setcalc import is_m_thick


def test_greedy_cover_small():
    print("\n[TEST] Greedy cover of Z6 by translates of {0, 1}...")
    G = cyclic(6)
    cert = greedy_cover(G, FiniteSet.of(G, [0, 1]))
    assert cert.B.to_list() == [0, 2, 4]
    assert cert.bound == pytest.approx(3 * (math.log(2) + 1))
    assert cert.bound_ceil == 6
    assert cert.replay()
    assert cert.to_dict()["size"] == 3
    with pytest.raises(PreconditionError):
        greedy_cover(G, FiniteSet.empty(G))
    print(f"  [OK] B = {cert.B.to_list()}, bound {cert.bound:.3f}")


def test_greedy_cover_random_bound():
    """A seeded quarter of Z100 is covered within (|G|/|A|)(ln|A| + 1) translates."""
    print("\n[TEST] Greedy cover bound on Z100...")
    G = cyclic(100)
    rng = np.random.default_rng(7)
    A = FiniteSet.of(G, rng.choice(100, size=25, replace=False))
    cert = greedy_cover(G, A)
    assert len(cert.B) <= math.ceil(cover_bound(100, 25))
    assert set_product(cert.B, A) == FiniteSet.full(G)
    print(f"  [OK] {len(cert.B)} translates, bound {cover_bound(100, 25):.2f}")


def test_partition_large_cell():
    print("\n[TEST] Covering by the largest partition cell...")
    G = cyclic(6)
    cells = [FiniteSet.of(G, [0, 1]), FiniteSet.of(G, [2, 3, 4, 5])]
    index, cert = partition_large_cell(G, cells)
    assert index == 1
    assert cert.B.to_list() == [0, 2]
    assert cert.partition_bound == pytest.approx(2 * (math.log(3) + 1))
    assert cert.replay()

    with pytest.raises(PreconditionError):
        partition_large_cell(G, [FiniteSet.of(G, [0, 1]), FiniteSet.of(G, [1, 2, 3, 4, 5])])
    with pytest.raises(PreconditionError):
        partition_large_cell(G, [FiniteSet.of(G, [0, 1])])
    print("  [OK] two translates of {2, 3, 4, 5}")


def test_separated_net_finite():
    print("\n[TEST] Maximal E-separated set in Z12...")
    G = cyclic(12)
    cert = max_E_separated(FiniteSet.of(G, [0, 1, 2]), FiniteSet.full(G))
    assert cert.B.to_list() == [0, 3, 6, 9]
    assert cert.sup_mass == Fraction(1, 3)
    assert cert.replay()
    assert cert.to_dict()["sup_translate_mass"] == "1/3"

    sparse = max_E_separated(FiniteSet.of(G, [0, 1, 2]), FiniteSet.of(G, [0, 1, 5]))
    assert sparse.B.to_list() == [0, 5]
    assert sparse.replay()
    print("  [OK] B = {0, 3, 6, 9}, every translate carries mass <= 1/3")


def test_separated_net_line():
    print("\n[TEST] Maximal E-separated set on a windowed line...")
    Z = WindowedGroup(1, 20)
    cert = max_E_separated(interval(Z, 0, 2), FiniteSet.full(Z))
    assert cert.B.to_list() == list(range(-18, 19, 3))
    assert cert.sup_mass == Fraction(1, 3)
    assert cert.window == (-20, 20)
    assert cert.replay()

    policy = HorizonPolicy(20, 5)
    inner = max_E_separated(FiniteSet.of(Z, [0, 4]), FiniteSet.full(Z), policy)
    assert inner.window == (-15, 15)
    assert inner.B.to_list()[:2] == [-15, -14]
    assert inner.replay()
    print("  [OK] greedy spacing 3 for an interval of width 3")


def test_prethick_cell():
    """Cell {1, 3} of the cover {0, 2}, {1, 3} of Z4 becomes 2-thick after shifting by {0, 3}."""
    print("\n[TEST] Prethick cell of a two-cell cover...")
    G = cyclic(4)
    found = prethick_cell([FiniteSet.of(G, [0, 2]), FiniteSet.of(G, [1, 3])], 2)
    assert found.status == "prethick"
    assert found.index == 1
    assert found.K.to_list() == [0, 3]
    assert len(found.K) <= found.bound == 2
    assert found.verdict.replay()
    assert len(found.trace) == 1

    whole = prethick_cell([FiniteSet.full(G)], 3)
    assert whole.index == 0 and whole.K.to_list() == [0]

    with pytest.raises(PreconditionError):
        prethick_cell([FiniteSet.of(G, [0, 1])], 2)
    with pytest.raises(PreconditionError):
        prethick_cell([interval(WindowedGroup(1, 5), -5, 5)], 2)
    print(f"  [OK] cell {found.index}, K = {found.K.to_list()}")


def test_partition_bound_on_prime_cycles():
    """Random n-partitions of Z_p: the largest cell needs at most n(ln(p/n) + 1) translates."""
    print("\n[TEST] Partition bound on random partitions of Z_101, Z_211 and Z_499...")
    rng = np.random.default_rng(2024)
    trials = 0
    for p in (101, 211, 499):
        G = cyclic(p)
        for t in range(100):
            n = 2 + t % 3
            labels = rng.integers(0, n, size=p)
            labels[:n] = np.arange(n)
            cells = [FiniteSet.of(G, np.flatnonzero(labels == i)) for i in range(n)]
            index, cert = partition_large_cell(G, cells)
            assert len(cert.B) <= math.ceil(n * (math.log(p / n) + 1))
            assert len(cells[index]) == max(len(c) for c in cells)
            trials += 1
    print(f"  [OK] {trials} partitions within the bound")


@settings(derandomize=True, max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=8),
    cells=st.integers(min_value=2, max_value=3),
    data=st.data(),
)
def test_prethick_cell_is_sound(n, cells, data):
    G = cyclic(n)
    labels = data.draw(st.lists(st.integers(min_value=0, max_value=cells - 1), min_size=n, max_size=n))
    extra = data.draw(st.sets(st.integers(min_value=0, max_value=n - 1), max_size=2))
    cover = [FiniteSet.of(G, [x for x in range(n) if labels[x] == i]) for i in range(cells)]
    # overlap is allowed in a cover
    cover[-1] = cover[-1].union(FiniteSet.of(G, extra))
    found = prethick_cell(cover, 2)
    assert found.status == "prethick"
    assert len(found.K) <= 2 ** (cells - 1)
    assert is_m_thick(set_product(found.K, cover[found.index]), 2).verdict == "thick"


@settings(derandomize=True, max_examples=50, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=16),
    data=st.data(),
)
def test_greedy_cover_always_replays(n, data):
    G = cyclic(n)
    items = data.draw(st.sets(st.integers(min_value=0, max_value=n - 1), min_size=1))
    A = FiniteSet.of(G, items)
    cert = greedy_cover(G, A)
    assert cert.replay()
    assert len(cert.B) <= cert.bound_ceil


def _brute_thick(A, m):
    G = A.carrier
    members = set(A.to_list())
    for j in range(1, m + 1):
        for F in itertools.combinations(range(G.order), j):
            if not any(all(G.mul(f, x) in members for f in F) for x in range(G.order)):
                return False
    return True


def _assert_sound(cover, m):
    found = prethick_cell(cover, m)
    assert found.status == "prethick"
    assert len(found.K) <= m ** (len(cover) - 1)
    assert _brute_thick(set_product(found.K, cover[found.index]), m), [c.to_list() for c in cover]


def test_prethick_cell_on_every_small_cover():
    print("\n[TEST] Prethick cells of every 2- and 3-cell cover of Z_n, n <= 7...")
    checked = 0
    for n in range(1, 8):
        G = cyclic(n)
        # each point lies in cell 0, cell 1 or both
        for memberships in itertools.product((1, 2, 3), repeat=n):
            cover = [FiniteSet.of(G, [x for x in range(n) if memberships[x] & bit]) for bit in (1, 2)]
            _assert_sound(cover, 2)
            checked += 1
        for labels in itertools.product(range(3), repeat=n):
            cover = [FiniteSet.of(G, [x for x in range(n) if labels[x] == i]) for i in range(3)]
            _assert_sound(cover, 2)
            checked += 1

    rng = np.random.default_rng(8)
    G = cyclic(8)
    for t in range(500):
        cells = 2 + t % 2
        memberships = rng.integers(1, 2 ** cells, size=8)
        cover = [FiniteSet.of(G, np.flatnonzero(memberships & (1 << i))) for i in range(cells)]
        _assert_sound(cover, 2)
        checked += 1
    print(f"  [OK] {checked} covers, every shifted cell 2-thick by brute force")


def test_windowed_nets_on_a_wide_line():
    print("\n[TEST] Separated nets on a line of horizon 10^5...")
    H = 10 ** 5
    Z = WindowedGroup(1, H)
    rng = np.random.default_rng(7)
    for t in range(100):
        if t % 2 == 0:
            width = int(rng.integers(5, 51))
            start = int(rng.integers(-20, 21))
            E = interval(Z, start, start + width - 1)
            S = FiniteSet.of(Z, np.flatnonzero(rng.random(2 * H + 1) < rng.uniform(0.05, 0.9)) - H)
        else:
            E = FiniteSet.of(Z, rng.choice(20, size=3, replace=False))
            S = FiniteSet.of(Z, rng.choice(2 * H + 1, size=400, replace=False) - H)
        cert = max_E_separated(E, S)
        assert cert.replay()
        assert cert.B.issubset(S)
        assert cert.sup_mass <= Fraction(1, len(E))
        spread = set_product(inverse_set(E), E)
        for d in spread.members[spread.members > 0]:
            assert not np.isin(cert.B.members + d, cert.B.members).any()
        assert S.intersection(interval(Z, *cert.window)).issubset(clipped_product(spread, cert.B))
    print("  [OK] 100 nets: disjoint, maximal, mass at most 1/|E|")


def test_finite_nets_at_random():
    print("\n[TEST] Separated nets on random finite groups...")
    rng = np.random.default_rng(9)
    groups = [cyclic(n) for n in (5, 12, 17, 30)] + [symmetric(3), symmetric(4), dihedral(5), dihedral(8)]
    for t in range(100):
        G = groups[t % len(groups)]
        E = FiniteSet.of(G, rng.choice(G.order, size=int(rng.integers(1, min(4, G.order) + 1)), replace=False))
        S = FiniteSet.of(G, np.flatnonzero(rng.random(G.order) < 0.6))
        cert = max_E_separated(E, S)
        assert cert.replay()
        assert cert.B.issubset(S)
        assert len(set_product(E, cert.B)) == len(E) * len(cert.B)
        assert S.issubset(set_product(set_product(inverse_set(E), E), cert.B))
        assert cert.sup_mass <= Fraction(1, len(E))
    print("  [OK] 100 nets on cyclic, symmetric and dihedral groups")


def run_all_tests():
    print("=" * 60)
    print("Covering Constructions - Test Suite")
    print("=" * 60)

    tests = [
        ("Greedy cover", test_greedy_cover_small),
        ("Greedy cover bound", test_greedy_cover_random_bound),
        ("Partition cell cover", test_partition_large_cell),
        ("Separated net (finite)", test_separated_net_finite),
        ("Separated net (line)", test_separated_net_line),
        ("Prethick cell", test_prethick_cell),
        ("Partition bound on Z_p", test_partition_bound_on_prime_cycles),
        ("Prethick cell soundness", test_prethick_cell_is_sound),
        ("Greedy cover replays", test_greedy_cover_always_replays),
        ("Prethick cell, every small cover", test_prethick_cell_on_every_small_cover),
        ("Nets on a wide line", test_windowed_nets_on_a_wide_line),
        ("Nets on finite groups", test_finite_nets_at_random),
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
