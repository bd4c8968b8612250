#!/usr/bin/env python3
"""
Tests for measures, submeasure oracles, the axiom checker, window
density witnesses and the exact sigma_H solver.
"""

from fractions import Fraction

import numpy as np
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
    is_subgroup,
    product,
    regular_space,
    symmetric,
    translate,
)
from src.models import HorizonPolicy
from src.submeasure.axioms import check_axioms
from src.submeasure.base import SubmeasureOracle
from src.submeasure.counting import counting_measure, orbit_cover, transitivity_obstruction
from src.submeasure.measures import FiniteMeasure, convolve, dirac, tv_distance, uniform
from src.submeasure.sigma import (
    SoleckiOracle,
    complement_largeness,
    sigma_estimate,
    solecki_sigma,
)
from src.submeasure.window import syndetic_witness_Z, window_density


class PointMass(SubmeasureOracle):
    """1 on sets containing the identity, 0 elsewhere: not invariant."""

    name = "point-mass"

    def eval(self, A):
        return Fraction(1) if 0 in A else Fraction(0)

    def syndetic_witness(self, A, eps):
        return None


def test_measures():
    print("\n[TEST] Finite measures...")
    Z4 = cyclic(4)
    mu = convolve(uniform(FiniteSet.of(Z4, [0, 2])), uniform(FiniteSet.of(Z4, [0, 1])))
    assert mu == uniform(FiniteSet.full(Z4))
    assert mu.mass(FiniteSet.of(Z4, [0, 1])) == Fraction(1, 2)
    assert tv_distance(uniform(FiniteSet.of(Z4, [0, 1])), dirac(Z4, 0)) == 1
    assert mu.to_dict() == {"0": "1/4", "1": "1/4", "2": "1/4", "3": "1/4"}
    with pytest.raises(PreconditionError):
        FiniteMeasure.from_weights(Z4, {0: Fraction(1, 2)})
    print("  [OK] convolution of two uniforms is uniform on Z4")


def test_counting_measure():
    print("\n[TEST] Counting measure and its syndetic witnesses...")
    Z6 = cyclic(6)
    counting = counting_measure(regular_space(Z6))
    X6 = counting.carrier
    assert counting.eval(FiniteSet.of(X6, [0, 1])) == Fraction(1, 3)
    L, witness = counting.syndetic_witness(FiniteSet.of(X6, [0, 1]), Fraction(1, 2))
    assert L.to_list() == [2]
    assert witness.replay() and len(witness.F) == 6

    X = GSpace.from_table(cyclic(2), [[0, 1, 2], [1, 0, 2]])
    two_orbits = counting_measure(X)
    assert two_orbits.syndetic_witness(FiniteSet.empty(X), Fraction(1, 2)) is None
    obstruction = transitivity_obstruction(X)
    assert obstruction.threshold == Fraction(1, 2)
    assert obstruction.min_large_mass == Fraction(2, 3)
    assert transitivity_obstruction(X6) is None
    with pytest.raises(PreconditionError):
        two_orbits.syndetic_witness(FiniteSet.empty(X), Fraction(1, 3))
    print("  [OK] transitive: one point suffices; two orbits: none below 1/2")


def test_orbit_cover():
    print("\n[TEST] Orbit covers...")
    Z4 = cyclic(4)
    witness = orbit_cover(Z4, FiniteSet.of(Z4, [3]))
    assert len(witness.F) == 4 and witness.replay()
    X = GSpace.from_table(cyclic(2), [[0, 1, 2], [1, 0, 2]])
    assert orbit_cover(X, FiniteSet.of(X, [1, 2])).replay()
    with pytest.raises(PreconditionError):
        orbit_cover(X, FiniteSet.of(X, [0]))
    print("  [OK] |F| = 4 for a single point of Z4")


def test_axioms_counting():
    print("\n[TEST] Axiom checks on counting measures...")
    Z6 = cyclic(6)
    samples = [FiniteSet.of(Z6, s) for s in ([0, 1], [2, 3, 4], [5], [1, 3, 5])]
    report = check_axioms(counting_measure(Z6), samples)
    assert report.ok, report.to_dict()
    assert report.checks > len(samples)

    X = GSpace.from_table(cyclic(2), [[0, 1, 2], [1, 0, 2]])
    report = check_axioms(counting_measure(X), [FiniteSet.of(X, [0, 2])])
    assert report.axioms_failed() == {"syndetic"}
    print("  [OK] the two-orbit space fails only the syndetic check")


def test_axioms_flag_non_invariant():
    print("\n[TEST] Axiom checks catch a non-invariant oracle...")
    Z6 = cyclic(6)
    report = check_axioms(PointMass(Z6), [FiniteSet.of(Z6, [1, 2]), FiniteSet.of(Z6, [0, 3])])
    assert report.axioms_failed() == {"left-invariance"}
    assert all(v.witnesses[1] != 0 for v in report.violations)
    print(f"  [OK] {len(report.violations)} invariance violations")


def test_window_density():
    print("\n[TEST] Upper window density on a windowed line...")
    Z = WindowedGroup(1, 200)
    policy = HorizonPolicy(200, 20)
    fives = FiniteSet.of(Z, range(-200, 201, 5))
    oracle = window_density(fives, 10, policy)
    assert oracle.eval(fives) == Fraction(1, 5)
    assert oracle.eval(FiniteSet.empty(Z)) == 0
    assert oracle.eval(FiniteSet.full(Z)) == 1

    samples = [fives, FiniteSet.of(Z, range(-5, 6)), FiniteSet.of(Z, [0, 7])]
    report = check_axioms(oracle, samples)
    assert report.ok, report.to_dict()

    with pytest.raises(PreconditionError):
        window_density(Z, 100, policy)
    print("  [OK] density 1/5 and a clean axiom report")


def test_window_density_inner_placements():
    """For sets in the inner window, scanning the whole horizon changes nothing."""
    print("\n[TEST] Window density against inner-window placements...")
    Z = WindowedGroup(1, 60)
    policy = HorizonPolicy(60, 10)
    lo, hi = policy.inner_window()
    oracle = window_density(Z, 8, policy)
    rng = np.random.default_rng(5)
    for _ in range(50):
        members = np.flatnonzero(rng.random(hi - lo + 1) < rng.uniform(0.05, 0.8)) + lo
        A = FiniteSet.of(Z, members)
        inner = max(int(((members >= x) & (members < x + 8)).sum()) for x in range(lo, hi + 1))
        assert oracle.eval(A) == Fraction(inner, 8)
        shift = int(rng.integers(-10, 11))
        assert oracle.eval(FiniteSet.of(Z, members + shift)) == oracle.eval(A)
    print("  [OK] 50 sets, same value both ways and under shifts")


def test_syndetic_witness_line():
    print("\n[TEST] Syndetic witness of small density on the line...")
    Z = WindowedGroup(1, 200)
    policy = HorizonPolicy(200, 20)
    threes = FiniteSet.of(Z, range(-198, 199, 3))
    found = syndetic_witness_Z(threes, Fraction(1, 2), 8, policy)
    assert found.e == 4
    assert found.B.isdisjoint(threes)
    assert found.density < Fraction(1, 2)
    assert found.gap <= found.gap_bound == 16
    assert found.replay()

    with pytest.raises(PreconditionError):
        syndetic_witness_Z(threes, Fraction(1, 2), 6, policy)
    print(f"  [OK] {len(found.B)} points, density {found.density}, gap {found.gap}")


def test_solecki_sigma():
    print("\n[TEST] Exact sigma_H on Z12...")
    G = cyclic(12)
    A = FiniteSet.of(G, [0, 3, 6, 9])
    cert = solecki_sigma(G, FiniteSet.full(G), A)
    assert cert.value == Fraction(1, 3)
    assert cert.replay()
    assert cert.to_dict()["value"] == "1/3"

    H = FiniteSet.of(G, [0, 4, 8])
    assert solecki_sigma(G, H, FiniteSet.of(G, [0, 1])).value == Fraction(1, 3)
    assert solecki_sigma(G, H, FiniteSet.empty(G)).value == 0
    assert solecki_sigma(G, H, FiniteSet.full(G)).value == 1
    with pytest.raises(PreconditionError):
        solecki_sigma(G, FiniteSet.of(G, [0, 1]), A)
    print("  [OK] sigma = 1/3 for the index-3 subgroup")


def _small_groups():
    """Groups of order <= 10, three of them non-abelian."""
    Z2 = cyclic(2)
    return (
        [cyclic(n) for n in range(1, 11)]
        + [product(Z2, Z2), product(Z2, cyclic(4)), product(product(Z2, Z2), Z2), product(cyclic(3), cyclic(3))]
        + [symmetric(3), dihedral(4), dihedral(5)]
    )


def _subgroups(G):
    found = []
    for mask in range(1, 2 ** G.order):
        H = FiniteSet.of(G, [x for x in range(G.order) if mask >> x & 1])
        if is_subgroup(G, H):
            found.append(H)
    return found


def test_sigma_estimate_is_exact():
    print("\n[TEST] Closed-form sigma bracket against the linear program...")
    rng = np.random.default_rng(4)
    checked = 0
    for G in [g for g in _small_groups() if g.order <= 8]:
        full = FiniteSet.full(G)
        for H in _subgroups(G):
            if H == full:
                samples = [FiniteSet.of(G, [x for x in range(G.order) if mask >> x & 1])
                           for mask in range(2 ** G.order)]
            else:
                samples = [FiniteSet.of(G, np.flatnonzero(rng.random(G.order) < 0.5)) for _ in range(12)]
            for A in samples:
                bracket = sigma_estimate(G, H, A)
                exact = solecki_sigma(G, H, A).value
                assert bracket.lo == exact == bracket.hi, (G.name, H.to_list(), A.to_list())
                assert bracket.width == 0 and bracket.replay()
                checked += 1

    Z16 = cyclic(16)
    assert sigma_estimate(Z16, FiniteSet.full(Z16), FiniteSet.of(Z16, range(8))).hi == Fraction(1, 2)
    assert sigma_estimate(Z16, FiniteSet.full(Z16), FiniteSet.of(Z16, [0, 1, 5, 11])).hi == Fraction(1, 4)
    Z12 = cyclic(12)
    bracket = sigma_estimate(Z12, FiniteSet.of(Z12, [0, 4, 8]), FiniteSet.of(Z12, [0, 1]))
    assert bracket.to_dict() == {"lo": "1/3", "hi": "1/3", "width": "0", "lower_support": [0, 4, 8]}

    big = cyclic(300)
    threes = sigma_estimate(big, FiniteSet.full(big), FiniteSet.of(big, range(0, 300, 3)))
    assert threes.lo == threes.hi == Fraction(1, 3)
    with pytest.raises(PreconditionError):
        sigma_estimate(Z12, FiniteSet.of(Z12, [0, 1]), FiniteSet.of(Z12, [0]))
    print(f"  [OK] {checked} instances, every bracket has width 0 and the exact value")


def _random_measure(rng, G):
    support = rng.choice(G.order, size=int(rng.integers(1, G.order + 1)), replace=False)
    raw = rng.integers(1, 10, size=len(support))
    total = int(raw.sum())
    return FiniteMeasure.from_weights(G, {int(x): Fraction(int(w), total) for x, w in zip(support, raw)})


def test_convolution_identities():
    print("\n[TEST] Convolution identities on random measures...")
    rng = np.random.default_rng(10)
    groups = [cyclic(6), cyclic(9), symmetric(3), dihedral(4), dihedral(5)]
    for t in range(100):
        G = groups[t % len(groups)]
        mu, nu, rho = (_random_measure(rng, G) for _ in range(3))
        point = dirac(G, G.identity)
        assert convolve(point, mu) == mu == convolve(mu, point)
        assert convolve(convolve(mu, nu), rho) == convolve(mu, convolve(nu, rho))
        assert sum(convolve(mu, nu).weights) == 1

    for t in range(200):
        G = groups[t % len(groups)]
        mu, nu = _random_measure(rng, G), _random_measure(rng, G)
        A = FiniteSet.of(G, np.flatnonzero(rng.random(G.order) < 0.4))
        translates = [FiniteSet.of(G, G.mul_table[A.members, y]) for y in range(G.order)]
        ceiling = max(mu.mass(S) for S in translates)
        mixed = convolve(mu, nu)
        assert all(mixed.mass(S) <= ceiling for S in translates)
    print("  [OK] neutral, associative, total mass 1, translate bound holds")


def test_sigma_invariance_on_small_groups():
    print("\n[TEST] sigma on every group of order <= 10...")
    rng = np.random.default_rng(3)
    for G in _small_groups():
        oracle = SoleckiOracle(G)
        for _ in range(200):
            A = FiniteSet.of(G, np.flatnonzero(rng.random(G.order) < 0.5))
            B = FiniteSet.of(G, np.flatnonzero(rng.random(G.order) < 0.5))
            x = int(rng.integers(G.order))
            value = oracle.eval(A)
            assert oracle.eval(translate(x, A)) == value
            assert oracle.eval(FiniteSet.of(G, G.mul_table[A.members, x])) == value
            assert oracle.eval(A.union(B)) <= value + oracle.eval(B)
    print(f"  [OK] {len(_small_groups())} groups, 200 samples each")


def test_complement_and_oracle():
    print("\n[TEST] Complement largeness and sigma syndetic witnesses...")
    G = cyclic(12)
    H = FiniteSet.full(G)
    A = FiniteSet.of(G, [0, 3, 6, 9])
    witness = complement_largeness(G, H, A)
    assert witness.target == A.complement()
    assert witness.replay()
    with pytest.raises(PreconditionError):
        complement_largeness(G, H, FiniteSet.full(G))

    oracle = SoleckiOracle(G)
    B, largeness = oracle.syndetic_witness(A, Fraction(1, 2))
    assert B.to_list() == [1, 4, 7, 10]
    assert oracle.eval(B) < Fraction(1, 2)
    assert largeness.replay()

    report = check_axioms(SoleckiOracle(cyclic(6)), [FiniteSet.of(cyclic(6), [0, 1])])
    assert report.ok, report.to_dict()
    print("  [OK] B = {1, 4, 7, 10} avoids A with sigma 1/3")

def test_sigma_singletons_and_subgroups():
    print("\n[TEST] sigma of singletons and of subgroups of Z12...")
    for n in range(1, 17):
        G = cyclic(n)
        assert solecki_sigma(G, FiniteSet.full(G), FiniteSet.of(G, [0])).value == Fraction(1, n)
    G = cyclic(12)
    for index in (2, 3, 4, 6):
        subgroup = FiniteSet.of(G, range(0, 12, index))
        assert solecki_sigma(G, FiniteSet.full(G), subgroup).value == Fraction(1, index)
    print("  [OK] 1/n for points, 1/j for index-j subgroups")


@settings(derandomize=True, max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=8),
    data=st.data(),
)
def test_sigma_invariant_and_subadditive(n, data):
    G = cyclic(n)
    oracle = SoleckiOracle(G)
    subsets = st.sets(st.integers(min_value=0, max_value=n - 1), max_size=n)
    A = FiniteSet.of(G, data.draw(subsets))
    B = FiniteSet.of(G, data.draw(subsets))
    x = data.draw(st.integers(min_value=0, max_value=n - 1))
    assert oracle.eval(translate(x, A)) == oracle.eval(A)
    assert oracle.eval(A.union(B)) <= oracle.eval(A) + oracle.eval(B)
    cert = oracle.certificate(A)
    assert cert.primal_sup() == cert.dual_min() == cert.value



def run_all_tests():
    print("=" * 60)
    print("Submeasures - Test Suite")
    print("=" * 60)

    tests = [
        ("Measures", test_measures),
        ("Counting measure", test_counting_measure),
        ("Orbit cover", test_orbit_cover),
        ("Axioms (counting)", test_axioms_counting),
        ("Axioms (non-invariant)", test_axioms_flag_non_invariant),
        ("Window density", test_window_density),
        ("Window density, inner placements", test_window_density_inner_placements),
        ("Syndetic witness (line)", test_syndetic_witness_line),
        ("Exact sigma", test_solecki_sigma),
        ("Sigma bracket", test_sigma_estimate_is_exact),
        ("Convolution identities", test_convolution_identities),
        ("sigma on small groups", test_sigma_invariance_on_small_groups),
        ("Complement and oracle", test_complement_and_oracle),
        ("sigma of points and subgroups", test_sigma_singletons_and_subgroups),
        ("sigma invariance", test_sigma_invariant_and_subadditive),
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
