"""Normalized counting measure on a finite G-space."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from src.errors import PreconditionError
from src.groups import Carrier, FiniteSet, acting_group, action_table, orbits
from src.models import fraction_str, parse_fraction
from src.setcalc import LargenessWitness
from src.submeasure.base import SubmeasureOracle


@dataclass(frozen=True)
class TransitivityObstruction:
    """
    The action has several orbits, so every large set has at least one
    point per orbit and counting mass at least `min_large_mass`. At
    `threshold` = 1/(|X|-1) no syndetic witness exists.
    """

    orbits: tuple[FiniteSet, ...]
    min_large_mass: Fraction
    threshold: Fraction

    def to_dict(self) -> dict:
        return {
            "orbits": [o.to_list() for o in self.orbits],
            "min_large_mass": fraction_str(self.min_large_mass),
            "threshold": fraction_str(self.threshold),
        }


def transitivity_obstruction(X: Carrier) -> TransitivityObstruction | None:
    parts = orbits(X)
    if len(parts) == 1:
        return None
    return TransitivityObstruction(tuple(parts), Fraction(len(parts), X.size), Fraction(1, X.size - 1))


def orbit_cover(X: Carrier, L: FiniteSet) -> LargenessWitness:
    """
    F = {e} plus, for every point x, the smallest g moving some point
    of L onto x. Then FL = X whenever L meets every orbit.
    """
    table = action_table(X)
    group = acting_group(X)
    images = table[:, L.members]
    chosen = {group.identity}
    for x in range(table.shape[1]):
        movers = np.flatnonzero((images == x).any(axis=1))
        if len(movers) == 0:
            raise PreconditionError(f"L misses the orbit of point {x}")
        chosen.add(int(movers[0]))
    return LargenessWitness(FiniteSet.of(group, sorted(chosen)), L)


class CountingMeasure(SubmeasureOracle):
    name = "counting"
    description = "|A| / |X| on a finite G-space"

    def eval(self, A: FiniteSet) -> Fraction:
        self.check_carrier(A)
        return Fraction(len(A), self.carrier.size)

    def syndetic_witness(self, A: FiniteSet, eps) -> Optional[tuple[FiniteSet, LargenessWitness]]:
        """
        One point per orbit outside A (smallest ids). None when an orbit
        lies inside A or the points together weigh eps or more.
        """
        self.check_carrier(A)
        eps = parse_fraction(eps)
        size = self.carrier.size
        if not Fraction(1, size) < eps <= 1:
            raise PreconditionError(f"eps must lie in (1/{size}, 1], got {eps}")
        if self.eval(A) >= 1:
            raise PreconditionError("A is the whole space; its complement is empty")

        picks = []
        for orbit in orbits(self.carrier):
            rest = orbit.difference(A)
            if len(rest) == 0:
                return None
            picks.append(int(rest.members[0]))
        L = FiniteSet.of(self.carrier, picks)
        if self.eval(L) >= eps:
            return None
        return L, orbit_cover(self.carrier, L)

    def witness_epsilon(self) -> Optional[Fraction]:
        size = self.carrier.size
        return Fraction(1, size - 1) if size > 1 else None


def counting_measure(X: Carrier) -> CountingMeasure:
    return CountingMeasure(X)
