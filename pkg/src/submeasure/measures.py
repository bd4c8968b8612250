"""Finitely supported probability measures with exact rational weights."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from src.errors import CarrierError, PreconditionError
from src.groups import Carrier, FiniteGroup, FiniteSet, WindowedGroup
from src.models import fraction_str


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    """
    A probability measure on a group or windowed line, stored as sorted
    support points with positive Fraction weights summing to one.
    """

    carrier: Carrier
    points: tuple[int, ...]
    weights: tuple[Fraction, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.points) != len(self.weights) or not self.points:
            raise PreconditionError("a measure needs matching, non-empty points and weights")
        if any(w <= 0 for w in self.weights):
            raise PreconditionError("measure weights must be positive")
        if sum(self.weights) != 1:
            raise PreconditionError(f"measure weights sum to {sum(self.weights)}, not 1")
        if list(self.points) != sorted(set(self.points)):
            raise PreconditionError("measure support must be sorted and distinct")
        # membership is validated by building the support
        FiniteSet.of(self.carrier, self.points)

    @classmethod
    def from_weights(cls, carrier: Carrier, weights: Mapping[int, Fraction | int]) -> FiniteMeasure:
        cleaned = {}
        for point, weight in weights.items():
            weight = Fraction(weight)
            if weight < 0:
                raise PreconditionError(f"negative weight {weight} at {point}")
            if weight:
                cleaned[int(point)] = weight
        points = tuple(sorted(cleaned))
        return cls(carrier, points, tuple(cleaned[p] for p in points))

    @property
    def support(self) -> FiniteSet:
        return FiniteSet.of(self.carrier, self.points)

    def weight(self, point: int) -> Fraction:
        return dict(zip(self.points, self.weights)).get(int(point), Fraction(0))

    def items(self) -> Iterable[tuple[int, Fraction]]:
        return zip(self.points, self.weights)

    def mass(self, A: FiniteSet) -> Fraction:
        if A.carrier != self.carrier:
            raise CarrierError(f"measure on {self.carrier.name}, set on {A.carrier.name}")
        inside = np.isin(np.asarray(self.points, dtype=np.int64), A.members)
        return sum((w for w, hit in zip(self.weights, inside) if hit), Fraction(0))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteMeasure)
            and self.carrier == other.carrier
            and self.points == other.points
            and self.weights == other.weights
        )

    def __hash__(self) -> int:
        return hash((self.carrier, self.points, self.weights))

    def to_dict(self) -> dict:
        return {str(p): fraction_str(w) for p, w in self.items()}


def dirac(carrier: Carrier, point: int) -> FiniteMeasure:
    return FiniteMeasure(carrier, (int(point),), (Fraction(1),))


def uniform(S: FiniteSet) -> FiniteMeasure:
    if len(S) == 0:
        raise PreconditionError("uniform measure on an empty set")
    share = Fraction(1, len(S))
    return FiniteMeasure(S.carrier, tuple(S), (share,) * len(S))


def convolve(mu: FiniteMeasure, nu: FiniteMeasure) -> FiniteMeasure:
    """Push-forward of mu x nu under multiplication."""
    if mu.carrier != nu.carrier:
        raise CarrierError("convolution of measures on different groups")
    carrier = mu.carrier
    acc: dict[int, Fraction] = defaultdict(Fraction)
    for x, a in mu.items():
        for y, b in nu.items():
            if isinstance(carrier, FiniteGroup):
                z = carrier.mul(x, y)
            elif isinstance(carrier, WindowedGroup):
                z = next(iter(FiniteSet.of(carrier, [x + y])))
            else:
                raise CarrierError(f"cannot multiply points of {carrier.name}")
            acc[z] += a * b
    return FiniteMeasure.from_weights(carrier, acc)


def tv_distance(mu: FiniteMeasure, nu: FiniteMeasure) -> Fraction:
    """Sum of |mu(x) - nu(x)| over the joint support."""
    if mu.carrier != nu.carrier:
        raise CarrierError("measures on different carriers")
    a, b = dict(mu.items()), dict(nu.items())
    return sum((abs(a.get(x, Fraction(0)) - b.get(x, Fraction(0))) for x in set(a) | set(b)), Fraction(0))
