"""Base class for submeasure oracles."""

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Optional

from src.errors import CarrierError
from src.groups import Carrier, FiniteGroup, FiniteSet, GSpace, acting_group
from src.setcalc import LargenessWitness


class SubmeasureOracle(ABC):
    """
    A normalized, monotone, subadditive, left-invariant set function on
    the finite subsets of a carrier, with exact rational values.
    """

    name: str = "Unnamed Submeasure"
    description: str = "No description provided"

    def __init__(self, carrier: Carrier):
        self.carrier = carrier

    @abstractmethod
    def eval(self, A: FiniteSet) -> Fraction:
        """Value of the submeasure on A."""
        raise NotImplementedError

    @abstractmethod
    def syndetic_witness(self, A: FiniteSet, eps) -> Optional[tuple[FiniteSet, LargenessWitness]]:
        """A large L inside the complement of A with eval(L) < eps, or None."""
        raise NotImplementedError

    def universe(self) -> FiniteSet:
        return FiniteSet.full(self.carrier)

    def translations(self) -> list:
        """Group elements used when sampling translation invariance."""
        group = acting_group(self.carrier)
        if isinstance(group, FiniteGroup):
            return list(range(min(group.order, 16)))
        return []

    def witness_epsilon(self) -> Optional[Fraction]:
        """An eps at which a syndetic oracle must produce a witness for the empty set."""
        return None

    def check_carrier(self, A: FiniteSet) -> None:
        if A.carrier != self.carrier:
            raise CarrierError(f"{self.name} lives on {self.carrier.name}, set on {A.carrier.name}")

    def describe(self) -> dict:
        kind = "space" if isinstance(self.carrier, GSpace) else "group"
        return {"oracle": self.name, "description": self.description, kind: self.carrier.name}
