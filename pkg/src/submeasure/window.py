"""
Upper window density on a one-dimensional windowed line, and syndetic
witnesses of small density inside the complement of a set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from src.covering import NetCertificate, max_E_separated
from src.errors import CertificateError, PreconditionError
from src.groups import FiniteSet, WindowedGroup, indicator, interval
from src.models import HorizonPolicy, fraction_str, parse_fraction
from src.setcalc import LargenessWitness, max_gap, window_cover_witness
from src.submeasure.base import SubmeasureOracle


class WindowDensity(SubmeasureOracle):
    """
    Largest share of A inside any run of L consecutive integers, over
    every placement that starts within the horizon.

    Scanning the whole horizon keeps the value exactly translation
    invariant for sets that stay inside it.
    """

    name = "window-density"
    description = "max over placements x of |A & [x, x+L)| / L"

    def __init__(self, carrier: WindowedGroup, L: int, policy: HorizonPolicy):
        if not isinstance(carrier, WindowedGroup) or carrier.dimension != 1:
            raise PreconditionError("window density needs a one-dimensional windowed group")
        if policy.horizon != carrier.horizon:
            raise PreconditionError(f"policy horizon {policy.horizon} does not match {carrier.name}")
        if L < 2:
            raise PreconditionError(f"window length must be at least 2, got {L}")
        if 4 * L > policy.inner_length:
            raise PreconditionError(
                f"window length {L} too long for an inner window of {policy.inner_length} points"
            )
        super().__init__(carrier)
        self.L = L
        self.policy = policy

    def window_counts(self, A: FiniteSet) -> np.ndarray:
        mask = indicator(A).astype(np.int64)
        sums = np.concatenate(([0], np.cumsum(mask)))
        starts = np.arange(len(mask))
        ends = np.minimum(starts + self.L, len(mask))
        return sums[ends] - sums[starts]

    def eval(self, A: FiniteSet) -> Fraction:
        self.check_carrier(A)
        if len(A) == 0:
            return Fraction(0)
        return Fraction(int(self.window_counts(A).max()), self.L)

    def syndetic_witness(self, A: FiniteSet, eps) -> Optional[tuple[FiniteSet, LargenessWitness]]:
        found = syndetic_witness_Z(A, eps, self.L, self.policy)
        return found.B, found.largeness

    def translations(self) -> list:
        return [1, -1, self.L, -self.L]

    def witness_epsilon(self) -> Optional[Fraction]:
        if self.L < 4:
            return None
        return Fraction(2, self.L // 2)

    def describe(self) -> dict:
        out = super().describe()
        out.update({"L": self.L, **self.policy.describe()})
        return out


def window_density(A: FiniteSet | WindowedGroup, L: int, policy: HorizonPolicy) -> WindowDensity:
    carrier = A.carrier if isinstance(A, FiniteSet) else A
    return WindowDensity(carrier, L, policy)


@dataclass(frozen=True)
class LineWitness:
    """
    B inside the complement of `avoid` in the inner window, of window
    density below eps, with bounded gaps, plus the net it came from.
    """

    avoid: FiniteSet = field(repr=False)
    B: FiniteSet = field(repr=False)
    eps: Fraction
    L: int
    e: int
    density: Fraction
    gap: int
    gap_bound: int
    policy: HorizonPolicy
    net: NetCertificate = field(repr=False)
    largeness: LargenessWitness = field(repr=False)

    def replay(self) -> bool:
        lo, hi = self.policy.inner_window()
        oracle = WindowDensity(self.B.carrier, self.L, self.policy)
        return (
            self.B.isdisjoint(self.avoid)
            and oracle.eval(self.B) == self.density
            and self.density < self.eps
            and self.density <= Fraction(1, self.e) + Fraction(1, self.L)
            and max_gap(self.B, lo, hi) == self.gap <= self.gap_bound
            and self.largeness.replay()
            and self.net.replay()
        )

    def to_dict(self) -> dict:
        return {
            "eps": fraction_str(self.eps),
            "L": self.L,
            "separation": self.e,
            "size": len(self.B),
            "density": fraction_str(self.density),
            "gap": self.gap,
            "gap_bound": self.gap_bound,
            "largeness": self.largeness.to_dict(),
            "horizon": self.policy.describe(),
        }


def syndetic_witness_Z(A: FiniteSet, eps, L: int, policy: HorizonPolicy) -> LineWitness:
    """
    Build B inside W minus A with window density below eps and gaps at
    most L + 2e, where e = ceil(2/eps), as a maximal [0, e)-separated
    subset of W minus A.

    Needs L >= 2e, eps > 1/L + 1/e and a complement share above 2/L at
    window length L.
    """
    eps = parse_fraction(eps)
    if not 0 < eps <= 1:
        raise PreconditionError(f"eps must lie in (0, 1], got {eps}")
    e = math.ceil(Fraction(2) / eps)
    if L < 2 * e:
        raise PreconditionError(f"window length {L} is below 2*ceil(2/eps) = {2 * e}")
    if eps <= Fraction(1, L) + Fraction(1, e):
        raise PreconditionError(f"eps={fraction_str(eps)} must exceed 1/{L} + 1/{e}")
    oracle = WindowDensity(A.carrier, L, policy)
    share = oracle.eval(A)
    if 1 - share <= Fraction(2, L):
        raise PreconditionError(
            f"A has window density {fraction_str(share)}; its complement share must exceed 2/{L}"
        )

    carrier = A.carrier
    lo, hi = policy.inner_window()
    S = interval(carrier, lo, hi).difference(A)
    net = max_E_separated(interval(carrier, 0, e - 1), S, policy)
    B = net.B
    density = oracle.eval(B)
    if density >= eps or density > Fraction(1, e) + Fraction(1, L):
        raise CertificateError(f"witness density {fraction_str(density)} is not below {fraction_str(eps)}")
    gap = max_gap(B, lo, hi)
    if gap > L + 2 * e:
        raise CertificateError(f"witness gap {gap} exceeds {L + 2 * e}")
    largeness = window_cover_witness(B, lo, hi)
    if largeness is None or not largeness.replay():
        raise CertificateError("witness does not cover the inner window")
    return LineWitness(A, B, eps, L, e, density, gap, L + 2 * e, policy, net, largeness)
