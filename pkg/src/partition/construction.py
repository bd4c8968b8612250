"""
Staged construction of a partition of a windowed integer line into two
k-meager pieces.

Stage n picks the n-th k-subset K_n and builds, in the core window,

    A_n  avoiding  K_n^-1 K_i B_i  for i < n
    B_n  avoiding  K_n^-1 K_i A_i  for i <= n

each a syndetic set of window density below eps_n = 1/(k^2 2^n).
The piece A is the union of the K_n A_n; B_n then lies in K_n^-1 of
the complement of A for every n, and A_n in K_n^-1 A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from sys import stderr

from src.errors import CertificateError, PreconditionError
from src.groups import FiniteSet, WindowedGroup, interval, inverse_set, set_product
from src.models import LIMITS, VERBOSE, HorizonPolicy, Limits, fraction_str
from src.partition.enumerate import enumerate_k_subsets, radius_for
from src.setcalc import LargenessWitness, max_gap
from src.submeasure.window import WindowDensity, syndetic_witness_Z


@dataclass(frozen=True)
class StageParameters:
    n: int
    eps: Fraction
    e: int
    L: int

    @property
    def gap_bound(self) -> int:
        return self.L + 2 * self.e


def stage_parameters(k: int, n: int) -> StageParameters:
    eps = Fraction(1, k * k * 2 ** n)
    e = math.ceil(Fraction(2) / eps)
    return StageParameters(n, eps, e, 2 * e)


def geometric_ledger(k: int, n: int, inclusive: bool) -> Fraction:
    """
    Budget for the forbidden region at stage n: the sum of k^2 eps_i
    over i < n, or i <= n when `inclusive`.
    """
    last = n if inclusive else n - 1
    return sum((k * k * stage_parameters(k, i).eps for i in range(1, last + 1)), Fraction(0))


def horizon_requirements(k: int, stages: int, limits: Limits | None = None) -> dict:
    """
    Smallest horizon the construction accepts for k and `stages`: the
    core window must hold `horizon_safety_factor` copies of the last
    stage's gap bound (and four window lengths), and the margin must fit
    two shift radii.
    """
    limits = limits or LIMITS
    if k < 1 or stages < 1:
        raise PreconditionError(f"need k >= 1 and stages >= 1, got k={k} stages={stages}")
    last = stage_parameters(k, stages)
    radius = radius_for(k, stages)
    margin = 2 * radius
    core_length = max(limits.horizon_safety_factor * last.gap_bound, 4 * last.L)
    core_radius = -(-(core_length - 1) // 2)
    return {
        "k": k,
        "stages": stages,
        "radius": radius,
        "margin": margin,
        "core_length": core_length,
        "horizon": core_radius + margin + radius,
        "per_stage": [
            {
                "n": p.n,
                "eps": fraction_str(p.eps),
                "separation": p.e,
                "L": p.L,
                "gap_bound": p.gap_bound,
            }
            for p in (stage_parameters(k, i) for i in range(1, stages + 1))
        ],
    }


@dataclass(frozen=True)
class StageLedger:
    """Window density of a forbidden region against its two upper bounds."""

    side: str
    actual: Fraction
    subadditive: Fraction
    geometric: Fraction

    def holds(self) -> bool:
        return self.actual <= self.subadditive <= self.geometric < 1

    def to_dict(self) -> dict:
        return {
            "actual": fraction_str(self.actual),
            "subadditive": fraction_str(self.subadditive),
            "geometric": fraction_str(self.geometric),
        }


@dataclass(frozen=True)
class StageRecord:
    n: int
    K: FiniteSet
    params: StageParameters
    A: FiniteSet = field(repr=False)
    B: FiniteSet = field(repr=False)
    forbidden_A: FiniteSet = field(repr=False)
    forbidden_B: FiniteSet = field(repr=False)
    ledger_A: StageLedger
    ledger_B: StageLedger
    witness_A: LargenessWitness = field(repr=False)
    witness_B: LargenessWitness = field(repr=False)
    density_A: Fraction
    density_B: Fraction
    gap_A: int
    gap_B: int

    def failures(self, core: HorizonPolicy) -> list[str]:
        """Every stage predicate that does not replay, by name."""
        lo, hi = core.inner_window()
        oracle = WindowDensity(self.A.carrier, self.params.L, core)
        eps = self.params.eps
        failed = []
        if not self.A.isdisjoint(self.forbidden_A):
            failed.append("A_n meets its forbidden region")
        if not self.B.isdisjoint(self.forbidden_B):
            failed.append("B_n meets its forbidden region")
        for side, piece, density, gap, witness, ledger, forbidden in (
            ("A", self.A, self.density_A, self.gap_A, self.witness_A, self.ledger_A, self.forbidden_A),
            ("B", self.B, self.density_B, self.gap_B, self.witness_B, self.ledger_B, self.forbidden_B),
        ):
            if oracle.eval(piece) != density or density >= eps:
                failed.append(f"{side}_n density {fraction_str(density)} not below eps_n")
            if max_gap(piece, lo, hi) != gap or gap > self.params.gap_bound:
                failed.append(f"{side}_n gap {gap} above {self.params.gap_bound}")
            if witness.target != piece or not witness.replay():
                failed.append(f"{side}_n largeness witness does not replay")
            if oracle.eval(forbidden) != ledger.actual or not ledger.holds():
                failed.append(f"{side}-side ledger does not hold")
        return failed

    def within(self, lo: int, hi: int) -> tuple[list[int], list[int]]:
        """A_n and B_n restricted to [lo, hi]."""
        return (
            [x for x in self.A.to_list() if lo <= x <= hi],
            [x for x in self.B.to_list() if lo <= x <= hi],
        )

    def check(self, core: HorizonPolicy) -> None:
        failed = self.failures(core)
        if failed:
            raise CertificateError(f"stage {self.n}: {'; '.join(failed)}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K.to_list(),
            "eps": fraction_str(self.params.eps),
            "L": self.params.L,
            "separation": self.params.e,
            "size_A": len(self.A),
            "size_B": len(self.B),
            "density_A": fraction_str(self.density_A),
            "density_B": fraction_str(self.density_B),
            "gap_A": self.gap_A,
            "gap_B": self.gap_B,
            "gap_bound": self.params.gap_bound,
            "ledger_A": self.ledger_A.to_dict(),
            "ledger_B": self.ledger_B.to_dict(),
        }


@dataclass(frozen=True)
class PartitionResult:
    """
    A partition {A, B_side} of the inner window. Stage sets live in the
    core window (the inner window narrowed by the shift radius), so
    every K_n A_n and K_n B_n stays inside the inner window.
    """

    k: int
    policy: HorizonPolicy
    radius: int
    stages: tuple[StageRecord, ...]
    A: FiniteSet = field(repr=False)
    B_side: FiniteSet = field(repr=False)

    @property
    def core(self) -> HorizonPolicy:
        return self.policy.shrink(self.radius)

    @property
    def carrier(self) -> WindowedGroup:
        return self.A.carrier

    def window(self) -> FiniteSet:
        return interval(self.carrier, *self.policy.inner_window())

    def stable_window(self) -> tuple[int, int]:
        """
        Part of the core window where the stage sets do not depend on the
        horizon. Nets grow outward from the origin, so a wider window only
        changes a stage near the edge, and each forbidden region carries
        such a change at most 2 * radius further in.
        """
        lo, hi = self.core.inner_window()
        inset = 2 * len(self.stages) * (2 * self.radius + 1)
        return lo + inset, hi - inset

    def union_of(self, side: str) -> FiniteSet:
        acc = FiniteSet.empty(self.carrier)
        for record in self.stages:
            acc = acc.union(set_product(record.K, record.A if side == "A" else record.B))
        return acc

    def check(self) -> None:
        for record in self.stages:
            record.check(self.core)
        if self.A != self.union_of("A"):
            raise CertificateError("A differs from the union of the K_n A_n")
        if self.B_side != self.window().difference(self.A):
            raise CertificateError("B_side is not the complement of A in the inner window")
        if not self.union_of("B").issubset(self.B_side):
            raise CertificateError("some K_n B_n meets A")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "radius": self.radius,
            **self.policy.describe(),
            "size_A": len(self.A),
            "size_B_side": len(self.B_side),
            "stages": [r.to_dict() for r in self.stages],
        }


def forbidden_region(carrier: WindowedGroup, K_n, earlier: list, sets: list[FiniteSet],
                     core: HorizonPolicy, oracle: WindowDensity) -> tuple[FiniteSet, Fraction]:
    """
    Union of K_n^-1 K_i S_i over the given stages, inside the core
    window, with the subadditive bound sum |K_n^-1 K_i| eval(S_i).
    """
    K_inv = inverse_set(FiniteSet.of(carrier, K_n))
    acc = FiniteSet.empty(carrier)
    bound = Fraction(0)
    for K_i, S in zip(earlier, sets):
        shifts = set_product(K_inv, FiniteSet.of(carrier, K_i))
        acc = acc.union(set_product(shifts, S))
        bound += len(shifts) * oracle.eval(S)
    return acc.intersection(interval(carrier, *core.inner_window())), bound


def build_meager_partition(k: int, stages: int, policy: HorizonPolicy | None = None,
                           limits: Limits | None = None, verbose: bool = VERBOSE) -> PartitionResult:
    """
    Run `stages` stages of the construction. Without a policy the
    smallest accepted horizon is used. Every stage is checked as it is
    built; any failed predicate raises CertificateError naming the stage.
    """
    limits = limits or LIMITS
    need = horizon_requirements(k, stages, limits)
    radius = need["radius"]
    if policy is None:
        policy = HorizonPolicy(need["horizon"], need["margin"])
    if policy.margin < need["margin"]:
        raise PreconditionError(
            f"margin {policy.margin} below twice the shift radius ({need['margin']})"
        )
    if policy.inner_radius <= radius:
        raise PreconditionError(f"horizon {policy.horizon} leaves no core window")
    core = policy.shrink(radius)
    if core.inner_length < need["core_length"]:
        raise PreconditionError(
            f"horizon {policy.horizon} too small: core window has {core.inner_length} points, "
            f"needs {need['core_length']} (try horizon >= {need['horizon'] - need['margin'] + policy.margin})"
        )

    carrier = WindowedGroup(1, policy.horizon, limits=limits)
    shifts = enumerate_k_subsets(k, stages, max_radius=radius)
    if len(shifts) < stages:
        raise PreconditionError(f"only {len(shifts)} {k}-subsets within radius {radius}")

    records: list[StageRecord] = []
    A_sets: list[FiniteSet] = []
    B_sets: list[FiniteSet] = []
    for n in range(1, stages + 1):
        params = stage_parameters(k, n)
        oracle = WindowDensity(carrier, params.L, core)
        K_n = shifts[n - 1]

        forbidden_A, bound_A = forbidden_region(carrier, K_n, shifts[: n - 1], B_sets, core, oracle)
        ledger_A = StageLedger("A", oracle.eval(forbidden_A), bound_A, geometric_ledger(k, n, inclusive=False))
        if not ledger_A.holds():
            raise CertificateError(f"stage {n}: A-side ledger fails ({ledger_A.to_dict()})")
        found_A = syndetic_witness_Z(forbidden_A, params.eps, params.L, core)
        A_sets.append(found_A.B)

        forbidden_B, bound_B = forbidden_region(carrier, K_n, shifts[:n], A_sets, core, oracle)
        ledger_B = StageLedger("B", oracle.eval(forbidden_B), bound_B, geometric_ledger(k, n, inclusive=True))
        if not ledger_B.holds():
            raise CertificateError(f"stage {n}: B-side ledger fails ({ledger_B.to_dict()})")
        found_B = syndetic_witness_Z(forbidden_B, params.eps, params.L, core)
        B_sets.append(found_B.B)

        record = StageRecord(
            n, FiniteSet.of(carrier, K_n), params, found_A.B, found_B.B, forbidden_A, forbidden_B,
            ledger_A, ledger_B, found_A.largeness, found_B.largeness,
            found_A.density, found_B.density, found_A.gap, found_B.gap,
        )
        record.check(core)
        records.append(record)
        if verbose:
            print(
                f"[partition] stage {n}/{stages} K={list(K_n)} |A_n|={len(found_A.B)} |B_n|={len(found_B.B)} "
                f"forbidden {fraction_str(ledger_A.actual)}/{fraction_str(ledger_B.actual)}",
                file=stderr,
            )

    A = FiniteSet.empty(carrier)
    for record in records:
        A = A.union(set_product(record.K, record.A))
    B_side = interval(carrier, *policy.inner_window()).difference(A)
    result = PartitionResult(k, policy, radius, tuple(records), A, B_side)
    result.check()
    return result
