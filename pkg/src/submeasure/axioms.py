"""Sampled axiom checks for submeasure oracles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from src.errors import PreconditionError, WindowOverflowError
from src.groups import FiniteSet, translate
from src.models import fraction_str
from src.submeasure.base import SubmeasureOracle

# singletons added to the sample family, at most this many
SINGLETON_CAP = 256


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    witnesses: tuple
    detail: str

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "witnesses": [w.to_list() if isinstance(w, FiniteSet) else w for w in self.witnesses],
            "detail": self.detail,
        }


@dataclass
class AxiomReport:
    oracle: str
    checks: int = 0
    violations: list[AxiomViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def flag(self, axiom: str, witnesses: Iterable, detail: str) -> None:
        self.violations.append(AxiomViolation(axiom, tuple(witnesses), detail))

    def axioms_failed(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "oracle": self.oracle,
            "checks": self.checks,
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
        }


def _singletons(oracle: SubmeasureOracle, samples: Sequence[FiniteSet]) -> list[FiniteSet]:
    carrier = oracle.carrier
    if carrier.size <= SINGLETON_CAP:
        points = list(FiniteSet.full(carrier))
    else:
        seen: dict = {}
        for S in samples:
            for x in S:
                seen.setdefault(x, None)
                if len(seen) >= SINGLETON_CAP:
                    break
            if len(seen) >= SINGLETON_CAP:
                break
        points = list(seen)
    return [FiniteSet.of(carrier, [x]) for x in points]


def check_axioms(oracle: SubmeasureOracle, samples: Sequence[FiniteSet],
                 translations: Sequence | None = None, syndetic: bool = True) -> AxiomReport:
    """
    Check normalization, monotonicity, subadditivity, left invariance and
    (optionally) the syndetic check on a deterministic family of sets.

    Pairs are taken between neighbours in the family and between the
    family and its reversal, so the cost stays linear in its size.
    """
    report = AxiomReport(oracle.name)
    carrier = oracle.carrier

    empty = FiniteSet.empty(carrier)
    value = oracle.eval(empty)
    report.checks += 1
    if value != 0:
        report.flag("normalization", (empty,), f"eval(empty) = {fraction_str(value)}")
    value = oracle.eval(oracle.universe())
    report.checks += 1
    if value != 1:
        report.flag("normalization", (oracle.universe(),), f"eval(X) = {fraction_str(value)}")

    family = list(samples) + _singletons(oracle, samples)
    values = {i: oracle.eval(S) for i, S in enumerate(family)}
    pairs = list(zip(range(len(family)), range(1, len(family))))
    pairs += [(i, len(family) - 1 - i) for i in range(len(family) // 2)]
    for i, j in pairs:
        A, B = family[i], family[j]
        joined = oracle.eval(A.union(B))
        report.checks += 2
        if values[i] > joined or values[j] > joined:
            report.flag("monotonicity", (A, B),
                        f"eval(A)={fraction_str(values[i])}, eval(B)={fraction_str(values[j])}, "
                        f"eval(A u B)={fraction_str(joined)}")
        if joined > values[i] + values[j]:
            report.flag("subadditivity", (A, B),
                        f"eval(A u B)={fraction_str(joined)} > {fraction_str(values[i] + values[j])}")

    moves = list(translations) if translations is not None else oracle.translations()
    for i, A in enumerate(samples):
        for g in moves:
            try:
                moved = translate(g, A)
            except WindowOverflowError:
                continue
            report.checks += 1
            shifted = oracle.eval(moved)
            if shifted != values[i]:
                report.flag("left-invariance", (A, g),
                            f"eval(gA)={fraction_str(shifted)} but eval(A)={fraction_str(values[i])}")

    eps = oracle.witness_epsilon() if syndetic else None
    if eps is not None:
        report.checks += 1
        try:
            found = oracle.syndetic_witness(empty, eps)
        except PreconditionError as e:
            found = None
            detail = str(e)
        else:
            detail = "no witness returned"
        if found is None:
            report.flag("syndetic", (empty,), f"eps={fraction_str(eps)}: {detail}")
        elif not (oracle.eval(found[0]) < eps and found[1].replay()):
            report.flag("syndetic", (found[0],), f"eps={fraction_str(eps)}: witness failed its replay")
    return report
