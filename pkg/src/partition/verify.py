"""Independent replay of a partition's meagerness certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

from src.errors import CertificateError
from src.groups import FiniteSet, inverse_set, set_product
from src.models import HorizonPolicy
from src.partition.construction import PartitionResult
from src.setcalc import LargenessWitness, max_gap, window_cover_witness


@dataclass(frozen=True)
class MeagernessCertificate:
    """
    For the shift K = K_n^-1, the piece K·P misses `guard`, and `guard`
    is large in the core window (so K·P is not thick there).
    """

    stage: int
    side: str
    K: FiniteSet
    guard: FiniteSet = field(repr=False)
    witness: LargenessWitness = field(repr=False)
    gap: int

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "side": self.side,
            "K": self.K.to_list(),
            "guard_size": len(self.guard),
            "witness_radius": int(self.witness.F.members[-1]),
            "gap": self.gap,
        }


def _certify(stage: int, side: str, K: FiniteSet, piece: FiniteSet, guard: FiniteSet,
             core: HorizonPolicy) -> MeagernessCertificate:
    shifted = set_product(K, piece)
    if not guard.isdisjoint(shifted):
        raise CertificateError(f"stage {stage}: {side} guard meets K_n^-1 of its piece")
    lo, hi = core.inner_window()
    witness = window_cover_witness(guard, lo, hi)
    if witness is None or not witness.replay():
        raise CertificateError(f"stage {stage}: {side} guard is not large in the core window")
    return MeagernessCertificate(stage, side, K, guard, witness, max_gap(guard, lo, hi))


def verify_meagerness(result: PartitionResult, policy: HorizonPolicy | None = None) -> list[MeagernessCertificate]:
    """
    Re-derive both pieces' certificates from the stored stage sets.

    The complement of A is recomputed from A, not taken from the result.
    Stage predicates are replayed in order, so the first failure names
    the earliest broken stage.
    """
    policy = policy or result.policy
    core = policy.shrink(result.radius)
    rest = result.window().difference(result.A)

    certificates = []
    for record in result.stages:
        K = inverse_set(record.K)
        certificates.append(_certify(record.n, "A", K, result.A, record.B, core))
        certificates.append(_certify(record.n, "complement", K, rest, record.A, core))
        record.check(core)

    if result.A != result.union_of("A"):
        raise CertificateError("A differs from the union of the K_n A_n")
    if not result.union_of("B").issubset(rest):
        raise CertificateError("some K_n B_n meets A")
    if result.B_side != rest:
        raise CertificateError("B_side is not the complement of A in the inner window")
    return certificates
