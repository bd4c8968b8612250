"""Pulling a two-piece partition back along a group homomorphism."""

from __future__ import annotations

from dataclasses import dataclass

from src.errors import CarrierError, PreconditionError
from src.groups import FiniteGroup, FiniteSet, GroupHom
from src.models import Limits
from src.setcalc import MeagerResult, is_k_meager


@dataclass(frozen=True)
class PullbackResult:
    pieces: tuple[FiniteSet, FiniteSet]
    surjective: bool | None
    verdicts: tuple[MeagerResult, MeagerResult] | None = None

    def to_dict(self) -> dict:
        out = {
            "sizes": [len(p) for p in self.pieces],
            "surjective": self.surjective,
        }
        if self.verdicts is not None:
            out["verdicts"] = [v.status for v in self.verdicts]
        return out


def pullback(h: GroupHom, partition: tuple[FiniteSet, FiniteSet], k: int | None = None,
             limits: Limits | None = None) -> PullbackResult:
    """
    Preimages of both pieces. They partition the source whenever the
    pieces partition the target. On finite groups, passing k also runs
    the k-meager classifier on each preimage.
    """
    A, B = partition
    for piece in (A, B):
        if piece.carrier != h.target:
            raise CarrierError(f"piece lives on {piece.carrier.name}, map ends at {h.target.name}")
    if not A.isdisjoint(B) or len(A.union(B)) != h.target.size:
        raise PreconditionError("the pieces do not partition the target")

    # on windowed groups, only points mapped inside the target horizon count
    domain = h.preimage(FiniteSet.full(h.target))
    pieces = (h.preimage(A), h.preimage(B))
    if not pieces[0].isdisjoint(pieces[1]) or pieces[0].union(pieces[1]) != domain:
        raise PreconditionError("preimages do not partition the source")

    verdicts = None
    if k is not None and isinstance(h.source, FiniteGroup):
        verdicts = (is_k_meager(pieces[0], k, limits=limits), is_k_meager(pieces[1], k, limits=limits))
    return PullbackResult(pieces, h.surjective, verdicts)
