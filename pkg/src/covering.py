"""
Covering constructions: greedy covers by translates, maximal
E-separated sets, and the prethick cell of a finite cover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from sys import stderr

import numpy as np

from src.errors import BudgetExceeded, CarrierError, CertificateError, PreconditionError, WindowOverflowError
from src.groups import (
    FiniteGroup,
    FiniteSet,
    WindowedGroup,
    acting_group,
    inverse_set,
    set_product,
)
from src.models import LIMITS, VERBOSE, HorizonPolicy, Limits, fraction_str
from src.setcalc import Budget, ThicknessVerdict, _thickness, count_patterns
from src.submeasure.measures import FiniteMeasure, uniform


# ---------------------------------------------------------------------------
# Greedy cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverCertificate:
    """BA = G together with the size bound it was promised to meet."""

    B: FiniteSet
    target: FiniteSet
    bound: float
    partition_bound: float | None = None

    @property
    def bound_ceil(self) -> int:
        return math.ceil(self.bound)

    def replay(self) -> bool:
        if set_product(self.B, self.target) != FiniteSet.full(self.target.carrier):
            return False
        if len(self.B) > self.bound_ceil:
            return False
        return self.partition_bound is None or len(self.B) <= math.ceil(self.partition_bound)

    def to_dict(self) -> dict:
        out = {
            "B": self.B.to_list(),
            "size": len(self.B),
            "bound_float_info": round(self.bound, 6),
            "bound_ceil": self.bound_ceil,
        }
        if self.partition_bound is not None:
            out["partition_bound_float_info"] = round(self.partition_bound, 6)
        return out


def cover_bound(order: int, size: int) -> float:
    return order / size * (math.log(size) + 1)


def greedy_cover(G: FiniteGroup, A: FiniteSet, verbose: bool = VERBOSE) -> CoverCertificate:
    """
    Pick translates gA greedily, each time the one covering the most
    uncovered elements (smallest g on ties), until BA = G.
    """
    if A.carrier != G:
        raise CarrierError(f"set lives on {A.carrier.name}, not {G.name}")
    if len(A) == 0:
        raise PreconditionError("cannot cover a group with translates of the empty set")

    n = G.order
    translates = np.zeros((n, n), dtype=np.int64)
    rows = np.repeat(np.arange(n), len(A))
    translates[rows, G.mul_table[:, A.members].ravel()] = 1
    uncovered = np.ones(n, dtype=np.int64)
    chosen = []
    while uncovered.any():
        gains = translates @ uncovered
        g = int(np.argmax(gains))
        chosen.append(g)
        uncovered[translates[g] == 1] = 0
        if verbose:
            print(f"[cover] picked {g}, {int(uncovered.sum())} left", file=stderr)

    cert = CoverCertificate(FiniteSet.of(G, chosen), A, cover_bound(n, len(A)))
    if not cert.replay():
        raise CertificateError(f"greedy cover of size {len(chosen)} failed its replay")
    return cert


def partition_large_cell(G: FiniteGroup, cells: list[FiniteSet]) -> tuple[int, CoverCertificate]:
    """
    For a partition of G into n cells, cover G by translates of the
    largest cell with at most n(ln(|G|/n) + 1) of them.
    """
    if not cells:
        raise PreconditionError("partition has no cells")
    seen = FiniteSet.empty(G)
    for i, cell in enumerate(cells):
        if cell.carrier != G:
            raise CarrierError(f"cell {i} lives on {cell.carrier.name}, not {G.name}")
        if not seen.isdisjoint(cell):
            raise PreconditionError(f"cell {i} overlaps an earlier cell")
        seen = seen.union(cell)
    if len(seen) != G.order:
        raise PreconditionError(f"cells cover {len(seen)} of {G.order} elements")

    sizes = [len(c) for c in cells]
    index = sizes.index(max(sizes))
    n = len(cells)
    cert = greedy_cover(G, cells[index])
    cert = CoverCertificate(cert.B, cert.target, cert.bound, n * (math.log(G.order / n) + 1))
    if not cert.replay():
        raise CertificateError("partition cover exceeds its bound")
    return index, cert


# ---------------------------------------------------------------------------
# Maximal E-separated subsets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NetCertificate:
    """
    B inside S, maximal with the translates Eb pairwise disjoint. The
    uniform measure nu on E^-1 gives every right translate of B mass at
    most 1/|E|.
    """

    E: FiniteSet
    S: FiniteSet = field(repr=False)
    B: FiniteSet
    nu: FiniteMeasure = field(repr=False)
    sup_mass: Fraction
    window: tuple[int, int] | None = None

    def replay(self) -> bool:
        if not self.B.issubset(self.S):
            return False
        if isinstance(self.E.carrier, WindowedGroup):
            checks = _line_net_checks(self.E, self.S, self.B, self.window)
        else:
            checks = _finite_net_checks(self.E, self.S, self.B)
        disjoint, maximal, sup_mass = checks
        return disjoint and maximal and sup_mass == self.sup_mass and sup_mass <= Fraction(1, len(self.E))

    def to_dict(self) -> dict:
        out = {
            "E": self.E.to_list(),
            "B_size": len(self.B),
            "sup_translate_mass": fraction_str(self.sup_mass),
        }
        if len(self.B) <= 256:
            out["B"] = self.B.to_list()
        if self.window is not None:
            out["window"] = list(self.window)
        return out


def _finite_net_checks(E: FiniteSet, S: FiniteSet, B: FiniteSet) -> tuple[bool, bool, Fraction]:
    G: FiniteGroup = E.carrier
    t = G.mul_table
    products = t[np.ix_(E.members, B.members)]
    disjoint = len(np.unique(products)) == len(E) * len(B)
    reach = set_product(set_product(inverse_set(E), E), B)
    maximal = S.issubset(reach)
    in_einv = np.zeros(G.order, dtype=np.int64)
    in_einv[G.inv_table[E.members]] = 1
    hits = in_einv[t[B.members, :]].sum(axis=0) if len(B) else np.zeros(1, dtype=np.int64)
    return disjoint, maximal, Fraction(int(hits.max()), len(E))


def _is_interval(E: FiniteSet) -> bool:
    return len(E) > 0 and int(E.members[-1] - E.members[0]) + 1 == len(E)


def _line_net_checks(E: FiniteSet, S: FiniteSet, B: FiniteSet,
                     window: tuple[int, int]) -> tuple[bool, bool, Fraction]:
    lo, hi = window
    pts = B.members
    wanted = S.members[(S.members >= lo) & (S.members <= hi)]
    if _is_interval(E):
        width = len(E)
        disjoint = bool((np.diff(pts) >= width).all()) if len(pts) > 1 else True
        if len(pts) == 0:
            maximal = len(wanted) == 0
        else:
            idx = np.searchsorted(pts, wanted)
            left = pts[np.clip(idx - 1, 0, len(pts) - 1)]
            right = pts[np.clip(idx, 0, len(pts) - 1)]
            nearest = np.minimum(np.abs(wanted - left), np.abs(right - wanted))
            maximal = bool((nearest <= width - 1).all())
        # max number of B points in any run of `width` consecutive integers
        if len(pts):
            ends = np.searchsorted(pts, pts + width - 1, side="right")
            most = int((ends - np.arange(len(pts))).max())
        else:
            most = 0
        return disjoint, maximal, Fraction(most, width)

    diffs = np.unique(np.subtract.outer(E.members, E.members).ravel())
    member = set(int(b) for b in pts)
    disjoint = not any(int(b) + int(d) in member for b in pts for d in diffs if d != 0)
    reach = set(int(b) + int(d) for b in pts for d in diffs)
    maximal = all(int(s) in reach for s in wanted)
    counts: dict[int, int] = {}
    for b in pts:
        for e in E.members:
            counts[int(b) + int(e)] = counts.get(int(b) + int(e), 0) + 1
    return disjoint, maximal, Fraction(max(counts.values(), default=0), len(E))


def max_E_separated(E: FiniteSet, S: FiniteSet, policy: HorizonPolicy | None = None) -> NetCertificate:
    """
    Greedy maximal B inside S with {Eb : b in B} pairwise disjoint.

    Scans S in canonical order. On a windowed line S is taken inside
    the inner window of `policy` (default: the whole horizon) and the
    scan runs outward from the origin, non-negative points upward and
    then negative points downward, so widening the window never moves
    a point already chosen. E^-1 E has to fit in the horizon.
    """
    if len(E) == 0:
        raise PreconditionError("E must be non-empty")
    if E.carrier != acting_group(S.carrier) or E.carrier != S.carrier:
        raise CarrierError("E and S must be subsets of the same group")
    if isinstance(E.carrier, WindowedGroup):
        return _line_net(E, S, policy)

    G: FiniteGroup = E.carrier
    D = set_product(inverse_set(E), E)
    blocked = np.zeros(G.order, dtype=bool)
    chosen = []
    for s in S.members:
        if blocked[s]:
            continue
        chosen.append(int(s))
        blocked[G.mul_table[D.members, s]] = True
    B = FiniteSet.of(G, chosen)
    disjoint, maximal, sup_mass = _finite_net_checks(E, S, B)
    cert = NetCertificate(E, S, B, uniform(inverse_set(E)), sup_mass)
    if not (disjoint and maximal and sup_mass <= Fraction(1, len(E))):
        raise CertificateError("E-separated set failed its replay")
    return cert


def _line_net(E: FiniteSet, S: FiniteSet, policy: HorizonPolicy | None) -> NetCertificate:
    carrier: WindowedGroup = E.carrier
    if carrier.dimension != 1:
        raise PreconditionError("separated sets on windowed groups need dimension 1")
    spread = int(E.members[-1] - E.members[0])
    if spread > carrier.horizon:
        raise WindowOverflowError(
            f"E^-1 E reaches {spread}, beyond horizon {carrier.horizon}"
        )
    lo, hi = policy.inner_window() if policy is not None else (-carrier.horizon, carrier.horizon)
    pool = S.members[(S.members >= lo) & (S.members <= hi)]
    right, left = pool[pool >= 0], pool[pool < 0]

    if _is_interval(E):
        width = len(E)
        chosen = []
        i = 0
        while i < len(right):
            b = int(right[i])
            chosen.append(b)
            i = np.searchsorted(right, b + width)
        start = chosen[0] - width if chosen else (int(left[-1]) if len(left) else 0)
        j = np.searchsorted(left, start, side="right") - 1
        while j >= 0:
            b = int(left[j])
            chosen.append(b)
            j = np.searchsorted(left, b - width, side="right") - 1
    else:
        diffs = np.unique(np.subtract.outer(E.members, E.members).ravel())
        H = carrier.horizon
        blocked = np.zeros(2 * H + 1, dtype=bool)
        chosen = []
        for s in np.concatenate((right, left[::-1])):
            if blocked[s + H]:
                continue
            chosen.append(int(s))
            idx = s + diffs + H
            blocked[idx[(idx >= 0) & (idx <= 2 * H)]] = True

    B = FiniteSet.of(carrier, chosen)
    window = (lo, hi)
    disjoint, maximal, sup_mass = _line_net_checks(E, S, B, window)
    if not (disjoint and maximal and sup_mass <= Fraction(1, len(E))):
        raise CertificateError("E-separated set failed its replay")
    return NetCertificate(E, S, B, uniform(inverse_set(E)), sup_mass, window)


# ---------------------------------------------------------------------------
# Prethick cell of a finite cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrethickCell:
    status: str
    index: int | None = None
    K: FiniteSet | None = None
    verdict: ThicknessVerdict | None = None
    trace: tuple[FiniteSet, ...] = ()
    bound: int = 0

    def to_dict(self) -> dict:
        out = {"status": self.status, "bound": self.bound, "trace": [F.to_list() for F in self.trace]}
        if self.K is not None:
            out.update({"cell": self.index, "K": self.K.to_list(), "KA_thickness": self.verdict.to_dict()})
        return out


def prethick_cell(cover: list[FiniteSet], m: int, limits: Limits | None = None,
                  verbose: bool = VERBOSE) -> PrethickCell:
    """
    Find a cell A_i and K with |K| <= m^(n-1) such that K A_i is m-thick.

    Cell 0 is tested first; if some F of size <= m has no placement in
    it, the other cells are pulled back by F^-1 (they still cover X) and
    the search recurses on them. K collects the inverted patterns.
    """
    limits = limits or LIMITS
    if not cover:
        raise PreconditionError("cover has no cells")
    if m < 1:
        raise PreconditionError(f"m must be at least 1, got {m}")
    carrier = cover[0].carrier
    if isinstance(carrier, WindowedGroup):
        raise PreconditionError("prethick cells are computed on finite groups and G-spaces only")
    union = FiniteSet.empty(carrier)
    for i, cell in enumerate(cover):
        if cell.carrier != carrier:
            raise CarrierError(f"cell {i} lives on {cell.carrier.name}, not {carrier.name}")
        union = union.union(cell)
    if len(union) != carrier.size:
        raise PreconditionError(f"cells cover {len(union)} of {carrier.size} points")

    n = len(cover)
    bound = m ** (n - 1)
    group = acting_group(carrier)
    per_level = count_patterns(group.order, m)
    if per_level * n > limits.candidate_budget:
        return PrethickCell("undecided", bound=bound)
    budget = Budget(limits.candidate_budget)
    try:
        index, K, trace = _descend(list(enumerate(cover)), m, budget, verbose)
        product = set_product(K, cover[index])
        verdict = _thickness(product, m, None, budget)
    except BudgetExceeded:
        return PrethickCell("undecided", bound=bound)

    if verdict.verdict != "thick" or len(K) > bound:
        raise CertificateError(f"cell {index} with |K|={len(K)} is not {m}-thick after shifting")
    return PrethickCell("prethick", index, K, verdict, tuple(trace), bound)


def _descend(cells, m: int, budget: Budget, verbose: bool):
    index, first = cells[0]
    group = acting_group(first.carrier)
    identity = FiniteSet.of(group, [group.identity])
    if len(cells) == 1:
        return index, identity, []
    verdict = _thickness(first, m, None, budget)
    if verdict.verdict == "thick":
        return index, identity, []
    F_inv = inverse_set(verdict.failing)
    if verbose:
        print(f"[prethick] cell {index} fails pattern {verdict.failing.to_list()}", file=stderr)
    pulled = [(i, set_product(F_inv, A)) for i, A in cells[1:]]
    found, E, trace = _descend(pulled, m, budget, verbose)
    return found, set_product(E, F_inv), [verdict.failing] + trace
