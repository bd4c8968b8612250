"""
Exact classifiers: m-large, m-thick, (k,m)-prethick and k-meager sets.

Finite carriers are decided exactly by bitmask search over candidate
patterns, in order of cardinality then lexicographic order of element
ids. One-dimensional windowed groups are decided relative to a
HorizonPolicy: patterns live in the margin ball and placements in the
inner window, and every result built that way says so.

Searches that would exceed the candidate budget return "undecided"
instead of running.
"""

from __future__ import annotations

import itertools
import math
import operator
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from src.errors import BudgetExceeded, PreconditionError
from src.groups import (
    FiniteSet,
    WindowedGroup,
    acting_group,
    action_table,
    clipped_product,
    indicator,
    interval,
    orbits,
    set_product,
)
from src.models import LIMITS, HorizonPolicy, LargeStatus, Limits, MeagerStatus, PrethickStatus, Verdict


class Budget:
    """Counts candidate checks against the configured cap."""

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def fits(self, count: int) -> bool:
        return self.used + count <= self.limit

    def charge(self, count: int = 1) -> None:
        self.used += count
        if self.used > self.limit:
            raise BudgetExceeded(f"candidate budget {self.limit} exhausted")


def count_patterns(pool: int, upto: int, start: int = 1) -> int:
    """Number of subsets of a pool with size in [start, upto]."""
    upto = min(upto, pool)
    return sum(math.comb(pool, j) for j in range(max(start, 0), upto + 1))


def _bits(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def _lowest_bit(value: int) -> int:
    return (value & -value).bit_length() - 1


def _check_m(m: int, name: str = "m") -> None:
    if m < 1:
        raise PreconditionError(f"{name} must be at least 1, got {m}")


def _line_policy(A: FiniteSet, policy: HorizonPolicy | None) -> HorizonPolicy:
    carrier = A.carrier
    if carrier.dimension != 1:
        raise PreconditionError("windowed classifiers support one-dimensional groups only")
    if policy is None:
        raise PreconditionError(f"{carrier.name} is windowed; a horizon policy is required")
    if policy.horizon != carrier.horizon:
        raise PreconditionError(
            f"policy horizon {policy.horizon} does not match {carrier.name}"
        )
    return policy


def _is_windowed(S: FiniteSet) -> bool:
    return isinstance(S.carrier, WindowedGroup)


def _pattern_pool(S: FiniteSet, policy: HorizonPolicy | None) -> tuple[int, ...]:
    if _is_windowed(S):
        r = _line_policy(S, policy).margin
        return tuple(range(-r, r + 1))
    return tuple(range(acting_group(S.carrier).order))


# ---------------------------------------------------------------------------
# Largeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LargenessWitness:
    """
    F with FA = X (finite), or F + A covering the window [lo, hi]
    (windowed). Replayable from its own fields.
    """

    F: FiniteSet
    target: FiniteSet
    window: tuple[int, int] | None = None

    @property
    def relation(self) -> str:
        if self.window is None:
            return "FA = X"
        return f"F+A covers [{self.window[0]}, {self.window[1]}]"

    def replay(self) -> bool:
        if self.window is None:
            return set_product(self.F, self.target) == FiniteSet.full(self.target.carrier)
        return covers_window(self.F, self.target, *self.window)

    def to_dict(self) -> dict:
        return {
            "F": self.F.to_list(),
            "relation": self.relation,
            "horizon_relative": self.window is not None,
        }


def covers_window(F: FiniteSet, S: FiniteSet, lo: int, hi: int) -> bool:
    """Whether F + S contains every integer of [lo, hi]."""
    if hi < lo:
        return True
    if len(F) == 0 or len(S) == 0:
        return False
    length = hi - lo + 1
    f = F.members
    if f[-1] - f[0] + 1 == len(f):
        starts = np.clip(S.members + f[0] - lo, 0, length)
        ends = np.clip(S.members + f[-1] - lo + 1, 0, length)
        diff = np.zeros(length + 1, dtype=np.int64)
        np.add.at(diff, starts, 1)
        np.add.at(diff, ends, -1)
        return bool((np.cumsum(diff)[:length] > 0).all())
    hit = np.zeros(length, dtype=bool)
    for shift in f:
        pos = S.members + shift
        pos = pos[(pos >= lo) & (pos <= hi)]
        hit[pos - lo] = True
    return bool(hit.all())


def distance_profile(S: FiniteSet, lo: int, hi: int) -> np.ndarray:
    """For each x in [lo, hi], the distance to the nearest point of S."""
    xs = np.arange(lo, hi + 1)
    pts = S.members
    idx = np.searchsorted(pts, xs)
    left = pts[np.clip(idx - 1, 0, len(pts) - 1)]
    right = pts[np.clip(idx, 0, len(pts) - 1)]
    return np.minimum(np.abs(xs - left), np.abs(right - xs))


def window_cover_witness(S: FiniteSet, lo: int, hi: int) -> LargenessWitness | None:
    """Smallest symmetric interval F = [-s, s] with F + S covering [lo, hi]."""
    if len(S) == 0:
        return None
    s = int(distance_profile(S, lo, hi).max()) if hi >= lo else 0
    if s > S.carrier.horizon:
        return None
    return LargenessWitness(interval(S.carrier, -s, s), S, (lo, hi))


def max_gap(S: FiniteSet, lo: int, hi: int) -> int:
    """Longest run between consecutive points of S, window edges included."""
    if len(S) == 0:
        return hi - lo + 1
    pts = S.members
    inner = int(np.diff(pts).max()) if len(pts) > 1 else 0
    return max(int(pts[0]) - lo, inner, hi - int(pts[-1]))


@dataclass(frozen=True)
class LargenessResult:
    status: LargeStatus
    target: FiniteSet
    m: int
    witness: LargenessWitness | None = None
    candidates: int = 0
    horizon: HorizonPolicy | None = None

    @property
    def horizon_relative(self) -> bool:
        return self.horizon is not None

    def to_dict(self) -> dict:
        out = {
            "query": f"{self.m}-large",
            "status": self.status,
            "candidates_checked": self.candidates,
            "horizon_relative": self.horizon_relative,
        }
        if self.horizon is not None:
            out["horizon"] = self.horizon.describe()
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def is_m_large(A: FiniteSet, m: int, policy: HorizonPolicy | None = None,
               limits: Limits | None = None) -> LargenessResult:
    """
    Search for F with |F| <= m and FA = X.

    Candidates of size j with j*|A| below the number of points to cover
    are skipped, since |FA| <= |F||A|.
    """
    _check_m(m)
    limits = limits or LIMITS
    pool = _pattern_pool(A, policy)
    if _is_windowed(A):
        return _windowed_large(A, m, _line_policy(A, policy), pool, limits)

    table = action_table(A.carrier)
    points = table.shape[1]
    if len(A) == 0:
        return LargenessResult("not-large", A, m)
    first = -(-points // len(A))
    total = count_patterns(len(pool), m, start=first)
    if total > limits.candidate_budget:
        return LargenessResult("undecided", A, m, candidates=0)

    translates = [_bits(np.isin(np.arange(points), table[g, A.members])) for g in pool]
    full = (1 << points) - 1
    checked = 0
    for j in range(max(first, 1), min(m, len(pool)) + 1):
        for F in itertools.combinations(pool, j):
            checked += 1
            if reduce(operator.or_, (translates[g] for g in F)) == full:
                witness = LargenessWitness(FiniteSet.of(acting_group(A.carrier), F), A)
                return LargenessResult("large", A, m, witness, checked)
    return LargenessResult("not-large", A, m, candidates=checked)


def _windowed_large(A: FiniteSet, m: int, policy: HorizonPolicy, pool, limits: Limits) -> LargenessResult:
    H = A.carrier.horizon
    lo, hi = policy.inner_window()
    r = policy.margin
    ind = indicator(A)
    near = int(ind[lo - r + H: hi + r + H + 1].sum())
    if near == 0:
        return LargenessResult("not-large", A, m, horizon=policy)
    first = -(-policy.inner_length // near)
    total = count_patterns(len(pool), m, start=first)
    if total > limits.candidate_budget:
        return LargenessResult("undecided", A, m, horizon=policy)

    views = {f: ind[lo - f + H: hi - f + H + 1] for f in pool}
    checked = 0
    for j in range(max(first, 1), min(m, len(pool)) + 1):
        for F in itertools.combinations(pool, j):
            checked += 1
            acc = views[F[0]].copy()
            for f in F[1:]:
                acc |= views[f]
            if acc.all():
                witness = LargenessWitness(FiniteSet.of(A.carrier, F), A, (lo, hi))
                return LargenessResult("large", A, m, witness, checked, policy)
    return LargenessResult("not-large", A, m, candidates=checked, horizon=policy)


def is_large(A: FiniteSet) -> bool:
    """Unbounded largeness on a finite carrier: A meets every orbit."""
    return all(not orbit.isdisjoint(A) for orbit in orbits(A.carrier))


def is_thick(A: FiniteSet) -> bool:
    """Unbounded thickness on a finite carrier: A contains an orbit."""
    return any(orbit.issubset(A) for orbit in orbits(A.carrier))


# ---------------------------------------------------------------------------
# Thickness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThicknessVerdict:
    """
    Outcome of an m-thickness query. A thick verdict on a finite carrier
    lists a placement x for every pattern F; a not-thick verdict names
    the first failing F.
    """

    verdict: Verdict
    target: FiniteSet
    m: int
    failing: FiniteSet | None = None
    placements: tuple[tuple[tuple, object], ...] = field(default=(), repr=False)
    candidates: int = 0
    horizon: HorizonPolicy | None = None

    @property
    def horizon_relative(self) -> bool:
        return self.horizon is not None

    def replay(self) -> bool:
        A = self.target
        if self.verdict == "undecided":
            return True
        if self.horizon is not None:
            if self.verdict == "not-thick":
                return not _window_placements(A, tuple(self.failing), self.horizon).any()
            scan = _windowed_scan(A, self.m, self.horizon, Budget(math.inf))
            return scan[0] == "thick"

        table = action_table(A.carrier)
        in_a = indicator(A)
        if self.verdict == "not-thick":
            hits = in_a[table[self.failing.members]].all(axis=0)
            return not hits.any()
        expected = count_patterns(acting_group(A.carrier).order, self.m)
        if len(self.placements) != expected:
            return False
        return all(bool(in_a[table[list(F), x]].all()) for F, x in self.placements)

    def to_dict(self) -> dict:
        out = {
            "query": f"{self.m}-thick",
            "status": self.verdict,
            "candidates_checked": self.candidates,
            "horizon_relative": self.horizon_relative,
        }
        if self.horizon is not None:
            out["horizon"] = self.horizon.describe()
        if self.failing is not None:
            out["failing_pattern"] = self.failing.to_list()
        if self.placements:
            out["placements"] = [[list(F), x] for F, x in self.placements]
        return out


def _window_placements(A: FiniteSet, F: tuple, policy: HorizonPolicy) -> np.ndarray:
    H = A.carrier.horizon
    lo, hi = policy.inner_window()
    ind = indicator(A)
    acc = np.ones(hi - lo + 1, dtype=bool)
    for f in F:
        acc &= ind[lo + f + H: hi + f + H + 1]
    return acc


def _windowed_scan(A: FiniteSet, m: int, policy: HorizonPolicy, budget: Budget):
    H = A.carrier.horizon
    lo, hi = policy.inner_window()
    r = policy.margin
    ind = indicator(A)
    views = {f: ind[lo + f + H: hi + f + H + 1] for f in range(-r, r + 1)}
    has_pair = {d: bool((ind[:-d] & ind[d:]).any()) for d in range(1, 2 * r + 1)}
    for j in range(1, min(m, 2 * r + 1) + 1):
        for F in itertools.combinations(range(-r, r + 1), j):
            budget.charge()
            if j == 2 and not has_pair[F[1] - F[0]]:
                return "not-thick", F, ()
            acc = views[F[0]].copy()
            for f in F[1:]:
                acc &= views[f]
            if not acc.any():
                return "not-thick", F, ()
    return "thick", None, ()


def _finite_scan(A: FiniteSet, m: int, budget: Budget):
    table = action_table(A.carrier)
    n = table.shape[0]
    in_a = indicator(A)
    pre = [_bits(in_a[table[g]]) for g in range(n)]
    placements = []
    for j in range(1, min(m, n) + 1):
        for F in itertools.combinations(range(n), j):
            budget.charge()
            hits = reduce(operator.and_, (pre[g] for g in F))
            if hits == 0:
                return "not-thick", F, ()
            placements.append((F, _lowest_bit(hits)))
    return "thick", None, tuple(placements)


def _thickness(A: FiniteSet, m: int, policy: HorizonPolicy | None, budget: Budget) -> ThicknessVerdict:
    start = budget.used
    if _is_windowed(A):
        policy = _line_policy(A, policy)
        verdict, failing, placements = _windowed_scan(A, m, policy, budget)
        group = A.carrier
    else:
        policy = None
        verdict, failing, placements = _finite_scan(A, m, budget)
        group = acting_group(A.carrier)
    failing_set = FiniteSet.of(group, failing) if failing is not None else None
    return ThicknessVerdict(verdict, A, m, failing_set, placements, budget.used - start, policy)


def is_m_thick(A: FiniteSet, m: int, policy: HorizonPolicy | None = None,
               limits: Limits | None = None) -> ThicknessVerdict:
    """
    Decide whether every F with |F| <= m has a placement x with Fx in A.

    Finite carriers are exact. Windowed carriers are decided relative to
    `policy` and the verdict is marked horizon-relative.
    """
    _check_m(m)
    limits = limits or LIMITS
    pool = _pattern_pool(A, policy)
    total = count_patterns(len(pool), m)
    horizon = _line_policy(A, policy) if _is_windowed(A) else None
    if total > limits.candidate_budget:
        return ThicknessVerdict("undecided", A, m, horizon=horizon)
    return _thickness(A, m, policy, Budget(limits.candidate_budget))


def _shifted(K: FiniteSet, A: FiniteSet, horizon: HorizonPolicy | None) -> FiniteSet:
    # placements sit in the inner window, so only KA inside the horizon is ever read
    if horizon is None:
        return set_product(K, A)
    return clipped_product(K, A)


# ---------------------------------------------------------------------------
# Prethickness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrethickResult:
    status: PrethickStatus
    target: FiniteSet
    k: int
    m: int
    K: FiniteSet | None = None
    verdict: ThicknessVerdict | None = None
    shifts_tried: int = 0
    horizon: HorizonPolicy | None = None

    @property
    def horizon_relative(self) -> bool:
        return self.horizon is not None

    def to_dict(self) -> dict:
        out = {
            "query": f"({self.k},{self.m})-prethick",
            "status": self.status,
            "shifts_tried": self.shifts_tried,
            "horizon_relative": self.horizon_relative,
        }
        if self.K is not None:
            out["K"] = self.K.to_list()
            out["KA_thickness"] = self.verdict.to_dict()
        return out


def is_k_m_prethick(A: FiniteSet, k: int, m: int, policy: HorizonPolicy | None = None,
                    limits: Limits | None = None) -> PrethickResult:
    """Search K with |K| <= k such that KA is m-thick."""
    _check_m(k, "k")
    _check_m(m)
    limits = limits or LIMITS
    pool = _pattern_pool(A, policy)
    horizon = _line_policy(A, policy) if _is_windowed(A) else None
    group = A.carrier if _is_windowed(A) else acting_group(A.carrier)
    total = count_patterns(len(pool), k) * count_patterns(len(pool), m)
    if total > limits.candidate_budget:
        return PrethickResult("undecided", A, k, m, horizon=horizon)

    budget = Budget(limits.candidate_budget)
    tried = 0
    for j in range(1, min(k, len(pool)) + 1):
        for K in itertools.combinations(pool, j):
            tried += 1
            K_set = FiniteSet.of(group, K)
            verdict = _thickness(_shifted(K_set, A, horizon), m, policy, budget)
            if verdict.verdict == "thick":
                return PrethickResult("prethick", A, k, m, K_set, verdict, tried, horizon)
    return PrethickResult("not-prethick", A, k, m, shifts_tried=tried, horizon=horizon)


# ---------------------------------------------------------------------------
# Meagerness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NotThickCertificate:
    """KA is not thick: its complement contains `guard`, which is large."""

    K: FiniteSet
    product: FiniteSet
    guard: FiniteSet
    witness: LargenessWitness
    margin: int | None = None

    def replay(self) -> bool:
        if not self.guard.isdisjoint(self.product):
            return False
        if self.witness.target != self.guard or not self.witness.replay():
            return False
        if self.margin is not None and len(self.witness.F):
            return int(np.abs(self.witness.F.members).max()) <= self.margin
        return True

    def to_dict(self) -> dict:
        return {
            "K": self.K.to_list(),
            "guard_size": len(self.guard),
            "witness": self.witness.to_dict(),
        }


@dataclass(frozen=True)
class MeagerResult:
    status: MeagerStatus
    target: FiniteSet
    k: int
    certificates: tuple[NotThickCertificate, ...] = ()
    thick_K: FiniteSet | None = None
    horizon: HorizonPolicy | None = None

    @property
    def horizon_relative(self) -> bool:
        return self.horizon is not None

    def replay(self) -> bool:
        return all(c.replay() for c in self.certificates)

    def to_dict(self) -> dict:
        out = {
            "query": f"{self.k}-meager",
            "status": self.status,
            "horizon_relative": self.horizon_relative,
            "certificates": [c.to_dict() for c in self.certificates],
        }
        if self.thick_K is not None:
            out["thick_K"] = self.thick_K.to_list()
        return out


def is_k_meager(A: FiniteSet, k: int, policy: HorizonPolicy | None = None,
                limits: Limits | None = None) -> MeagerResult:
    """
    A is k-meager when no K with |K| <= k makes KA thick. Each K gets a
    certificate: a large guard set inside the complement of KA.
    """
    _check_m(k, "k")
    limits = limits or LIMITS
    pool = _pattern_pool(A, policy)
    horizon = _line_policy(A, policy) if _is_windowed(A) else None
    group = A.carrier if horizon is not None else acting_group(A.carrier)
    if count_patterns(len(pool), k) > limits.candidate_budget:
        return MeagerResult("undecided", A, k, horizon=horizon)

    certificates = []
    for j in range(1, min(k, len(pool)) + 1):
        for K in itertools.combinations(pool, j):
            K_set = FiniteSet.of(group, K)
            product = _shifted(K_set, A, horizon)
            if horizon is None:
                cert = _finite_guard(K_set, product)
            else:
                cert = _window_guard(K_set, product, horizon)
            if cert is None:
                return MeagerResult("not-meager", A, k, tuple(certificates), K_set, horizon)
            certificates.append(cert)
    return MeagerResult("meager", A, k, tuple(certificates), horizon=horizon)


def _finite_guard(K: FiniteSet, product: FiniteSet) -> NotThickCertificate | None:
    if is_thick(product):
        return None
    guard = product.complement()
    group = acting_group(product.carrier)
    return NotThickCertificate(K, product, guard, LargenessWitness(FiniteSet.full(group), guard))


def _window_guard(K: FiniteSet, product: FiniteSet, policy: HorizonPolicy) -> NotThickCertificate | None:
    guard = product.complement()
    lo, hi = policy.inner_window()
    witness = window_cover_witness(guard, lo, hi)
    if witness is None or int(witness.F.members[-1]) > policy.margin:
        return None
    return NotThickCertificate(K, product, guard, witness, policy.margin)
