"""
Groups, G-spaces and finite subsets.

Finite groups are Cayley tables (element ids 0..n-1). G-spaces are
action tables of shape (|G|, |X|). Windowed groups stand in for Z^d:
vectors are only valid inside a ball of radius `horizon`, and any
operation that leaves the ball raises WindowOverflowError.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Union

import numpy as np

from src.errors import (
    CarrierError,
    GroupDefinitionError,
    PreconditionError,
    WindowOverflowError,
)
from src.models import LIMITS, Limits


# np.add.outer is used below this many pairs, indicator shifts above it
_OUTER_PAIR_LIMIT = 1 << 22


def _freeze(values, dtype=np.int64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _digest(*arrays: np.ndarray) -> str:
    h = hashlib.sha1()
    for arr in arrays:
        h.update(str(arr.shape).encode())
        h.update(np.ascontiguousarray(arr, dtype=np.int64).tobytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Validation reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[int, ...]
    detail: str

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness), "detail": self.detail}


@dataclass
class ValidationReport:
    """Outcome of checking a table against the group or action axioms."""

    subject: str
    kind: str
    order: int
    identity: int | None = None
    violations: list[Violation] = field(default_factory=list)
    checked: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, axiom: str, witness: Iterable[int], detail: str) -> None:
        self.violations.append(Violation(axiom, tuple(int(w) for w in witness), detail))

    def summary(self) -> str:
        if self.ok:
            return f"{self.kind} '{self.subject}' of order {self.order}: ok"
        axioms = sorted({v.axiom for v in self.violations})
        return (
            f"{self.kind} '{self.subject}' of order {self.order}: "
            f"{len(self.violations)} violation(s) ({', '.join(axioms)})"
        )

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "kind": self.kind,
            "order": self.order,
            "identity": self.identity,
            "ok": self.ok,
            "checked": dict(self.checked),
            "violations": [v.to_dict() for v in self.violations],
        }


def _as_square_table(table) -> np.ndarray:
    try:
        t = np.asarray(table, dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise GroupDefinitionError(f"malformed table: {e}") from e
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise GroupDefinitionError(f"malformed table: expected a non-empty n x n table, got shape {t.shape}")
    return t


def _duplicate_pair(line: np.ndarray) -> tuple[int, int, int]:
    values, counts = np.unique(line, return_counts=True)
    dup = int(values[np.argmax(counts > 1)])
    cols = np.flatnonzero(line == dup)
    return int(cols[0]), int(cols[1]), dup


def validate_group(table, limits: Limits | None = None, name: str = "G") -> ValidationReport:
    """
    Check the group axioms on a Cayley table.

    Latin property, two-sided identity and inverses are checked exactly.
    Associativity is exhaustive up to `exhaustive_associativity_order`
    and sampled (seeded, so reproducible) above it.

    Returns:
        ValidationReport listing every violated axiom with a witness
    """
    limits = limits or LIMITS
    if isinstance(table, FiniteGroup):
        name, table = table.name, table.mul_table
    t = _as_square_table(table)
    n = t.shape[0]
    report = ValidationReport(subject=name, kind="group", order=n)

    if t.min() < 0 or t.max() >= n:
        bad = np.argwhere((t < 0) | (t >= n))[0]
        report.add("closure", bad, f"product {int(t[bad[0], bad[1]])} outside 0..{n - 1}")
        return report

    ids = np.arange(n)
    for g in np.flatnonzero((np.sort(t, axis=1) != ids).any(axis=1)):
        c0, c1, dup = _duplicate_pair(t[g])
        report.add("latin-row", (g, c0, c1), f"{g}*{c0} = {g}*{c1} = {dup}")
    for c in np.flatnonzero((np.sort(t, axis=0) != ids[:, None]).any(axis=0)):
        r0, r1, dup = _duplicate_pair(t[:, c])
        report.add("latin-column", (c, r0, r1), f"{r0}*{c} = {r1}*{c} = {dup}")

    left_units = (t == ids).all(axis=1)
    right_units = (t == ids[:, None]).all(axis=0)
    units = np.flatnonzero(left_units & right_units)
    if len(units) == 0:
        report.add("identity", (), "no two-sided identity element")
    else:
        e = int(units[0])
        report.identity = e
        has_inverse = ((t == e) & (t.T == e)).any(axis=1)
        for g in np.flatnonzero(~has_inverse):
            report.add("inverse", (g,), f"{g} has no two-sided inverse")

    if n <= limits.exhaustive_associativity_order:
        lhs = t[t]
        rhs = t[ids[:, None, None], t[None, :, :]]
        bad = np.argwhere(lhs != rhs)
        report.checked["associativity"] = f"exhaustive over {n ** 3} triples"
    else:
        samples = limits.associativity_samples_per_element * n
        rng = np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, samples))
        mismatch = t[t[a, b], c] != t[a, t[b, c]]
        bad = np.stack([a[mismatch], b[mismatch], c[mismatch]], axis=1)
        report.checked["associativity"] = f"sampled {samples} triples (seed 0)"
    if len(bad):
        a, b, c = (int(v) for v in bad[0])
        report.add(
            "associativity",
            (a, b, c),
            f"({a}*{b})*{c} = {int(t[t[a, b], c])} but {a}*({b}*{c}) = {int(t[a, t[b, c]])}"
            f" ({len(bad)} failing triple(s) found)",
        )
    return report


# ---------------------------------------------------------------------------
# Finite groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its Cayley table."""

    name: str
    mul_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)
    identity: int
    key: str = field(repr=False)
    factors: tuple[FiniteGroup, ...] = field(default=(), repr=False)

    @property
    def order(self) -> int:
        return int(self.mul_table.shape[0])

    @property
    def size(self) -> int:
        return self.order

    def mul(self, g: int, h: int) -> int:
        return int(self.mul_table[g, h])

    def inv(self, g: int) -> int:
        return int(self.inv_table[g])

    def elements(self) -> np.ndarray:
        return np.arange(self.order)

    def pair(self, index: int) -> tuple[int, int]:
        """Components of an element of a direct product."""
        if len(self.factors) != 2:
            raise PreconditionError(f"{self.name} is not a direct product")
        return divmod(int(index), self.factors[1].order)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @classmethod
    def from_table(cls, table, name: str = "G", limits: Limits | None = None) -> FiniteGroup:
        limits = limits or LIMITS
        t = _as_square_table(table)
        if t.shape[0] > limits.max_group_order:
            raise GroupDefinitionError(
                f"group '{name}' has order {t.shape[0]}, above max_group_order={limits.max_group_order}"
            )
        report = validate_group(t, limits, name=name)
        if not report.ok:
            raise GroupDefinitionError(report.summary(), report)
        return _assemble(t, name, report.identity)


def _assemble(table: np.ndarray, name: str, identity: int, factors=()) -> FiniteGroup:
    mul = _freeze(table)
    inv = _freeze(np.argmax(mul == identity, axis=1))
    return FiniteGroup(name=name, mul_table=mul, inv_table=inv, identity=int(identity),
                       key=_digest(mul), factors=tuple(factors))


def cyclic(n: int, limits: Limits | None = None) -> FiniteGroup:
    limits = limits or LIMITS
    if n < 1:
        raise GroupDefinitionError(f"cyclic group order must be positive, got {n}")
    if n > limits.max_group_order:
        raise GroupDefinitionError(f"order {n} above max_group_order={limits.max_group_order}")
    ids = np.arange(n)
    return _assemble(np.add.outer(ids, ids) % n, f"Z{n}", 0)


def product(G: FiniteGroup, H: FiniteGroup, limits: Limits | None = None) -> FiniteGroup:
    """Direct product G x H; the pair (g, h) has id g*|H| + h."""
    limits = limits or LIMITS
    n, m = G.order, H.order
    if n * m > limits.max_group_order:
        raise GroupDefinitionError(
            f"product {G.name}x{H.name} has order {n * m}, above max_group_order={limits.max_group_order}"
        )
    table = (G.mul_table[:, None, :, None] * m + H.mul_table[None, :, None, :]).reshape(n * m, n * m)
    return _assemble(table, f"{G.name}x{H.name}", G.identity * m + H.identity, factors=(G, H))


def dihedral(n: int, limits: Limits | None = None) -> FiniteGroup:
    """Symmetries of the n-gon; r^i s^j has id j*n + i."""
    limits = limits or LIMITS
    if n < 1:
        raise GroupDefinitionError(f"dihedral group needs n >= 1, got {n}")
    if 2 * n > limits.max_group_order:
        raise GroupDefinitionError(f"order {2 * n} above max_group_order={limits.max_group_order}")
    ids = np.arange(2 * n)
    rot, flip = ids % n, ids // n
    turned = np.where(flip[:, None] == 1, -rot[None, :], rot[None, :])
    table = (rot[:, None] + turned) % n + n * ((flip[:, None] + flip[None, :]) % 2)
    return _assemble(table, f"D{n}", 0)


def symmetric(n: int, limits: Limits | None = None) -> FiniteGroup:
    """Permutations of n points in lexicographic order; (pq)(x) = p(q(x))."""
    limits = limits or LIMITS
    if n < 1:
        raise GroupDefinitionError(f"symmetric group needs n >= 1, got {n}")
    if math.factorial(n) > limits.max_group_order:
        raise GroupDefinitionError(
            f"order {math.factorial(n)} above max_group_order={limits.max_group_order}"
        )
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
    codes = perms @ weights
    composed = perms[np.arange(len(perms))[:, None, None], perms[None, :, :]]
    return _assemble(np.searchsorted(codes, composed @ weights), f"S{n}", 0)


def element_order(G: FiniteGroup, g: int) -> int:
    x, k = int(g), 1
    while x != G.identity:
        x = G.mul(x, g)
        k += 1
    return k


# ---------------------------------------------------------------------------
# G-spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GSpace:
    """A finite set X with a left action of a finite group."""

    group: FiniteGroup
    action: np.ndarray = field(repr=False)
    name: str
    key: str = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.action.shape[1])

    def act(self, g: int, x: int) -> int:
        return int(self.action[g, x])

    def __eq__(self, other) -> bool:
        return isinstance(other, GSpace) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @classmethod
    def from_table(cls, group: FiniteGroup, action, name: str = "X",
                   limits: Limits | None = None) -> GSpace:
        report = validate_gspace(group, action, limits, name=name)
        if not report.ok:
            raise GroupDefinitionError(report.summary(), report)
        act = _freeze(action)
        return cls(group=group, action=act, name=name, key=group.key + ":" + _digest(act))


def validate_gspace(group: FiniteGroup, action, limits: Limits | None = None,
                    name: str = "X") -> ValidationReport:
    limits = limits or LIMITS
    try:
        a = np.asarray(action, dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise GroupDefinitionError(f"malformed action table: {e}") from e
    if a.ndim != 2 or a.shape[0] != group.order or a.shape[1] == 0:
        raise GroupDefinitionError(
            f"malformed action table: expected shape ({group.order}, |X|), got {a.shape}"
        )
    n, p = a.shape
    report = ValidationReport(subject=name, kind="action", order=p)
    if a.min() < 0 or a.max() >= p:
        bad = np.argwhere((a < 0) | (a >= p))[0]
        report.add("closure", bad, f"image {int(a[bad[0], bad[1]])} outside 0..{p - 1}")
        return report

    points = np.arange(p)
    for x in np.flatnonzero(a[group.identity] != points):
        report.add("identity", (x,), f"identity moves {x} to {int(a[group.identity, x])}")

    t = group.mul_table
    if n * n * p <= limits.exhaustive_associativity_order ** 3:
        lhs = a[t]
        rhs = a[np.arange(n)[:, None, None], a[None, :, :]]
        bad = np.argwhere(lhs != rhs)
        report.checked["compatibility"] = f"exhaustive over {n * n * p} triples"
    else:
        samples = limits.associativity_samples_per_element * n
        rng = np.random.default_rng(0)
        g, h = rng.integers(0, n, size=(2, samples))
        x = rng.integers(0, p, size=samples)
        mismatch = a[t[g, h], x] != a[g, a[h, x]]
        bad = np.stack([g[mismatch], h[mismatch], x[mismatch]], axis=1)
        report.checked["compatibility"] = f"sampled {samples} triples (seed 0)"
    if len(bad):
        g, h, x = (int(v) for v in bad[0])
        report.add("compatibility", (g, h, x), f"({g}*{h}).{x} != {g}.({h}.{x})")
    return report


@lru_cache(maxsize=32)
def regular_space(G: FiniteGroup) -> GSpace:
    """G acting on itself by left multiplication."""
    return GSpace(group=G, action=G.mul_table, name=f"{G.name} (regular)", key=G.key + ":regular")


def action_table(carrier) -> np.ndarray:
    if isinstance(carrier, FiniteGroup):
        return carrier.mul_table
    if isinstance(carrier, GSpace):
        return carrier.action
    raise CarrierError(f"{carrier!r} has no finite action table")


def acting_group(carrier):
    if isinstance(carrier, GSpace):
        return carrier.group
    return carrier


def orbits(X) -> list[FiniteSet]:
    """Orbits of the action, ordered by smallest point."""
    table = action_table(X)
    seen = np.zeros(table.shape[1], dtype=bool)
    result = []
    for x in range(table.shape[1]):
        if seen[x]:
            continue
        orbit = np.unique(table[:, x])
        seen[orbit] = True
        result.append(FiniteSet(X, orbit))
    return result


def is_transitive(X) -> bool:
    return len(orbits(X)) == 1


# ---------------------------------------------------------------------------
# Windowed Z^d
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowedGroup:
    """Z^d restricted to vectors of sup-norm at most `horizon`."""

    dimension: int
    horizon: int
    name: str = field(default="", compare=False)
    limits: Limits | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.dimension < 1 or self.horizon < 1:
            raise GroupDefinitionError(
                f"windowed group needs dimension >= 1 and horizon >= 1, got d={self.dimension} H={self.horizon}"
            )
        cap = (self.limits or LIMITS).max_windowed_dimension
        if self.dimension > cap:
            raise GroupDefinitionError(
                f"dimension {self.dimension} above max_windowed_dimension={cap}"
            )
        if not self.name:
            object.__setattr__(self, "name", f"Z^{self.dimension}[{self.horizon}]")

    @property
    def identity(self):
        return 0 if self.dimension == 1 else (0,) * self.dimension

    @property
    def size(self) -> int:
        return (2 * self.horizon + 1) ** self.dimension

    def check(self, vectors: np.ndarray) -> np.ndarray:
        if vectors.size and int(np.abs(vectors).max()) > self.horizon:
            worst = int(np.abs(vectors).max())
            raise WindowOverflowError(
                f"vector with coordinate {worst} leaves horizon {self.horizon} of {self.name}"
            )
        return vectors

    def universe(self) -> np.ndarray:
        if self.size > (self.limits or LIMITS).candidate_budget:
            raise PreconditionError(f"{self.name} has {self.size} vectors; too many to enumerate")
        axis = np.arange(-self.horizon, self.horizon + 1)
        if self.dimension == 1:
            return axis
        grids = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)


Carrier = Union[FiniteGroup, GSpace, WindowedGroup]


def carrier_size(carrier: Carrier) -> int:
    return carrier.size


# ---------------------------------------------------------------------------
# Finite sets
# ---------------------------------------------------------------------------


def _canonical_members(carrier: Carrier, members) -> np.ndarray:
    if isinstance(carrier, WindowedGroup) and carrier.dimension > 1:
        arr = np.asarray(members, dtype=np.int64).reshape(-1, carrier.dimension)
        if len(arr):
            arr = np.unique(arr, axis=0)
        carrier.check(arr)
    else:
        arr = np.unique(np.asarray(members, dtype=np.int64).ravel())
        if isinstance(carrier, WindowedGroup):
            carrier.check(arr)
        elif arr.size and (arr[0] < 0 or arr[-1] >= carrier.size):
            raise CarrierError(f"element ids outside 0..{carrier.size - 1} of {carrier.name}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteSet:
    """Canonical sorted subset of a carrier (group, G-space or windowed group)."""

    carrier: Carrier
    members: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "members", _canonical_members(self.carrier, self.members))

    @classmethod
    def of(cls, carrier: Carrier, items: Iterable) -> FiniteSet:
        items = list(items)
        if isinstance(carrier, WindowedGroup) and carrier.dimension > 1:
            return cls(carrier, np.asarray(items, dtype=np.int64).reshape(-1, carrier.dimension))
        return cls(carrier, np.asarray(items, dtype=np.int64))

    @classmethod
    def empty(cls, carrier: Carrier) -> FiniteSet:
        return cls.of(carrier, [])

    @classmethod
    def full(cls, carrier: Carrier) -> FiniteSet:
        if isinstance(carrier, WindowedGroup):
            return cls(carrier, carrier.universe())
        return cls(carrier, np.arange(carrier.size))

    @property
    def is_vector(self) -> bool:
        return self.members.ndim == 2

    def __len__(self) -> int:
        return int(self.members.shape[0])

    def __iter__(self) -> Iterator:
        if self.is_vector:
            return (tuple(int(v) for v in row) for row in self.members)
        return (int(x) for x in self.members)

    def __contains__(self, item) -> bool:
        if self.is_vector:
            return bool((self.members == np.asarray(item)).all(axis=1).any())
        idx = np.searchsorted(self.members, item)
        return bool(idx < len(self.members) and self.members[idx] == item)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteSet)
            and self.carrier == other.carrier
            and np.array_equal(self.members, other.members)
        )

    def __hash__(self) -> int:
        return hash((self.carrier, self.members.tobytes()))

    def __repr__(self) -> str:
        items = self.to_list()
        shown = ", ".join(str(x) for x in items[:12])
        if len(items) > 12:
            shown += f", ... ({len(items)} total)"
        return f"FiniteSet({self.carrier.name}, {{{shown}}})"

    def to_list(self) -> list:
        return list(self)

    def _same(self, other: FiniteSet) -> None:
        if self.carrier != other.carrier:
            raise CarrierError(f"sets on different carriers: {self.carrier.name} vs {other.carrier.name}")

    def _rowset(self) -> set:
        return set(self)

    def union(self, other: FiniteSet) -> FiniteSet:
        self._same(other)
        if self.is_vector:
            return FiniteSet.of(self.carrier, sorted(self._rowset() | other._rowset()))
        return FiniteSet(self.carrier, np.union1d(self.members, other.members))

    def intersection(self, other: FiniteSet) -> FiniteSet:
        self._same(other)
        if self.is_vector:
            return FiniteSet.of(self.carrier, sorted(self._rowset() & other._rowset()))
        return FiniteSet(self.carrier, np.intersect1d(self.members, other.members, assume_unique=True))

    def difference(self, other: FiniteSet) -> FiniteSet:
        self._same(other)
        if self.is_vector:
            return FiniteSet.of(self.carrier, sorted(self._rowset() - other._rowset()))
        return FiniteSet(self.carrier, np.setdiff1d(self.members, other.members, assume_unique=True))

    def complement(self) -> FiniteSet:
        return FiniteSet.full(self.carrier).difference(self)

    def issubset(self, other: FiniteSet) -> bool:
        return len(self.difference(other)) == 0

    def isdisjoint(self, other: FiniteSet) -> bool:
        return len(self.intersection(other)) == 0


def universe(carrier: Carrier) -> FiniteSet:
    return FiniteSet.full(carrier)


def interval(carrier: WindowedGroup, lo: int, hi: int) -> FiniteSet:
    """The integer interval [lo, hi] in a one-dimensional windowed group."""
    if carrier.dimension != 1:
        raise PreconditionError("intervals need a one-dimensional windowed group")
    if hi < lo:
        return FiniteSet.empty(carrier)
    return FiniteSet(carrier, np.arange(lo, hi + 1))


def indicator(S: FiniteSet) -> np.ndarray:
    """Boolean mask over the carrier; windowed sets are offset by the horizon."""
    carrier = S.carrier
    if isinstance(carrier, WindowedGroup):
        if carrier.dimension != 1:
            raise PreconditionError("indicators need a one-dimensional carrier")
        mask = np.zeros(2 * carrier.horizon + 1, dtype=bool)
        mask[S.members + carrier.horizon] = True
        return mask
    mask = np.zeros(carrier.size, dtype=bool)
    mask[S.members] = True
    return mask


def from_indicator(carrier: Carrier, mask: np.ndarray) -> FiniteSet:
    offset = carrier.horizon if isinstance(carrier, WindowedGroup) else 0
    return FiniteSet(carrier, np.flatnonzero(mask) - offset)


def shift_or(acc: np.ndarray, mask: np.ndarray, shift: int) -> None:
    """acc[i] |= mask[i - shift], dropping whatever falls off either end."""
    n = len(mask)
    if shift >= n or -shift >= n:
        return
    if shift >= 0:
        acc[shift:] |= mask[: n - shift]
    else:
        acc[: n + shift] |= mask[-shift:]


def set_product(F: FiniteSet, A: FiniteSet) -> FiniteSet:
    """FA = {f a : f in F, a in A}; A may live on a group or a G-space over F's group."""
    group = acting_group(A.carrier)
    if F.carrier != group:
        raise CarrierError(f"{F.carrier.name} does not act on {A.carrier.name}")
    if len(F) == 0 or len(A) == 0:
        return FiniteSet.empty(A.carrier)
    if isinstance(group, WindowedGroup):
        return _windowed_sum(F, A)
    table = action_table(A.carrier)
    return FiniteSet(A.carrier, table[np.ix_(F.members, A.members)].ravel())


def _windowed_sum(F: FiniteSet, A: FiniteSet) -> FiniteSet:
    group: WindowedGroup = A.carrier
    if group.dimension > 1:
        out = (F.members[:, None, :] + A.members[None, :, :]).reshape(-1, group.dimension)
        return FiniteSet(group, group.check(out))
    if len(F) * len(A) <= _OUTER_PAIR_LIMIT:
        out = np.add.outer(F.members, A.members).ravel()
        return FiniteSet(group, group.check(out))
    group.check(np.array([F.members[0] + A.members[0], F.members[-1] + A.members[-1]]))
    mask = indicator(A)
    acc = np.zeros_like(mask)
    for f in F.members:
        shift_or(acc, mask, int(f))
    return from_indicator(group, acc)


def clipped_product(F: FiniteSet, A: FiniteSet) -> FiniteSet:
    """FA on a one-dimensional windowed group, keeping only sums inside the horizon."""
    group = A.carrier
    if not isinstance(group, WindowedGroup) or group.dimension != 1:
        return set_product(F, A)
    if F.carrier != group:
        raise CarrierError(f"{F.carrier.name} does not act on {group.name}")
    mask = indicator(A)
    acc = np.zeros_like(mask)
    for f in F.members:
        shift_or(acc, mask, int(f))
    return from_indicator(group, acc)


def inverse_set(F: FiniteSet) -> FiniteSet:
    carrier = F.carrier
    if isinstance(carrier, FiniteGroup):
        return FiniteSet(carrier, carrier.inv_table[F.members])
    if isinstance(carrier, WindowedGroup):
        return FiniteSet(carrier, -F.members)
    raise CarrierError(f"points of {carrier.name} have no inverses")


def translate(g, A: FiniteSet) -> FiniteSet:
    return set_product(FiniteSet.of(acting_group(A.carrier), [g]), A)


def is_subgroup(G: FiniteGroup, H: FiniteSet) -> bool:
    if H.carrier != G or len(H) == 0 or G.identity not in H:
        return False
    closed = np.isin(G.mul_table[np.ix_(H.members, H.members)], H.members).all()
    return bool(closed and np.isin(G.inv_table[H.members], H.members).all())


def is_normal(G: FiniteGroup, H: FiniteSet) -> bool:
    if not is_subgroup(G, H):
        return False
    ids = G.elements()
    conjugates = G.mul_table[G.mul_table[np.ix_(ids, H.members)], G.inv_table[ids][:, None]]
    return bool(np.isin(conjugates, H.members).all())


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupHom:
    """
    A group homomorphism. Finite homomorphisms carry an image table;
    windowed ones an integer matrix of shape (target dim, source dim).
    `surjective` is None when it could not be decided.
    """

    source: Carrier
    target: Carrier
    images: np.ndarray | None = field(default=None, repr=False)
    matrix: np.ndarray | None = field(default=None, repr=False)
    surjective: bool | None = None

    def apply_set(self, S: FiniteSet) -> FiniteSet:
        if S.carrier != self.source:
            raise CarrierError(f"set lives on {S.carrier.name}, map starts at {self.source.name}")
        if self.images is not None:
            return FiniteSet(self.target, self.images[S.members])
        vecs = S.members.reshape(len(S), -1)
        out = vecs @ self.matrix.T
        if self.target.dimension == 1:
            out = out.ravel()
        return FiniteSet(self.target, self.target.check(out))

    def apply(self, g):
        if self.images is not None:
            return int(self.images[g])
        return next(iter(self.apply_set(FiniteSet.of(self.source, [g]))))

    def preimage(self, S: FiniteSet) -> FiniteSet:
        if S.carrier != self.target:
            raise CarrierError(f"set lives on {S.carrier.name}, map ends at {self.target.name}")
        if self.images is not None:
            return FiniteSet(self.source, np.flatnonzero(np.isin(self.images, S.members)))
        points = self.source.universe()
        vecs = points.reshape(len(points), -1)
        out = vecs @ self.matrix.T
        inside = (np.abs(out) <= self.target.horizon).all(axis=1)
        if self.target.dimension == 1:
            hit = inside & np.isin(out.ravel(), S.members)
        else:
            wanted = S._rowset()
            hit = inside & np.array([tuple(int(v) for v in row) in wanted for row in out], dtype=bool)
        return FiniteSet(self.source, points[hit])


def finite_hom(source: FiniteGroup, target: FiniteGroup, images) -> GroupHom:
    img = np.asarray(images, dtype=np.int64)
    if img.shape != (source.order,):
        raise GroupDefinitionError(f"image table must have {source.order} entries, got shape {img.shape}")
    if img.min() < 0 or img.max() >= target.order:
        raise GroupDefinitionError(f"image ids outside 0..{target.order - 1}")
    lhs = img[source.mul_table]
    rhs = target.mul_table[img[:, None], img[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        g, h = (int(v) for v in bad[0])
        raise GroupDefinitionError(f"not a homomorphism: h({g}*{h}) != h({g})*h({h})")
    return GroupHom(source, target, images=_freeze(img),
                    surjective=bool(len(np.unique(img)) == target.order))


def cyclic_hom(source: FiniteGroup, target: FiniteGroup, a: int) -> GroupHom:
    """g -> a*g mod n between cyclic groups; needs n to divide the source order."""
    n = target.order
    if source.order % n:
        raise PreconditionError(f"{n} does not divide {source.order}")
    return finite_hom(source, target, (a * source.elements()) % n)


def _integer_det(matrix: np.ndarray) -> int:
    rows = [[Fraction(int(v)) for v in row] for row in matrix]
    n, det = len(rows), Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] / rows[col][col]
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return int(det)


def linear_hom(source: WindowedGroup, target: WindowedGroup, matrix) -> GroupHom:
    m = np.asarray(matrix, dtype=np.int64).reshape(target.dimension, source.dimension)
    if target.dimension == 1:
        surjective = reduce(math.gcd, (abs(int(v)) for v in m[0]), 0) == 1
    elif target.dimension == source.dimension:
        surjective = abs(_integer_det(m)) == 1
    else:
        surjective = None
    return GroupHom(source, target, matrix=_freeze(m), surjective=surjective)
