"""Canonical enumeration of k-element subsets of Z by radius."""

from __future__ import annotations

import itertools
from typing import Iterator

from src.errors import PreconditionError


def iter_k_subsets(k: int, max_radius: int | None = None) -> Iterator[tuple[int, ...]]:
    """
    Yield every k-subset of Z once, in shells of growing radius: at
    radius r, the subsets of [-r, r] that touch -r or r, in
    lexicographic order.
    """
    if k < 1:
        raise PreconditionError(f"k must be at least 1, got {k}")
    r = 0
    while max_radius is None or r <= max_radius:
        pool = range(-r, r + 1)
        for combo in itertools.combinations(pool, k):
            if combo[0] == -r or combo[-1] == r:
                yield combo
        r += 1


def enumerate_k_subsets(k: int, count: int, max_radius: int | None = None) -> list[tuple[int, ...]]:
    """The first `count` k-subsets in the canonical order."""
    if count < 0:
        raise PreconditionError(f"count must be non-negative, got {count}")
    return list(itertools.islice(iter_k_subsets(k, max_radius), count))


def radius_for(k: int, count: int) -> int:
    """A radius whose ball holds at least `count` k-subsets."""
    return -(-count // 2) + k
