"""Shared domain types: weighted points, ranks, query ranges and counters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields


class PriorityRangeError(Exception):
    """Base class for errors raised by this package."""


class InvalidWeightError(PriorityRangeError, ValueError):
    pass


class BuildError(PriorityRangeError, ValueError):
    pass


class UnsupportedOperation(PriorityRangeError):
    pass


def rank_of(w: int) -> int:
    """Return floor(log2 w) using integer bit arithmetic."""
    if isinstance(w, bool) or not isinstance(w, int):
        raise InvalidWeightError(f"weight must be an integer, got {w!r}")
    if w < 1:
        raise InvalidWeightError(f"weight must be >= 1, got {w}")
    return w.bit_length() - 1


def rank_threshold(query_weight: int) -> int:
    """Minimum rank a point needs to satisfy a threshold query with this weight."""
    return rank_of(query_weight)


@dataclass(frozen=True, slots=True)
class WeightedPoint:
    id: int
    x: float
    y: float
    w: int
    rank: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point {self.id}: coordinates must be finite")
        object.__setattr__(self, "rank", rank_of(self.w))


@dataclass(frozen=True, slots=True)
class ThreeSidedRange:
    """The range [x1, x2] x [y, inf)."""

    x1: float
    x2: float
    y: float

    def __post_init__(self):
        if not self.x1 <= self.x2:
            raise ValueError(f"x1 > x2 in {self}")


@dataclass(frozen=True, slots=True)
class FourSidedRange:
    """The range [a, b] x [c, d]."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a <= self.b and self.c <= self.d):
            raise ValueError(f"empty side in {self}")


def contains(rng: ThreeSidedRange | FourSidedRange, p: WeightedPoint) -> bool:
    """Closed-boundary membership test for either range kind."""
    if isinstance(rng, ThreeSidedRange):
        return rng.x1 <= p.x <= rng.x2 and p.y >= rng.y
    return rng.a <= p.x <= rng.b and rng.c <= p.y <= rng.d


@dataclass(slots=True)
class QueryCounters:
    tree_nodes_visited: int = 0
    catalog_entries_scanned: int = 0
    heap_nodes_visited: int = 0
    pq_operations: int = 0

    def reset(self) -> None:
        for f in fields(self):
            setattr(self, f.name, 0)

    def total_visits(self) -> int:
        return self.tree_nodes_visited + self.catalog_entries_scanned + self.heap_nodes_visited

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def total_weight(points) -> int:
    return sum(p.w for p in points)


def check_unique_ids(points) -> None:
    seen = set()
    for p in points:
        if p.id in seen:
            raise BuildError(f"duplicate point id {p.id}")
        seen.add(p.id)


def depth_within(depth: int, w: int, W: int, factor: int = 1, slack: int = 0) -> bool:
    """Exact check of ``depth <= factor * log2(W / w) + slack``.

    Rewritten as ``2**(depth - slack) * w**factor <= W**factor`` so no floating
    point logarithm is involved.
    """
    e = depth - slack
    if e <= 0:
        return True
    return (w ** factor) << e <= W ** factor


def max_depth_for_rank(W: int, r: int, factor: int = 3, slack: int = 3) -> int:
    """Largest depth a point of rank >= r may occupy under the hybrid depth bound.

    A point with rank >= r has weight >= 2**r, so its depth is at most
    ``factor * (log2 W - r) + slack``.
    """
    return (W ** factor).bit_length() - 1 - factor * r + slack
