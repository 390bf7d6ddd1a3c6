"""Brute-force referees and the per-rank suffix baseline.

Everything here favors obviousness over speed; the index structures are
checked against these functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (QueryCounters, ThreeSidedRange, WeightedPoint, check_unique_ids,
                   contains, rank_threshold)


def oracle_threshold(points: Sequence[WeightedPoint], rng, w: int) -> list[WeightedPoint]:
    r = rank_threshold(w)
    return sorted((p for p in points if contains(rng, p) and p.rank >= r), key=lambda p: p.id)


def oracle_topk(points: Sequence[WeightedPoint], rng, k: int) -> list[WeightedPoint]:
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = [p for p in points if contains(rng, p)]
    hits.sort(key=lambda p: (-p.rank, p.id))
    return hits[:k]


def oracle_max_rank(points: Sequence[WeightedPoint], rng) -> Optional[int]:
    ranks = [p.rank for p in points if contains(rng, p)]
    return max(ranks) if ranks else None


def dominates(p, q) -> bool:
    """Weak dominance on (rank, y) pairs; a pair never dominates itself."""
    return p[0] >= q[0] and p[1] >= q[1] and (p[0], p[1]) != (q[0], q[1])


def oracle_layers(points: Sequence[tuple]) -> list[list[tuple]]:
    """Repeated O(l^2) maxima peeling; each layer sorted by rank."""
    rest = [tuple(p[:2]) for p in points]
    layers = []
    while rest:
        layer = [p for p in rest if not any(dominates(q, p) for q in rest)]
        layers.append(sorted(layer))
        rest = [p for p in rest if p not in layer]
    return layers


class _PstNode:
    __slots__ = ("point", "split", "left", "right")

    def __init__(self, point, split, left, right):
        self.point, self.split, self.left, self.right = point, split, left, right


class PrioritySearchTree:
    """Classic split-by-size priority search tree (max-heap on y)."""

    def __init__(self, points: Sequence[WeightedPoint]):
        ordered = sorted(points, key=lambda p: (p.x, p.id))
        self.size = len(ordered)

        def rec(seq):
            if not seq:
                return None
            i = max(range(len(seq)), key=lambda j: (seq[j].y, -seq[j].id))
            rest = seq[:i] + seq[i + 1:]
            half = (len(rest) + 1) // 2
            a, b = rest[:half], rest[half:]
            split = a[-1].x if a else float("-inf")
            return _PstNode(seq[i], split, rec(a), rec(b))

        self.root = rec(ordered)

    def query(self, rng: ThreeSidedRange, counters: Optional[QueryCounters] = None):
        out = []
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            if counters is not None:
                counters.tree_nodes_visited += 1
            p = node.point
            if p.y < rng.y:
                continue
            if rng.x1 <= p.x <= rng.x2:
                out.append(p)
            if node.left is not None and rng.x1 <= node.split:
                stack.append(node.left)
            if node.right is not None and rng.x2 >= node.split:
                stack.append(node.right)
        return out


@dataclass
class SuffixPstBaseline:
    """One priority search tree per rank i over all points with rank >= i.

    Linear space only when rank frequencies decay geometrically.
    """

    trees: list[PrioritySearchTree]

    @classmethod
    def build(cls, points: Sequence[WeightedPoint]) -> "SuffixPstBaseline":
        check_unique_ids(points)
        top = max((p.rank for p in points), default=-1)
        trees = [PrioritySearchTree([p for p in points if p.rank >= i]) for i in range(top + 1)]
        return cls(trees)

    def space_nodes(self) -> int:
        return sum(t.size for t in self.trees)

    def threshold_query(self, rng: ThreeSidedRange, w: int,
                        counters: Optional[QueryCounters] = None) -> list[WeightedPoint]:
        if counters is not None:
            counters.reset()
        r = rank_threshold(w)
        if r >= len(self.trees):
            return []
        return sorted(self.trees[r].query(rng, counters), key=lambda p: p.id)


def baseline_threshold(b: SuffixPstBaseline, rng: ThreeSidedRange, w: int) -> list[WeightedPoint]:
    return b.threshold_query(rng, w)


__all__ = ["oracle_threshold", "oracle_topk", "oracle_max_rank", "oracle_layers",
           "PrioritySearchTree", "SuffixPstBaseline", "baseline_threshold"]
