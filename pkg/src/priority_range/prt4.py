"""Four-sided prioritized range reporting.

A weight-balanced binary search tree on x stores the points in its leaves.
Every non-root node keeps a three-sided priority range tree over the points
below it, built on transformed coordinates: the BST dimension of that tree is
the original y, and its one-sided dimension is +x for a left child (answering
[a, inf) x [c, d]) or -x for a right child (answering (-inf, b] x [c, d]).
A query splits at the node where the searches for a and b diverge and asks the
two children.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .core import (FourSidedRange, QueryCounters, ThreeSidedRange, WeightedPoint,
                   check_unique_ids, contains, depth_within, rank_threshold)
from .prt import PriorityRangeTree, top_k_search
from .wbpst import weight_split

LEAF_DEPTH_FACTOR = 2


class XNode:
    __slots__ = ("left", "right", "point", "lo", "hi", "depth", "points", "prt", "is_left")

    def __init__(self, points, depth, is_left):
        self.points = points  # x-sorted points of the subtree
        self.lo = points[0].x
        self.hi = points[-1].x
        self.depth = depth
        self.is_left = is_left
        self.left: Optional[XNode] = None
        self.right: Optional[XNode] = None
        self.point: Optional[WeightedPoint] = points[0] if len(points) == 1 else None
        self.prt: Optional[PriorityRangeTree] = None

    @property
    def is_leaf(self) -> bool:
        return self.point is not None


def _transform(p: WeightedPoint, left_child: bool) -> WeightedPoint:
    return WeightedPoint(p.id, p.y, p.x if left_child else -p.x, p.w)


class FourSidedIndex:
    def __init__(self, root: Optional[XNode], points: list[WeightedPoint]):
        self.root = root
        self.points = {p.id: p for p in points}
        self.n = len(points)
        self.W = sum(p.w for p in points)

    @classmethod
    def build(cls, points: Sequence[WeightedPoint]) -> "FourSidedIndex":
        check_unique_ids(points)
        ordered = sorted(points, key=lambda p: (p.x, p.id))

        def rec(seq, depth, is_left):
            node = XNode(seq, depth, is_left)
            if depth > 0:
                node.prt = PriorityRangeTree.build([_transform(p, is_left) for p in seq])
            if len(seq) > 1:
                cut = min(max(weight_split(seq), 1), len(seq) - 1)
                node.left = rec(seq[:cut], depth + 1, True)
                node.right = rec(seq[cut:], depth + 1, False)
            return node

        return cls(rec(ordered, 0, False) if ordered else None, list(points))

    # -- structure --------------------------------------------------------------

    def nodes(self):
        stack = [self.root] if self.root is not None else []
        while stack:
            v = stack.pop()
            yield v
            if not v.is_leaf:
                stack.append(v.left)
                stack.append(v.right)

    def leaf_depths(self) -> dict[int, int]:
        return {v.point.id: v.depth for v in self.nodes() if v.is_leaf}

    def replicated_size(self) -> int:
        """Total number of points stored across all per-node trees."""
        return sum(v.prt.n for v in self.nodes() if v.prt is not None)

    def space_nodes(self) -> int:
        return sum(1 for _ in self.nodes()) + sum(
            v.prt.space_nodes() for v in self.nodes() if v.prt is not None)

    def check_invariants(self) -> list[str]:
        problems = []
        for v in self.nodes():
            if v.is_leaf:
                if not depth_within(v.depth, v.point.w, self.W, LEAF_DEPTH_FACTOR, LEAF_DEPTH_FACTOR):
                    problems.append(f"leaf {v.point.id} at depth {v.depth} exceeds 2*log2(W/w)+2")
            if v.depth > 0:
                if v.prt is None or v.prt.n != len(v.points):
                    problems.append(f"node at depth {v.depth} lacks a full per-node tree")
                elif sorted(p.id for p in (u.point for u in v.prt.nodes)) != sorted(p.id for p in v.points):
                    problems.append("per-node tree holds the wrong points")
            elif v.prt is not None:
                problems.append("root must not carry a per-node tree")
        return problems

    # -- queries ----------------------------------------------------------------

    def _diverge(self, rng: FourSidedRange):
        """Return ("split", node), ("leaf", node) or ("none", None)."""
        v = self.root
        if v is None:
            return "none", None
        a, b = rng.a, rng.b
        while not v.is_leaf:
            if b < v.right.lo:
                if a > v.left.hi:
                    return "none", None
                v = v.left
            elif a > v.left.hi:
                v = v.right
            else:
                return "split", v
        return "leaf", v

    @staticmethod
    def _halves(s: XNode, rng: FourSidedRange):
        return ((s.left.prt, ThreeSidedRange(rng.c, rng.d, rng.a)),
                (s.right.prt, ThreeSidedRange(rng.c, rng.d, -rng.b)))

    def threshold_query4(self, rng: FourSidedRange, w: int,
                         counters: Optional[QueryCounters] = None) -> list[WeightedPoint]:
        c = counters if counters is not None else QueryCounters()
        c.reset()
        qr = rank_threshold(w)
        kind, s = self._diverge(rng)
        if kind == "none":
            return []
        if kind == "leaf":
            p = s.point
            return [p] if contains(rng, p) and p.rank >= qr else []
        out = []
        sub = QueryCounters()
        for tree, half in self._halves(s, rng):
            out.extend(self.points[p.id] for p in tree.threshold_query(half, w, sub))
            c.tree_nodes_visited += sub.tree_nodes_visited
            c.catalog_entries_scanned += sub.catalog_entries_scanned
            c.heap_nodes_visited += sub.heap_nodes_visited
        out.sort(key=lambda p: p.id)
        return out

    def top_k4(self, rng: FourSidedRange, k: int,
               counters: Optional[QueryCounters] = None) -> list[WeightedPoint]:
        if k < 1:
            raise ValueError("k must be >= 1")
        kind, s = self._diverge(rng)
        if kind == "none":
            if counters is not None:
                counters.reset()
            return []
        if kind == "leaf":
            if counters is not None:
                counters.reset()
            return [s.point] if contains(rng, s.point) else []
        found = top_k_search(self._halves(s, rng), k, counters)
        return [self.points[p.id] for p in found]
