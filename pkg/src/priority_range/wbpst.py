"""One-dimensional weight-balanced priority search tree.

The root holds a maximum-weight point; the remaining points are cut into an
x-prefix and an x-suffix of near-equal total weight, and both halves are built
recursively.  A point of weight w ends up at depth at most log2(W / w).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import QueryCounters, WeightedPoint, check_unique_ids, depth_within

NEG_INF = float("-inf")


def heaviest_index(seq: Sequence[WeightedPoint]) -> int:
    """Index of the max-weight point; ties go to the smallest id."""
    best = 0
    for i in range(1, len(seq)):
        p, q = seq[i], seq[best]
        if p.w > q.w or (p.w == q.w and p.id < q.id):
            best = i
    return best


def weight_split(seq: Sequence[WeightedPoint]) -> int:
    """Size of the prefix minimizing |w(prefix) - w(suffix)|.

    Linear scan over prefix sums; ties go to the smaller prefix.
    """
    total = sum(p.w for p in seq)
    best_i, best_diff = 0, total
    acc = 0
    for i, p in enumerate(seq, 1):
        acc += p.w
        diff = abs(2 * acc - total)
        if diff < best_diff:
            best_i, best_diff = i, diff
        elif acc * 2 > total:
            break
    return best_i


@dataclass(slots=True)
class WbPstNode:
    point: WeightedPoint
    split_key: float
    left: Optional["WbPstNode"]
    right: Optional["WbPstNode"]
    subtree_weight: int


class WbPst:
    def __init__(self, root: Optional[WbPstNode], total_weight: int, size: int):
        self.root = root
        self.total_weight = total_weight
        self.size = size

    @classmethod
    def build(cls, points: Sequence[WeightedPoint]) -> "WbPst":
        check_unique_ids(points)
        ordered = sorted(points, key=lambda p: (p.x, p.id))

        def rec(seq):
            if not seq:
                return None
            i = heaviest_index(seq)
            top = seq[i]
            rest = seq[:i] + seq[i + 1:]
            cut = weight_split(rest)
            a, b = rest[:cut], rest[cut:]
            key = a[-1].x if a else NEG_INF
            return WbPstNode(top, key, rec(a), rec(b), sum(p.w for p in seq))

        root = rec(ordered)
        return cls(root, sum(p.w for p in points), len(points))

    def threshold_query(self, a: float, b: float, w: int,
                        counters: Optional[QueryCounters] = None) -> list[WeightedPoint]:
        """Points with a <= x <= b and weight >= w, sorted by id."""
        if a > b:
            raise ValueError("a > b")
        if counters is not None:
            counters.reset()
        out = []
        visited = 0
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            visited += 1
            if node.point.w < w:
                continue
            if a <= node.point.x <= b:
                out.append(node.point)
            # equal x values may sit on both sides of the split key
            if node.left is not None and a <= node.split_key:
                stack.append(node.left)
            if node.right is not None and b >= node.split_key:
                stack.append(node.right)
        if counters is not None:
            counters.tree_nodes_visited = visited
        out.sort(key=lambda p: p.id)
        return out

    def iter_depths(self):
        """Yield (point, depth) pairs ordered by (x, id)."""
        items = []
        stack = [(self.root, 0)] if self.root is not None else []
        while stack:
            node, depth = stack.pop()
            items.append((node.point, depth))
            if node.left is not None:
                stack.append((node.left, depth + 1))
            if node.right is not None:
                stack.append((node.right, depth + 1))
        items.sort(key=lambda t: (t[0].x, t[0].id))
        return iter(items)

    def node_count(self) -> int:
        return sum(1 for _ in self.iter_depths())

    def check_invariants(self) -> list[str]:
        """Return a list of violated invariants (empty when the tree is sound)."""
        problems = []
        W = self.total_weight

        def rec(node, depth):
            if node is None:
                return 0, []
            p = node.point
            if not depth_within(depth, p.w, W):
                problems.append(f"point {p.id} at depth {depth} exceeds log2(W/w)")
            lw, lpts = rec(node.left, depth + 1)
            rw, rpts = rec(node.right, depth + 1)
            for q in lpts + rpts:
                if q.w > p.w:
                    problems.append(f"heap order broken below point {p.id}")
                    break
            for q in lpts:
                if q.x > node.split_key:
                    problems.append(f"left point {q.id} beyond split key of {p.id}")
            for q in rpts:
                if q.x < node.split_key:
                    problems.append(f"right point {q.id} before split key of {p.id}")
            sw = lw + rw + p.w
            if sw != node.subtree_weight:
                problems.append(f"subtree weight mismatch at {p.id}")
            return sw, lpts + rpts + [p]

        _, pts = rec(self.root, 0)
        if len(pts) != self.size:
            problems.append("node count differs from point count")
        return problems
