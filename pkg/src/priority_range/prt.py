"""Three-sided priority range tree.

Layout
------
Nodes above depth floor(log2(n) / 2) are placed by weight (as in the 1-D
weight-balanced tree), deeper nodes by size, with every split-by-size subtree
forced into complete shape.  Each node keeps the heaviest point of its
subtree, so the tree is heap ordered on weight throughout.

The first split-by-size subtree on a root-to-leaf path whose size is at most
2*log2(n) becomes a *bucket*: it keeps a single catalog with per-rank chains
and nothing else.  Every other node ("position") gets, for each rank r present
below it, the root of a persistent max-heap on y built from the rank-r points
(other points act as dummies).  Inside those heaps a bucket appears as one leaf
whose key is the largest rank-r y in the bucket.  The (rank, heap-root-y)
pairs of a position form its layers-of-maxima catalog.

Queries walk the two x-search paths down to a depth limit derived from the
depth bound ``depth <= 3*log2(W/w) + 3``; subtrees hanging off the paths that
lie fully inside [x1, x2] are answered from their catalogs and heaps.  Since
weights are heap ordered, a path node lighter than the threshold ends its
branch.
"""

from __future__ import annotations

import enum
import math
from typing import Optional, Sequence

from .core import (QueryCounters, ThreeSidedRange, WeightedPoint, check_unique_ids,
                   depth_within, max_depth_for_rank, rank_threshold)
from .maxima import MaximaCatalog
from .pheap import BOTTOM, BaseTree, PersistentHeap, build_persistent, iter_at_least, reachable
from .wbpst import heaviest_index, weight_split

DEPTH_FACTOR = 3
DEPTH_SLACK = 3


class Strategy(enum.Enum):
    BY_WEIGHT = "by_weight"
    BY_SIZE = "by_size"


def complete_left_size(s: int) -> int:
    """Left-subtree size of a complete binary tree with s nodes."""
    if s <= 1:
        return 0
    h = s.bit_length() - 1
    last = s - ((1 << h) - 1)
    return ((1 << (h - 1)) - 1) + min(last, 1 << (h - 1))


class PrtNode:
    __slots__ = ("id", "point", "split_key", "left", "right", "depth", "strategy",
                 "lo", "hi", "size", "catalog", "heap_versions", "bucket", "in_bucket", "position")

    def __init__(self, nid, point, split_key, depth, strategy, lo, hi, size):
        self.id = nid
        self.point = point
        self.split_key = split_key
        self.left = None
        self.right = None
        self.depth = depth
        self.strategy = strategy
        self.lo = lo
        self.hi = hi
        self.size = size
        self.catalog: Optional[MaximaCatalog] = None
        self.heap_versions: dict = {}
        self.bucket: Optional[Bucket] = None  # set on bucket roots
        self.in_bucket: Optional[Bucket] = None
        self.position = -1  # index in the heap base tree, -1 inside buckets

    def children(self):
        return [c for c in (self.left, self.right) if c is not None]

    def __repr__(self):
        return f"PrtNode(id={self.id}, point={self.point.id}, depth={self.depth}, {self.strategy.name})"


class Bucket:
    __slots__ = ("root", "points", "rank_chains", "catalog")

    def __init__(self, root: PrtNode, points: list[WeightedPoint], m: int):
        self.root = root
        self.points = points
        chains: dict[int, list[WeightedPoint]] = {}
        for p in sorted(points, key=lambda p: (-p.y, p.id)):
            chains.setdefault(p.rank, []).append(p)
        self.rank_chains = chains
        self.catalog = MaximaCatalog([(r, c[0].y, r) for r, c in chains.items()], m, chains=chains)

    def chain_max(self, r: int) -> float:
        c = self.rank_chains.get(r)
        return c[0].y if c else BOTTOM

    def __repr__(self):
        return f"Bucket(root={self.root.id}, size={len(self.points)})"


class RankPriorityQueue:
    """Max-priority queue over small integer ranks, stored as an array of cells."""

    def __init__(self, m: int, counters: Optional[QueryCounters] = None):
        self.cells: list[list] = [[] for _ in range(m)]
        self.r_max = -1
        self.r_min = m
        self.size = 0
        self.marches = 0
        self.raises = 0
        self._m = m
        self._counters = counters

    def __len__(self):
        return self.size

    def insert(self, rank: int, item) -> None:
        self.cells[rank].append(item)
        if rank > self.r_max:
            if self.size:
                self.raises += 1
            self.r_max = rank
        if rank < self.r_min:
            self.r_min = rank
        self.size += 1
        if self._counters is not None:
            self._counters.pq_operations += 1

    def max_rank(self) -> int:
        return self.r_max if self.size else -1

    def extract_max(self):
        if not self.size:
            raise IndexError("extract from empty queue")
        r = self.r_max
        item = self.cells[r].pop()
        self.size -= 1
        if self._counters is not None:
            self._counters.pq_operations += 1
        if not self.size:
            self.r_max, self.r_min = -1, self._m
        else:
            while not self.cells[self.r_max]:
                self.r_max -= 1
                self.marches += 1
        return r, item


class PriorityRangeTree:
    def __init__(self):
        self.root: Optional[PrtNode] = None
        self.n = 0
        self.W = 0
        self.switch_depth = 0
        self.bucket_max = 0.0
        self.depth_limit_constant = DEPTH_FACTOR
        self.max_rank = -1
        self.m = 0
        self.nodes: list[PrtNode] = []
        self.buckets: list[Bucket] = []
        self.heaps: dict[int, PersistentHeap] = {}
        self._pos_nodes: list[PrtNode] = []

    # -- build ------------------------------------------------------------------

    @classmethod
    def build(cls, points: Sequence[WeightedPoint]) -> "PriorityRangeTree":
        check_unique_ids(points)
        t = cls()
        n = len(points)
        t.n = n
        t.W = sum(p.w for p in points)
        if n == 0:
            return t
        t.switch_depth = (n.bit_length() - 1) // 2
        t.bucket_max = 2 * math.log2(n)
        t.max_rank = max(p.rank for p in points)
        t.m = t.max_rank + 1
        t.root = t._build_tree(sorted(points, key=lambda p: (p.x, p.id)))
        t._make_buckets()
        t._build_heaps()
        return t

    def _build_tree(self, ordered):
        nodes = self.nodes

        def rec(seq, depth):
            i = heaviest_index(seq)
            rest = seq[:i] + seq[i + 1:]
            if depth < self.switch_depth:
                strategy = Strategy.BY_WEIGHT
                cut = weight_split(rest)
            else:
                strategy = Strategy.BY_SIZE
                cut = complete_left_size(len(seq))
            a, b = rest[:cut], rest[cut:]
            node = PrtNode(len(nodes), seq[i], a[-1].x if a else float("-inf"), depth,
                           strategy, seq[0].x, seq[-1].x, len(seq))
            nodes.append(node)
            if a:
                node.left = rec(a, depth + 1)
            if b:
                node.right = rec(b, depth + 1)
            return node

        return rec(ordered, 0)

    def _make_buckets(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.strategy is Strategy.BY_SIZE and node.size <= self.bucket_max:
                members = list(_subtree(node))
                bucket = Bucket(node, [v.point for v in members], self.m)
                node.bucket = bucket
                for v in members:
                    v.in_bucket = bucket
                self.buckets.append(bucket)
            else:
                stack.extend(node.children())

    def _build_heaps(self):
        # heap positions: nodes outside buckets plus bucket roots (as leaves)
        pos_nodes = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            node.position = len(pos_nodes)
            pos_nodes.append(node)
            if node.bucket is None:
                stack.extend(node.children())
        self._pos_nodes = pos_nodes
        k = len(pos_nodes)
        left = [-1] * k
        right = [-1] * k
        for v in pos_nodes:
            if v.bucket is None:
                if v.left is not None:
                    left[v.position] = v.left.position
                if v.right is not None:
                    right[v.position] = v.right.position
        payloads = [v.bucket if v.bucket is not None else v.point for v in pos_nodes]
        ranks_present = sorted({p.rank for p in (v.point for v in self.nodes)})
        for r in ranks_present:
            keys = []
            for v in pos_nodes:
                if v.bucket is not None:
                    keys.append(v.bucket.chain_max(r))
                else:
                    keys.append(v.point.y if v.point.rank == r else BOTTOM)
            base = BaseTree(keys, payloads, left, right, 0)
            heap = build_persistent(base, require_complete=False, prune_bottom=True)
            self.heaps[r] = heap
            for pos, hroot in heap.version_roots.items():
                v = pos_nodes[pos]
                if v.bucket is None:
                    v.heap_versions[r] = hroot
        for v in pos_nodes:
            if v.bucket is None:
                v.catalog = MaximaCatalog(
                    [(r, h.key, (r, h)) for r, h in sorted(v.heap_versions.items())], self.m)

    # -- accounting -------------------------------------------------------------

    def space_nodes(self) -> int:
        """Allocated node census: tree nodes, heap nodes and catalog entries."""
        total = len(self.nodes)
        total += sum(h.allocated_nodes for h in self.heaps.values())
        total += sum(v.catalog.space() for v in self._pos_nodes if v.catalog is not None)
        total += sum(b.catalog.space() for b in self.buckets)
        return total

    def depth_of(self) -> dict[int, int]:
        return {v.point.id: v.depth for v in self.nodes}

    def height(self) -> int:
        return max((v.depth for v in self.nodes), default=-1)

    def _limit(self, rank: int) -> int:
        return max_depth_for_rank(self.W, rank, DEPTH_FACTOR, DEPTH_SLACK)

    # -- threshold --------------------------------------------------------------

    def threshold_query(self, rng: ThreeSidedRange, w: int,
                        counters: Optional[QueryCounters] = None) -> list[WeightedPoint]:
        """Points in ``rng`` with rank >= floor(log2 w), sorted by id."""
        c = counters if counters is not None else QueryCounters()
        c.reset()
        qr = rank_threshold(w)
        if self.root is None or qr > self.max_rank:
            return []
        limit = self._limit(qr)
        x1, x2, y = rng.x1, rng.x2, rng.y
        seen: set[int] = set()
        out: list[WeightedPoint] = []

        def emit(p):
            if p.id not in seen:
                seen.add(p.id)
                out.append(p)

        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.depth > limit or node.hi < x1 or node.lo > x2:
                continue
            if node.point.rank < qr:
                # weights are heap ordered, so nothing below can qualify
                continue
            if x1 <= node.lo and node.hi <= x2:
                self._report_inside(node, qr, y, emit, c)
                continue
            c.tree_nodes_visited += 1
            if node.bucket is not None:
                c.tree_nodes_visited += len(node.bucket.points)
                for p in node.bucket.points:
                    if x1 <= p.x <= x2 and p.y >= y and p.rank >= qr:
                        emit(p)
                continue
            p = node.point
            if x1 <= p.x <= x2 and p.y >= y and p.rank >= qr:
                emit(p)
            stack.extend(node.children())
        out.sort(key=lambda p: p.id)
        return out

    def _report_inside(self, node: PrtNode, qr: int, y: float, emit, c: QueryCounters):
        if node.bucket is not None:
            cat = node.bucket.catalog
            for r in cat.domination_query(qr, y, c):
                for p in cat.walk_same_rank(r, y, c):
                    emit(p)
            return
        pos_nodes = self._pos_nodes
        for r, hroot in node.catalog.domination_query(qr, y, c):
            for hn in iter_at_least(hroot, y, c):
                payload = hn.payload
                if isinstance(payload, Bucket):
                    for p in payload.catalog.walk_same_rank(r, y, c):
                        emit(p)
                else:
                    emit(payload)
                # the tree node under this heap slot is inside the x-range too
                q = pos_nodes[hn.position].point
                if q.y >= y and q.rank >= qr:
                    emit(q)

    # -- max reporting ----------------------------------------------------------

    def max_report(self, rng: ThreeSidedRange,
                   counters: Optional[QueryCounters] = None) -> Optional[WeightedPoint]:
        """One point of maximum rank inside ``rng``, or None."""
        c = counters if counters is not None else QueryCounters()
        c.reset()
        if self.root is None:
            return None
        x1, x2, y = rng.x1, rng.x2, rng.y
        below_y = math.nextafter(y, -math.inf)
        best: Optional[WeightedPoint] = None
        best_rank = -1
        limit = math.inf
        frontier = [self.root]
        while frontier and best_rank < self.max_rank:
            nxt = []
            for node in frontier:
                if node.depth > limit or node.hi < x1 or node.lo > x2:
                    continue
                if node.point.rank <= best_rank:
                    continue
                if x1 <= node.lo and node.hi <= x2:
                    cands = [self._subtree_max(node, below_y, c)]
                else:
                    c.tree_nodes_visited += 1
                    if node.bucket is not None:
                        c.tree_nodes_visited += len(node.bucket.points)
                        cands = [p for p in node.bucket.points if x1 <= p.x <= x2 and p.y >= y]
                    else:
                        cands = [node.point] if x1 <= node.point.x <= x2 and node.point.y >= y else []
                        nxt.extend(node.children())
                for p in cands:
                    if p is not None and p.rank > best_rank:
                        best, best_rank = p, p.rank
                        limit = self._limit(best_rank + 1)
            frontier = nxt
        return best

    def _subtree_max(self, node: PrtNode, below_y: float, c: QueryCounters) -> Optional[WeightedPoint]:
        if node.bucket is not None:
            pos = node.bucket.catalog.maximization_entry(below_y, c)
            if pos is None:
                return None
            return node.bucket.rank_chains[node.bucket.catalog.entry(pos).rank][0]
        pos = node.catalog.maximization_entry(below_y, c)
        if pos is None:
            return None
        r, hroot = node.catalog.entry(pos).origin
        payload = hroot.payload
        return payload.rank_chains[r][0] if isinstance(payload, Bucket) else payload

    # -- top-k ------------------------------------------------------------------

    def top_k(self, rng: ThreeSidedRange, k: int,
              counters: Optional[QueryCounters] = None) -> list[WeightedPoint]:
        """k highest-rank points inside ``rng`` (fewer if the range holds fewer)."""
        return top_k_search([(self, rng)], k, counters)

    # -- auditing ---------------------------------------------------------------

    def check_invariants(self, deep: bool = False) -> list[str]:
        """List of violated structural invariants; ``deep`` also audits every heap version."""
        problems = []
        if self.root is None:
            return problems
        W = self.W
        for v in self.nodes:
            p = v.point
            if not depth_within(v.depth, p.w, W, DEPTH_FACTOR, DEPTH_SLACK):
                problems.append(f"point {p.id} depth {v.depth} exceeds 3*log2(W/w)+3")
            if v.depth < self.switch_depth and not depth_within(v.depth, p.w, W):
                problems.append(f"point {p.id} depth {v.depth} exceeds log2(W/w) above switch depth")
            want = Strategy.BY_WEIGHT if v.depth < self.switch_depth else Strategy.BY_SIZE
            if v.strategy is not want:
                problems.append(f"node {v.id} has strategy {v.strategy.name} at depth {v.depth}")
            for ch in v.children():
                if ch.point.w > p.w:
                    problems.append(f"weight heap order broken under node {v.id}")
                if ch.depth != v.depth + 1:
                    problems.append(f"bad depth under node {v.id}")
            if (v.catalog is None) != (v.in_bucket is not None):
                problems.append(f"node {v.id}: catalog presence disagrees with bucket membership")
            if v.strategy is Strategy.BY_SIZE and (v.in_bucket is None or v.bucket is not None):
                if not _shape_complete(v):
                    problems.append(f"split-by-size subtree at node {v.id} is not complete")
        for b in self.buckets:
            if len(b.points) > self.bucket_max:
                problems.append(f"bucket at node {b.root.id} too large")
        if deep:
            problems.extend(self._audit_heaps())
        return problems

    def _audit_heaps(self) -> list[str]:
        problems = []
        for v in self._pos_nodes:
            if v.bucket is not None:
                continue
            want: dict[int, list[float]] = {}
            for u in _subtree(v):
                if u.bucket is not None:
                    for r, chain in u.bucket.rank_chains.items():
                        want.setdefault(r, []).append(chain[0].y)
                elif u.in_bucket is None:
                    want.setdefault(u.point.rank, []).append(u.point.y)
            got = {}
            for r, hroot in v.heap_versions.items():
                keys = []
                for hn in reachable(hroot):
                    keys.append(hn.key)
                    for ch in (hn.left, hn.right):
                        if ch is not None and ch.key > hn.key:
                            problems.append(f"heap order broken in rank {r} at node {v.id}")
                got[r] = sorted(keys)
            if got != {r: sorted(ks) for r, ks in want.items()}:
                problems.append(f"heap versions at node {v.id} disagree with subtree contents")
        return problems


def _subtree(node: PrtNode):
    stack = [node]
    while stack:
        v = stack.pop()
        yield v
        stack.extend(v.children())


def _shape_complete(node: PrtNode) -> bool:
    queue = [node]
    gap = False
    i = 0
    while i < len(queue):
        v = queue[i]
        i += 1
        for ch in (v.left, v.right):
            if ch is None:
                gap = True
            elif gap:
                return False
            else:
                queue.append(ch)
    return True


# -- top-k engine ---------------------------------------------------------------

_POINT, _CATALOG, _HEAP, _CHAIN = range(4)


class _Source:
    __slots__ = ("tree", "rng", "below_y", "frontier", "depth")

    def __init__(self, tree: PriorityRangeTree, rng: ThreeSidedRange):
        self.tree = tree
        self.rng = rng
        self.below_y = math.nextafter(rng.y, -math.inf)
        self.frontier = [tree.root] if tree.root is not None else []
        self.depth = 0


def top_k_search(sources: Sequence[tuple[PriorityRangeTree, ThreeSidedRange]], k: int,
                 counters: Optional[QueryCounters] = None,
                 queue_out: Optional[list] = None) -> list[WeightedPoint]:
    """Top-k over one or more trees searched in lockstep.

    All sources share one rank-indexed queue and one rank watermark, so no
    tree is searched below the depth at which a point could still outrank the
    current best candidate.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    c = counters if counters is not None else QueryCounters()
    c.reset()
    srcs = [_Source(t, r) for t, r in sources]
    m = max((s.tree.m for s in srcs), default=0)
    pq = RankPriorityQueue(max(m, 1), c)
    if queue_out is not None:
        queue_out.append(pq)
    seen: set[int] = set()
    marked: set = set()
    out: list[WeightedPoint] = []

    def push_catalog(src, cat, pos, bucket):
        key = (id(cat), pos)
        if key in marked:
            return
        marked.add(key)
        pq.insert(cat.entry(pos).rank, (_CATALOG, src, cat, pos, bucket))

    def explore(src: _Source):
        x1, x2, y = src.rng.x1, src.rng.x2, src.rng.y
        nxt = []
        for node in src.frontier:
            if node.hi < x1 or node.lo > x2:
                continue
            if x1 <= node.lo and node.hi <= x2:
                cat = node.bucket.catalog if node.bucket is not None else node.catalog
                pos = cat.maximization_entry(src.below_y, c)
                if pos is not None:
                    push_catalog(src, cat, pos, node.bucket)
                continue
            c.tree_nodes_visited += 1
            if node.bucket is not None:
                c.tree_nodes_visited += len(node.bucket.points)
                pts = node.bucket.points
            else:
                pts = (node.point,)
                nxt.extend(node.children())
            for p in pts:
                if x1 <= p.x <= x2 and p.y >= y and p.id not in seen:
                    pq.insert(p.rank, (_POINT, p))
        src.frontier = nxt
        src.depth += 1

    while len(out) < k:
        r_top = pq.max_rank()
        extended = False
        for src in srcs:
            if src.frontier and src.depth <= src.tree._limit(r_top + 1):
                explore(src)
                extended = True
        if extended:
            continue
        if not len(pq):
            break
        _, item = pq.extract_max()
        kind = item[0]
        if kind == _POINT:
            p = item[1]
            if p.id not in seen:
                seen.add(p.id)
                out.append(p)
        elif kind == _CATALOG:
            _, src, cat, pos, bucket = item
            cp = cat.entry(pos)
            pred = cat.predecessor(pos)
            if pred is not None:
                push_catalog(src, cat, pred, bucket)
            low = cat.below(pos, src.below_y)
            if low is not None:
                push_catalog(src, cat, low, bucket)
            c.catalog_entries_scanned += 3
            if bucket is not None:
                pq.insert(cp.rank, (_CHAIN, bucket.rank_chains[cp.rank], 0, src.rng.y))
            else:
                r, hroot = cp.origin
                pq.insert(r, (_HEAP, src, r, hroot))
        elif kind == _HEAP:
            _, src, r, hn = item
            c.heap_nodes_visited += 1
            y = src.rng.y
            payload = hn.payload
            if isinstance(payload, Bucket):
                pq.insert(r, (_CHAIN, payload.rank_chains[r], 0, y))
            elif payload.id not in seen:
                seen.add(payload.id)
                out.append(payload)
            q = src.tree._pos_nodes[hn.position].point
            if q.y >= y and q.id not in seen:
                pq.insert(q.rank, (_POINT, q))
            for ch in (hn.left, hn.right):
                if ch is not None:
                    c.heap_nodes_visited += 1
                    if ch.key >= y:
                        pq.insert(r, (_HEAP, src, r, ch))
        else:
            _, chain, i, y = item
            c.catalog_entries_scanned += 1
            p = chain[i]
            if p.id not in seen:
                seen.add(p.id)
                out.append(p)
            if i + 1 < len(chain) and chain[i + 1].y >= y:
                pq.insert(p.rank, (_CHAIN, chain, i + 1, y))
    return out
