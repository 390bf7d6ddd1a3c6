"""Persistent heaps built by a node-copying BuildHeap.

BuildHeap runs bottom-up over a binary base tree.  Instead of swapping keys in
place, every sift-down step allocates fresh nodes that link to the heaps of the
previous stage, so each base-tree node keeps its own version: a max-heap over
exactly the keys in its subtree.  The base tree is never modified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Sequence

from .core import BuildError, QueryCounters

BOTTOM = float("-inf")
"""Key for dummy entries; lower than every finite y."""


class PersistentHeapNode:
    __slots__ = ("key", "payload", "position", "left", "right")

    def __init__(self, key, payload, position, left, right):
        self.key = key
        self.payload = payload
        self.position = position  # base-tree node this heap slot sits on
        self.left = left
        self.right = right

    def __repr__(self):
        return f"PersistentHeapNode(key={self.key!r}, payload={self.payload!r}, position={self.position})"


@dataclass
class BaseTree:
    """Array-backed binary tree; child indices are -1 when absent."""

    keys: list
    payloads: list
    left: list[int]
    right: list[int]
    root: int = 0

    def __len__(self):
        return len(self.keys)

    @classmethod
    def complete(cls, keys: Sequence[float], payloads: Optional[Sequence[Any]] = None) -> "BaseTree":
        """Complete tree in the usual array layout (children of i at 2i+1, 2i+2)."""
        n = len(keys)
        if payloads is None:
            payloads = list(range(n))
        left = [2 * i + 1 if 2 * i + 1 < n else -1 for i in range(n)]
        right = [2 * i + 2 if 2 * i + 2 < n else -1 for i in range(n)]
        return cls(list(keys), list(payloads), left, right, 0 if n else -1)

    def is_complete(self) -> bool:
        if self.root < 0:
            return True
        # BFS; once a gap is seen no further node may appear
        queue = [self.root]
        gap = False
        i = 0
        while i < len(queue):
            v = queue[i]
            i += 1
            for c in (self.left[v], self.right[v]):
                if c < 0:
                    gap = True
                elif gap:
                    return False
                else:
                    queue.append(c)
        return True

    def postorder(self) -> list[int]:
        if self.root < 0:
            return []
        order, stack = [], [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            if self.left[v] >= 0:
                stack.append(self.left[v])
            if self.right[v] >= 0:
                stack.append(self.right[v])
        order.reverse()
        return order

    def subtree(self, v: int) -> list[int]:
        out, stack = [], [v]
        while stack:
            u = stack.pop()
            out.append(u)
            for c in (self.left[u], self.right[u]):
                if c >= 0:
                    stack.append(c)
        return out


@dataclass
class PersistentHeap:
    version_roots: dict[int, PersistentHeapNode] = field(default_factory=dict)
    allocated_nodes: int = 0

    def root(self, v: int) -> Optional[PersistentHeapNode]:
        return self.version_roots.get(v)


def sift_copy(key, payload, position, left, right, heap: PersistentHeap, prune_bottom: bool):
    """Sift (key, payload) down into the heaps ``left``/``right`` by copying.

    Equal keys do not swap.  With ``prune_bottom`` a dummy that sinks to a
    childless slot is dropped instead of being materialized.
    """
    if right is None or (left is not None and left.key >= right.key):
        big = left
    else:
        big = right
    if big is None or big.key <= key:
        if prune_bottom and payload is None and big is None:
            return None
        heap.allocated_nodes += 1
        return PersistentHeapNode(key, payload, position, left, right)
    below = sift_copy(key, payload, big.position, big.left, big.right, heap, prune_bottom)
    heap.allocated_nodes += 1
    if big is left:
        return PersistentHeapNode(big.key, big.payload, position, below, right)
    return PersistentHeapNode(big.key, big.payload, position, left, below)


def build_persistent(base: BaseTree, *, require_complete: bool = True,
                     prune_bottom: bool = False) -> PersistentHeap:
    """Run node-copying BuildHeap over ``base``; one version root per base node.

    Dummy entries carry ``payload=None`` and key ``BOTTOM``.  When
    ``prune_bottom`` is set they are never materialized, so a subtree holding
    only dummies has no version root.
    """
    if require_complete and not base.is_complete():
        raise BuildError("persistent heap base tree must be complete")
    heap = PersistentHeap()
    roots = heap.version_roots
    for v in base.postorder():
        lc, rc = base.left[v], base.right[v]
        lv = roots.get(lc) if lc >= 0 else None
        rv = roots.get(rc) if rc >= 0 else None
        key = base.keys[v]
        payload = base.payloads[v] if key != BOTTOM else None
        node = sift_copy(key, payload, v, lv, rv, heap, prune_bottom)
        if node is not None:
            roots[v] = node
    return heap


def iter_at_least(root: Optional[PersistentHeapNode], y: float,
                  counters: Optional[QueryCounters] = None) -> Iterator[PersistentHeapNode]:
    """Yield heap nodes with key >= y, top-down, pruning below failing keys."""
    if root is None:
        return
    stack = [root]
    while stack:
        node = stack.pop()
        if counters is not None:
            counters.heap_nodes_visited += 1
        if node.key < y or node.key == BOTTOM:
            continue
        yield node
        if node.right is not None:
            stack.append(node.right)
        if node.left is not None:
            stack.append(node.left)


def descend_report(h: PersistentHeap, v: int, y: float, limit: Optional[int] = None,
                   counters: Optional[QueryCounters] = None) -> list:
    """Payloads of the nodes in version ``v`` whose key is >= y."""
    out = []
    if limit is not None and limit <= 0:
        return out
    for node in iter_at_least(h.root(v), y, counters):
        if node.payload is None:
            continue
        out.append(node.payload)
        if limit is not None and len(out) >= limit:
            break
    return out


def reachable(root: Optional[PersistentHeapNode]) -> Iterator[PersistentHeapNode]:
    stack = [root] if root is not None else []
    while stack:
        node = stack.pop()
        yield node
        for c in (node.left, node.right):
            if c is not None:
                stack.append(c)
