"""Layers of maxima over (rank, y) pairs with fractional cascading.

Points live in Z_m x R with at most one point per rank.  Layer 0 is the set
of maxima (under weak dominance), layer 1 the maxima of what remains, and so
on; inside a layer ranks strictly increase while y strictly decreases.

Bottom-to-top cascading copies every other entry of each (augmented) layer
into the layer above, which gives an O(1) hop from a position in one layer to
the matching position in the next.  An m-slot array enters the top layer by
rank.  For maximization queries a y-sorted table of O(l) entries maps a query
value straight to its answer.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from .core import BuildError, QueryCounters, UnsupportedOperation


@dataclass(frozen=True, slots=True)
class CatalogPoint:
    rank: int
    y: float
    origin: Any = None
    copied: bool = False


class MaximaCatalog:
    """Static layers-of-maxima catalog.

    ``chains`` (rank -> y-descending list of items) turns on the same-rank
    walk used by buckets.
    """

    __slots__ = ("m", "layers", "_aug", "_bridge", "_next_orig", "top_entry",
                 "right_keys", "_right_answer", "_neg_ys", "_ranks", "chains", "_size")

    def __init__(self, points: Sequence[tuple], m: int, chains: Optional[dict] = None):
        pts = []
        seen = set()
        for t in points:
            rank, y = t[0], t[1]
            origin = t[2] if len(t) > 2 else None
            if not 0 <= rank < m:
                raise BuildError(f"rank {rank} outside [0, {m})")
            if rank in seen:
                raise BuildError(f"duplicate rank {rank} in catalog")
            seen.add(rank)
            pts.append(CatalogPoint(rank, y, origin))
        self.m = m
        self._size = len(pts)
        self.chains = chains
        self.layers = _peel(pts)
        self._build_cascade()
        self._build_right_entries()

    # -- construction -------------------------------------------------------

    def _build_cascade(self):
        h = len(self.layers)
        aug = [None] * h
        bridge = [None] * h
        nxt = [None] * h
        for L in range(h - 1, -1, -1):
            own = self.layers[L]
            if L == h - 1:
                merged = list(own)
            else:
                below = aug[L + 1]
                copies = [CatalogPoint(c.rank, c.y, c.origin, True) for c in below[0::2]]
                merged = sorted(own + copies, key=lambda c: c.rank)
                # first entry below with rank >= this entry's rank
                br = []
                j = 0
                for c in merged:
                    while j < len(below) and below[j].rank < c.rank:
                        j += 1
                    br.append(j)
                br.append(len(below))
                bridge[L] = br
            aug[L] = merged
            no = [len(merged)] * (len(merged) + 1)
            for i in range(len(merged) - 1, -1, -1):
                no[i] = i if not merged[i].copied else no[i + 1]
            nxt[L] = no
        self._aug = aug
        self._bridge = bridge
        self._next_orig = nxt
        top = aug[0] if h else []
        entry = []
        j = 0
        for r in range(self.m):
            while j < len(top) and top[j].rank < r:
                j += 1
            entry.append(j)
        self.top_entry = entry
        self._neg_ys = [[-c.y for c in layer] for layer in self.layers]
        self._ranks = [[c.rank for c in layer] for layer in self.layers]

    def _build_right_entries(self):
        keys = sorted({c.y for layer in self.layers for c in layer})
        top = self.layers[0] if self.layers else []
        answers = []
        # answer for keys[i]: last layer-0 index with y >= keys[i]
        j = len(top) - 1
        for k in keys:
            while j >= 0 and top[j].y < k:
                j -= 1
            answers.append(j)
        answers.append(-1)
        self.right_keys = keys
        self._right_answer = answers

    # -- queries --------------------------------------------------------------

    def __len__(self):
        return self._size

    def cascade_size(self) -> int:
        """Entries held by the cascaded layers plus the right-hand entry table."""
        return sum(len(a) for a in self._aug) + len(self.right_keys)

    def space(self) -> int:
        total = self.cascade_size() + self.m
        if self.chains is not None:
            total += sum(len(c) for c in self.chains.values())
        return total

    def domination_query(self, q_rank: int, q_y: float,
                         counters: Optional[QueryCounters] = None) -> list:
        """Origins of all points with rank >= q_rank and y >= q_y."""
        out = []
        if not self.layers or q_rank >= self.m:
            return out
        steps = 0
        pos = self.top_entry[max(q_rank, 0)]
        h = len(self.layers)
        for L in range(h):
            aug = self._aug[L]
            nxt = self._next_orig[L]
            j = nxt[pos]
            steps += 1
            matched = 0
            while j < len(aug) and aug[j].y >= q_y:
                out.append(aug[j].origin)
                matched += 1
                j = nxt[j + 1]
                steps += 1
            if not matched or L + 1 == h:
                break
            below = self._aug[L + 1]
            b = self._bridge[L][pos]
            while b > 0:
                steps += 1
                if below[b - 1].rank >= q_rank:
                    b -= 1
                else:
                    break
            pos = b
        if counters is not None:
            counters.catalog_entries_scanned += steps
        return out

    def maximization_entry(self, q_y: float, counters: Optional[QueryCounters] = None):
        """(0, index) of the max-rank point with y > q_y, or None."""
        i = bisect_right(self.right_keys, q_y)
        if counters is not None:
            counters.catalog_entries_scanned += 1
        j = self._right_answer[i]
        return None if j < 0 else (0, j)

    def maximization_query(self, q_y: float, counters: Optional[QueryCounters] = None):
        pos = self.maximization_entry(q_y, counters)
        return None if pos is None else self.layers[0][pos[1]].origin

    def entry(self, pos: tuple[int, int]) -> CatalogPoint:
        return self.layers[pos[0]][pos[1]]

    def predecessor(self, pos: tuple[int, int]) -> Optional[tuple[int, int]]:
        L, i = pos
        return (L, i - 1) if i > 0 else None

    def below(self, pos: tuple[int, int], q_y: float) -> Optional[tuple[int, int]]:
        """Max-rank entry of the next layer with y > q_y and rank below pos's rank."""
        L, i = pos
        if L + 1 >= len(self.layers):
            return None
        r = self.layers[L][i].rank
        a = bisect_left(self._neg_ys[L + 1], -q_y)
        b = bisect_left(self._ranks[L + 1], r)
        j = min(a, b) - 1
        return (L + 1, j) if j >= 0 else None

    def walk_same_rank(self, start, q_y: float,
                       counters: Optional[QueryCounters] = None) -> list:
        """Chain items sharing ``start``'s rank whose y is >= q_y, y-descending.

        ``start`` is a CatalogPoint or a rank.
        """
        if self.chains is None:
            raise UnsupportedOperation("catalog has no same-rank chains")
        rank = start.rank if isinstance(start, CatalogPoint) else start
        out = []
        for item in self.chains.get(rank, ()):
            if counters is not None:
                counters.catalog_entries_scanned += 1
            if item.y < q_y:
                break
            out.append(item)
        return out


def _peel(pts: list[CatalogPoint]) -> list[list[CatalogPoint]]:
    """Layers of maxima via a rank-descending sweep (O(l log l))."""
    layers: list[list[CatalogPoint]] = []
    tails: list[float] = []  # negated max y seen per layer; ascending
    for p in sorted(pts, key=lambda c: -c.rank):
        # first layer whose max y is below p.y does not dominate p
        k = bisect_right(tails, -p.y)
        if k == len(layers):
            layers.append([p])
            tails.append(-p.y)
        else:
            layers[k].append(p)
            tails[k] = -p.y
    for layer in layers:
        layer.reverse()
    return layers
