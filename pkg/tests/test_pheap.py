import copy
import random

import pytest
from hypothesis import given, settings, strategies as st

from priority_range.core import BuildError
from priority_range.pheap import (BOTTOM, BaseTree, build_persistent, descend_report,
                                  iter_at_least, reachable)


def version_ok(base, heap, v):
    keys = sorted(base.keys[u] for u in base.subtree(v))
    nodes = list(reachable(heap.root(v)))
    for node in nodes:
        for child in (node.left, node.right):
            if child is not None and child.key > node.key:
                return False
    return sorted(n.key for n in nodes) == keys


def test_single_node():
    base = BaseTree.complete([5])
    h = build_persistent(base)
    assert h.root(0).key == 5 and h.allocated_nodes <= 1


def test_three_nodes_by_hand():
    base = BaseTree.complete([1, 9, 4])
    before = copy.deepcopy(base)
    h = build_persistent(base)
    assert h.root(0).key == 9
    assert h.root(1).key == 9 and h.root(2).key == 4
    assert base == before
    # the root's version keeps 1 under 9, the old leaf version is untouched
    assert sorted(n.key for n in reachable(h.root(0))) == [1, 4, 9]
    assert [n.key for n in reachable(h.root(1))] == [9]


def test_seven_nodes_roots_are_subtree_maxima():
    rnd = random.Random(11)
    base = BaseTree.complete([rnd.random() for _ in range(7)])
    h = build_persistent(base)
    for v in range(7):
        assert h.root(v).key == max(base.keys[u] for u in base.subtree(v))
        assert version_ok(base, h, v)


def test_descend_report_examples():
    h = build_persistent(BaseTree.complete([4, 9, 7], ["a", "b", "c"]))
    assert sorted(descend_report(h, 0, 5)) == ["b", "c"]
    assert descend_report(h, 0, 0, limit=1) == ["b"]
    dummy = build_persistent(BaseTree.complete([BOTTOM]))
    assert descend_report(dummy, 0, float("-inf")) == []


def test_non_complete_rejected():
    base = BaseTree([1, 2, 3], [0, 1, 2], [-1, -1, -1], [1, 2, -1], 0)
    with pytest.raises(BuildError):
        build_persistent(base)
    assert build_persistent(base, require_complete=False).root(0).key == 3


def test_prune_bottom_drops_dummies():
    base = BaseTree.complete([BOTTOM, 3, BOTTOM, BOTTOM, BOTTOM])
    h = build_persistent(base, prune_bottom=True)
    assert [n.key for n in reachable(h.root(0))] == [3]
    assert h.root(2) is None


def test_iter_at_least_prunes():
    h = build_persistent(BaseTree.complete(list(range(63, 0, -1))))
    seen = [n.key for n in iter_at_least(h.root(0), 60)]
    assert sorted(seen) == [60, 61, 62, 63]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=100))
def test_versions_with_duplicate_keys(keys):
    base = BaseTree.complete(keys)
    before = copy.deepcopy(base)
    h = build_persistent(base)
    assert all(version_ok(base, h, v) for v in range(len(keys)))
    assert h.allocated_nodes <= 4 * len(keys)
    assert base == before
