import random

import pytest
from hypothesis import given, settings, strategies as st

from priority_range.core import BuildError, QueryCounters, UnsupportedOperation, WeightedPoint
from priority_range.maxima import MaximaCatalog
from priority_range.oracle import oracle_layers

INF = float("inf")
SAMPLE = [(0, 7, "a"), (1, 9, "b"), (3, 4, "c"), (5, 1, "d")]


def pairs(cat):
    return [[(c.rank, c.y) for c in layer] for layer in cat.layers]


def test_layers_example():
    cat = MaximaCatalog(SAMPLE, 6)
    assert pairs(cat) == [[(1, 9), (3, 4), (5, 1)], [(0, 7)]]
    assert pairs(cat) == oracle_layers(SAMPLE)


def test_single_and_chain():
    assert pairs(MaximaCatalog([(2, 1.0)], 4)) == [[(2, 1.0)]]
    chain = MaximaCatalog([(0, 1), (1, 2), (2, 3)], 3)
    assert pairs(chain) == [[(2, 3)], [(1, 2)], [(0, 1)]]


def test_bad_ranks_rejected():
    with pytest.raises(BuildError):
        MaximaCatalog([(1, 1), (1, 2)], 4)
    with pytest.raises(BuildError):
        MaximaCatalog([(4, 1)], 4)


def test_domination_examples():
    cat = MaximaCatalog(SAMPLE, 6)
    assert cat.domination_query(2, 3) == ["c"]
    assert sorted(cat.domination_query(0, -INF)) == ["a", "b", "c", "d"]
    assert cat.domination_query(6, 0) == []


def test_maximization_examples():
    cat = MaximaCatalog(SAMPLE, 6)
    assert cat.maximization_query(5) == "b"
    assert cat.maximization_query(9) is None
    assert cat.maximization_query(-INF) == "d"
    # strict: y equal to the threshold does not count
    assert cat.maximization_query(4) == "b"


def test_top_entry_has_m_slots_for_sparse_ranks():
    cat = MaximaCatalog([(3, 1.0)], 40)
    assert len(cat.top_entry) == 40
    assert cat.domination_query(39, -INF) == []
    assert cat.domination_query(2, -INF) == [None]


def chain_catalog(ys):
    pts = [WeightedPoint(i, 0.0, y, 2) for i, y in enumerate(ys)]
    return MaximaCatalog([(1, ys[0], 1)], 2, chains={1: pts})


def test_walk_same_rank_examples():
    cat = chain_catalog([8, 6, 2])
    assert [p.y for p in cat.walk_same_rank(1, 3)] == [8, 6]
    assert cat.walk_same_rank(1, 9) == []
    assert [p.y for p in chain_catalog([5]).walk_same_rank(1, -INF)] == [5]
    start = cat.layers[0][0]
    assert len(cat.walk_same_rank(start, -INF)) == 3


def test_walk_requires_chains():
    with pytest.raises(UnsupportedOperation):
        MaximaCatalog(SAMPLE, 6).walk_same_rank(1, 0)


def test_navigation_helpers():
    cat = MaximaCatalog(SAMPLE, 6)
    top = cat.maximization_entry(-INF)
    assert cat.entry(top).rank == 5
    assert cat.entry(cat.predecessor(top)).rank == 3
    assert cat.predecessor((0, 0)) is None
    # below (1,9) in layer 1 is (0,7)
    assert cat.entry(cat.below((0, 0), 0)).rank == 0
    assert cat.below((0, 0), 7) is None


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_random_catalogs_against_brute_force(data):
    m = data.draw(st.integers(1, 64))
    ranks = data.draw(st.lists(st.integers(0, m - 1), unique=True, max_size=m))
    ys = data.draw(st.lists(st.integers(0, 12), min_size=len(ranks), max_size=len(ranks)))
    pts = [(r, float(y), i) for i, (r, y) in enumerate(zip(ranks, ys))]
    cat = MaximaCatalog(pts, m)
    assert pairs(cat) == oracle_layers(pts)
    assert cat.cascade_size() <= 4 * len(pts)
    for _ in range(20):
        qr = data.draw(st.integers(0, m))
        qy = float(data.draw(st.integers(-1, 13)))
        c = QueryCounters()
        got = cat.domination_query(qr, qy, c)
        want = [i for r, y, i in pts if r >= qr and y >= qy]
        assert sorted(got) == sorted(want)
        assert c.catalog_entries_scanned <= 6 * (len(want) + 1)
        hits = [(r, i) for r, y, i in pts if y > qy]
        assert cat.maximization_query(qy) == (max(hits)[1] if hits else None)
