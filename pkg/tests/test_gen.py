import math
from collections import Counter

import pytest

from priority_range.gen import GeneratorSpec, generate, rank_cap, rank_probabilities


def test_deterministic():
    spec = GeneratorSpec(50, "zipf", seed=7)
    assert generate(spec) == generate(spec)
    assert generate(spec) != generate(GeneratorSpec(50, "zipf", seed=8))


def test_bad_distribution():
    with pytest.raises(ValueError):
        GeneratorSpec(5, "pareto")


def test_ranges_respected():
    pts = generate(GeneratorSpec(200, "uniform", 1, x_range=(-5, -4), y_range=(10, 20)))
    assert all(-5 <= p.x <= -4 and 10 <= p.y <= 20 and 1 <= p.w <= 200 for p in pts)
    assert [p.id for p in pts] == list(range(200))


def test_exp_freq_counts_within_three_sigma():
    n = 1024
    pts = generate(GeneratorSpec(n, "exp-freq", seed=3))
    counts = Counter(p.rank for p in pts)
    probs = rank_probabilities(GeneratorSpec(n, "exp-freq"))
    assert len(probs) == rank_cap(n) + 1 == 11
    for r, q in enumerate(probs):
        # q is 2^-(r+1) up to the truncation normalizer
        sigma = math.sqrt(n * q * (1 - q))
        assert abs(counts[r] - n * q) <= 3 * sigma + 1e-9


def test_zipf_slope():
    n = 1024
    pts = generate(GeneratorSpec(n, "zipf", seed=3, s=1.0))
    counts = Counter(p.rank for p in pts)
    xs = [math.log(r + 1) for r in sorted(counts)]
    ys = [math.log(counts[r]) for r in sorted(counts)]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    assert abs(slope + 1) <= 0.2
