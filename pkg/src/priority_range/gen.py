"""Deterministic synthetic point sets.

* ``uniform``: weights uniform in [1, n].
* ``exp-freq``: rank r drawn with probability proportional to 2**-r for
  r <= floor(log2 n), then a weight uniform in [2**r, 2**(r+1)).
* ``zipf``: rank r drawn with probability proportional to (r + 1)**-s for
  r <= floor(log2 n), weight uniform inside the rank's interval.

Coordinates are uniform in the configured boxes.  Only ``random.Random.random``
is used, so output is stable across Python versions.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
import random

from .core import WeightedPoint

DISTRIBUTIONS = ("uniform", "exp-freq", "zipf")


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    distribution: str = "uniform"
    seed: int = 0
    s: float = 1.0
    x_range: tuple[float, float] = (0.0, 1.0)
    y_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}; "
                             f"expected one of {', '.join(DISTRIBUTIONS)}")
        if self.n < 0:
            raise ValueError("n must be non-negative")


def rank_cap(n: int) -> int:
    return max(n, 1).bit_length() - 1


def rank_probabilities(spec: GeneratorSpec) -> list[float]:
    top = rank_cap(spec.n)
    if spec.distribution == "exp-freq":
        raw = [2.0 ** -r for r in range(top + 1)]
    elif spec.distribution == "zipf":
        raw = [(r + 1) ** -spec.s for r in range(top + 1)]
    else:
        raise ValueError("rank probabilities are defined for exp-freq and zipf only")
    total = sum(raw)
    return [v / total for v in raw]


def _uniform_int(rng: random.Random, lo: int, hi: int) -> int:
    """Integer uniform in [lo, hi]."""
    return min(hi, lo + int(rng.random() * (hi - lo + 1)))


def generate(spec: GeneratorSpec) -> list[WeightedPoint]:
    rng = random.Random(spec.seed)
    n = spec.n
    x0, x1 = spec.x_range
    y0, y1 = spec.y_range
    if spec.distribution != "uniform":
        cdf = list(accumulate(rank_probabilities(spec)))
    pts = []
    for i in range(n):
        x = x0 + (x1 - x0) * rng.random()
        y = y0 + (y1 - y0) * rng.random()
        if spec.distribution == "uniform":
            w = _uniform_int(rng, 1, max(n, 1))
        else:
            r = min(bisect_right(cdf, rng.random() * cdf[-1]), len(cdf) - 1)
            w = _uniform_int(rng, 1 << r, (1 << (r + 1)) - 1)
        pts.append(WeightedPoint(i, x, y, w))
    return pts
