import random

import pytest

from priority_range import WeightedPoint

CANON = [(1, 5, 16), (2, 9, 2), (3, 4, 8), (4, 7, 1), (5, 1, 32), (6, 6, 4)]


def canonical_points():
    """p1..p6 get ids 0..5."""
    return [WeightedPoint(i, float(x), float(y), w) for i, (x, y, w) in enumerate(CANON)]


@pytest.fixture
def canon():
    return canonical_points()


def random_points(rnd: random.Random, n: int, max_w: int = 1000, grid: int = 0):
    """Random points; a nonzero ``grid`` snaps coordinates to force ties."""
    pts = []
    for i in range(n):
        if grid:
            x, y = float(rnd.randrange(grid)), float(rnd.randrange(grid))
        else:
            x, y = rnd.random(), rnd.random()
        pts.append(WeightedPoint(i, x, y, rnd.randint(1, max_w)))
    return pts


CRITERIA = {
    1: "oracle equivalence, three-sided",
    2: "oracle equivalence, four-sided",
    3: "depth invariants",
    4: "space linearity",
    5: "query-cost scaling",
    6: "persistent heap suite",
    7: "layers-of-maxima suite",
    8: "duplicate suppression",
    9: "determinism",
}


def _criterion_of(nodeid):
    name = nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in nodeid or not name.startswith("test_criterion_"):
        return None
    return int(name.split("_")[2])


def pytest_terminal_summary(terminalreporter):
    outcome: dict[int, list[str]] = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", "call") != "call" and key == "passed":
                continue
            crit = _criterion_of(getattr(rep, "nodeid", ""))
            if crit is not None:
                outcome.setdefault(crit, []).append(key)
    if not outcome:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(outcome):
        ok = all(k == "passed" for k in outcome[crit])
        terminalreporter.write_line(
            f"criterion {crit} ({CRITERIA[crit]}): {'PASS' if ok else 'FAIL'}")
