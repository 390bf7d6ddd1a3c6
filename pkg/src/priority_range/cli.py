"""Command line front end: gen, query, verify, bench.

Exit codes: 0 success, 1 verification mismatch, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from typing import Callable, Iterable, Optional, Sequence

from .core import (FourSidedRange, PriorityRangeError, QueryCounters, ThreeSidedRange,
                   WeightedPoint, contains)
from .gen import DISTRIBUTIONS, GeneratorSpec, generate
from .oracle import SuffixPstBaseline, oracle_max_rank, oracle_threshold, oracle_topk
from .prt import PriorityRangeTree
from .prt4 import FourSidedIndex
from .wbpst import WbPst

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

MODE_PARAMS = {
    "threshold3": ("x1", "x2", "y", "w"),
    "topk3": ("x1", "x2", "y", "k"),
    "max3": ("x1", "x2", "y"),
    "threshold4": ("a", "b", "c", "d", "w"),
    "topk4": ("a", "b", "c", "d", "k"),
}
INT_PARAMS = {"w", "k"}


class UsageError(PriorityRangeError):
    pass


# -- point files ----------------------------------------------------------------

def parse_points(lines: Iterable[str], source: str = "<points>") -> list[WeightedPoint]:
    """Parse "x y w" lines; '#' lines and blank lines are skipped, ids follow line order."""
    pts = []
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        fields = text.split()
        if len(fields) != 3:
            raise UsageError(f"{source}:{lineno}: expected 'x y w', got {len(fields)} fields")
        try:
            x, y, w = float(fields[0]), float(fields[1]), int(fields[2])
        except ValueError as exc:
            raise UsageError(f"{source}:{lineno}: {exc}") from None
        if w < 1:
            raise UsageError(f"{source}:{lineno}: weight must be >= 1")
        try:
            pts.append(WeightedPoint(len(pts), x, y, w))
        except ValueError as exc:
            raise UsageError(f"{source}:{lineno}: {exc}") from None
    return pts


def read_points(path: str) -> list[WeightedPoint]:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_points(fh, path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def format_points(points: Sequence[WeightedPoint], header: str = "") -> str:
    lines = [f"# {header}"] if header else []
    lines.append("# x y w")
    lines.extend(f"{p.x!r} {p.y!r} {p.w}" for p in points)
    return "\n".join(lines) + "\n"


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


# -- gen ------------------------------------------------------------------------

def cmd_gen(spec: GeneratorSpec, out: str) -> list[WeightedPoint]:
    pts = generate(spec)
    header = f"n={spec.n} distribution={spec.distribution} s={spec.s} seed={spec.seed}"
    _write(out, format_points(pts, header))
    return pts


# -- query ----------------------------------------------------------------------

def parse_params(mode: str, values: dict) -> dict:
    if mode not in MODE_PARAMS:
        raise UsageError(f"unknown mode {mode!r}")
    params = {}
    for name in MODE_PARAMS[mode]:
        raw = values.get(name)
        if raw is None:
            raise UsageError(f"mode {mode} needs --{name}")
        try:
            params[name] = int(raw) if name in INT_PARAMS else float(raw)
        except ValueError:
            raise UsageError(f"bad value for {name}: {raw!r}") from None
        if name in INT_PARAMS and params[name] < 1:
            raise UsageError(f"{name} must be >= 1")
    try:
        if mode.endswith("3"):
            params["range"] = ThreeSidedRange(params["x1"], params["x2"], params["y"])
        else:
            params["range"] = FourSidedRange(params["a"], params["b"], params["c"], params["d"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return params


def parse_batch_line(mode: str, line: str) -> dict:
    values = {}
    for tok in line.split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise UsageError(f"batch token {tok!r} is not key=value")
        values[key] = val
    return parse_params(mode, values)


class Indexes:
    """Lazily built structures over one point set."""

    def __init__(self, points: Sequence[WeightedPoint]):
        self.points = list(points)
        self._prt = None
        self._idx4 = None

    @property
    def prt(self) -> PriorityRangeTree:
        if self._prt is None:
            self._prt = PriorityRangeTree.build(self.points)
        return self._prt

    @property
    def idx4(self) -> FourSidedIndex:
        if self._idx4 is None:
            self._idx4 = FourSidedIndex.build(self.points)
        return self._idx4


def run_query(ix: Indexes, mode: str, params: dict) -> dict:
    rng = params["range"]
    counters = QueryCounters()
    start = time.perf_counter()
    if mode == "threshold3":
        found = ix.prt.threshold_query(rng, params["w"], counters)
    elif mode == "topk3":
        found = ix.prt.top_k(rng, params["k"], counters)
    elif mode == "max3":
        hit = ix.prt.max_report(rng, counters)
        found = [hit] if hit is not None else []
    elif mode == "threshold4":
        found = ix.idx4.threshold_query4(rng, params["w"], counters)
    else:
        found = ix.idx4.top_k4(rng, params["k"], counters)
    wall_us = (time.perf_counter() - start) * 1e6
    return {
        "mode": mode,
        "query": {k: v for k, v in params.items() if k != "range"},
        "ids": [p.id for p in found],
        "points": [[p.id, p.x, p.y, p.w, p.rank] for p in found],
        "counters": counters.as_dict(),
        "wall_us": round(wall_us, 1),
    }


def cmd_query(points_path: str, mode: str, queries: Sequence[dict]) -> list[dict]:
    ix = Indexes(read_points(points_path))
    return [run_query(ix, mode, q) for q in queries]


# -- verify ---------------------------------------------------------------------

def drop_bucket_point(tree: PriorityRangeTree) -> Optional[int]:
    """Test hook: silently lose one non-root bucket point from the same-rank chains."""
    for b in tree.buckets:
        for p in b.points:
            if p is not b.root.point:
                b.rank_chains[p.rank].remove(p)
                return p.id
    return None


def _random_interval(rnd: random.Random, lo: float, hi: float) -> tuple[float, float]:
    pad = (hi - lo) * 0.05 + 1e-9
    u, v = (rnd.uniform(lo - pad, hi + pad) for _ in range(2))
    return (u, v) if u <= v else (v, u)


def cmd_verify(points: Sequence[WeightedPoint], trials: int, seed: int,
               fault: Optional[Callable[[PriorityRangeTree], object]] = None) -> tuple[bool, list[str]]:
    """Cross-check every query mode against the oracle; returns (ok, report lines)."""
    if trials < 1:
        raise UsageError("trials must be >= 1")
    points = list(points)
    report = [f"verify: n={len(points)} trials={trials} seed={seed}"]
    ix = Indexes(points)
    problems = ix.prt.check_invariants(deep=len(points) <= 2048)
    problems += ix.idx4.check_invariants()
    problems += WbPst.build(points).check_invariants()
    for msg in problems:
        report.append(f"INVARIANT {msg}")
    if fault is not None:
        fault(ix.prt)

    rnd = random.Random(seed)
    if points:
        xs = [p.x for p in points]
        ys = [p.y for p in points]
        x_lo, x_hi, y_lo, y_hi = min(xs), max(xs), min(ys), max(ys)
        w_hi = max(p.w for p in points)
    else:
        x_lo = y_lo = 0.0
        x_hi = y_hi = 1.0
        w_hi = 1
    mismatches = 0
    for trial in range(trials):
        if trial == 0:
            x1, x2 = x_lo, x_hi
            c, d = y_lo, y_hi
            y, w, k = y_lo, 1, max(len(points), 1)
        else:
            x1, x2 = _random_interval(rnd, x_lo, x_hi)
            c, d = _random_interval(rnd, y_lo, y_hi)
            y = rnd.uniform(y_lo, y_hi)
            w = 1 + int(rnd.random() * 2 * w_hi)
            k = 1 + int(rnd.random() * 16)
        queries = [
            ("threshold3", {"x1": x1, "x2": x2, "y": y, "w": w}),
            ("topk3", {"x1": x1, "x2": x2, "y": y, "k": k}),
            ("max3", {"x1": x1, "x2": x2, "y": y}),
            ("threshold4", {"a": x1, "b": x2, "c": c, "d": d, "w": w}),
            ("topk4", {"a": x1, "b": x2, "c": c, "d": d, "k": k}),
        ]
        for mode, values in queries:
            params = parse_params(mode, values)
            try:
                ok = _agrees(points, mode, params, run_query(ix, mode, params)["ids"])
                note = ""
            except (PriorityRangeError, LookupError, AttributeError, TypeError) as exc:
                ok, note = False, f" error={type(exc).__name__}"
            if not ok:
                mismatches += 1
                args = " ".join(f"{name}={values[name]!r}" for name in MODE_PARAMS[mode])
                report.append(f"MISMATCH trial={trial} mode={mode} {args}{note}")
    ok = not mismatches and not problems
    report.append(f"result: {'PASS' if ok else 'FAIL'} "
                  f"({mismatches} mismatches, {len(problems)} invariant violations)")
    return ok, report


def _agrees(points, mode, params, ids) -> bool:
    by_id = {p.id: p for p in points}
    if len(set(ids)) != len(ids):
        return False
    got = [by_id[i] for i in ids]
    rng = params["range"]
    if mode.startswith("threshold"):
        return [p.id for p in oracle_threshold(points, rng, params["w"])] == sorted(ids)
    if mode == "max3":
        want = oracle_max_rank(points, rng)
        return (got[0].rank if got else None) == want and all(contains(rng, p) for p in got)
    want = oracle_topk(points, rng, params["k"])
    return (sorted(p.rank for p in got) == sorted(p.rank for p in want)
            and all(contains(rng, p) for p in got))


# -- bench ----------------------------------------------------------------------

BENCH_COLUMNS = ["structure", "n", "distribution", "build_ms", "space_nodes", "x1", "x2", "y", "w",
                 "result_size", "tree_nodes_visited", "catalog_entries_scanned",
                 "heap_nodes_visited", "pq_operations", "wall_us"]


def bench_rows(points: Sequence[WeightedPoint], distribution: str, structures: Sequence[str],
               queries: int, seed: int) -> list[dict]:
    rows = []
    n = len(points)
    rnd = random.Random(seed)
    qs = []
    for _ in range(queries):
        x1, x2 = sorted((rnd.random(), rnd.random()))
        y = rnd.random()
        w = points[int(rnd.random() * n)].w if n else 1
        qs.append((ThreeSidedRange(x1, x2, y), w))
    for name in structures:
        start = time.perf_counter()
        if name == "prt":
            s = PriorityRangeTree.build(points)
        elif name == "baseline":
            s = SuffixPstBaseline.build(points)
        else:
            raise UsageError(f"unknown structure {name!r}")
        build_ms = (time.perf_counter() - start) * 1e3
        space = s.space_nodes()
        for rng, w in qs:
            counters = QueryCounters()
            t0 = time.perf_counter()
            found = s.threshold_query(rng, w, counters)
            wall = (time.perf_counter() - t0) * 1e6
            rows.append({"structure": name, "n": n, "distribution": distribution,
                         "build_ms": round(build_ms, 3), "space_nodes": space,
                         "x1": rng.x1, "x2": rng.x2, "y": rng.y, "w": w,
                         "result_size": len(found), **counters.as_dict(),
                         "wall_us": round(wall, 1)})
    return rows


def cmd_bench(specs: Sequence[GeneratorSpec], structures: Sequence[str], out: str,
              queries: int = 16, points: Optional[Sequence[WeightedPoint]] = None) -> list[dict]:
    rows = []
    if points is not None:
        rows.extend(bench_rows(points, "file", structures, queries, 0))
    for spec in specs:
        rows.extend(bench_rows(generate(spec), spec.distribution, structures, queries, spec.seed))
    try:
        fh = sys.stdout if out == "-" else open(out, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None
    try:
        writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return rows


def space_series(rows: Sequence[dict]) -> dict[str, list[tuple[int, int]]]:
    """structure -> sorted (n, space_nodes) pairs."""
    series: dict[str, dict[int, int]] = {}
    for r in rows:
        series.setdefault(r["structure"], {})[r["n"]] = r["space_nodes"]
    return {k: sorted(v.items()) for k, v in series.items()}


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="priority-range",
                                 description="Prioritized orthogonal range reporting toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a synthetic point file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    g.add_argument("--s", type=float, default=1.0, help="zipf exponent")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--x-range", type=float, nargs=2, default=(0.0, 1.0), metavar=("LO", "HI"))
    g.add_argument("--y-range", type=float, nargs=2, default=(0.0, 1.0), metavar=("LO", "HI"))
    g.add_argument("--out", required=True, help="output path, '-' for stdout")

    q = sub.add_parser("query", help="run queries against a point file")
    q.add_argument("--points", required=True)
    q.add_argument("--mode", choices=list(MODE_PARAMS), required=True)
    for name in ("x1", "x2", "y", "a", "b", "c", "d", "w", "k"):
        q.add_argument(f"--{name}")
    q.add_argument("--batch", help="file with one 'key=value ...' query per line")
    q.add_argument("--out", default="-")

    v = sub.add_parser("verify", help="cross-check the indexes against brute force")
    v.add_argument("--points", required=True)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    b = sub.add_parser("bench", help="space and query-cost benchmark, CSV output")
    b.add_argument("--points", help="benchmark a point file instead of generated sets")
    b.add_argument("--dist", choices=DISTRIBUTIONS, default="zipf")
    b.add_argument("--s", type=float, default=1.0)
    b.add_argument("--n-min", type=int, default=1 << 10)
    b.add_argument("--n-max", type=int, default=1 << 14)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--structures", default="prt,baseline")
    b.add_argument("--queries", type=int, default=16)
    b.add_argument("--out", required=True)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except (UsageError, ValueError) as exc:
        print(f"priority-range: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    if args.command == "gen":
        spec = GeneratorSpec(args.n, args.dist, args.seed, args.s,
                             tuple(args.x_range), tuple(args.y_range))
        cmd_gen(spec, args.out)
        return EXIT_OK

    if args.command == "query":
        if args.batch:
            try:
                with open(args.batch, encoding="utf-8") as fh:
                    lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
            except OSError as exc:
                raise UsageError(f"cannot read {args.batch}: {exc.strerror}") from None
            queries = [parse_batch_line(args.mode, ln) for ln in lines]
        else:
            values = {name: getattr(args, name) for name in MODE_PARAMS[args.mode]}
            queries = [parse_params(args.mode, values)]
        records = cmd_query(args.points, args.mode, queries)
        _write(args.out, "".join(json.dumps(r, sort_keys=True) + "\n" for r in records))
        return EXIT_OK

    if args.command == "verify":
        fault = drop_bucket_point if args.inject_fault else None
        ok, report = cmd_verify(read_points(args.points), args.trials, args.seed, fault)
        print("\n".join(report))
        return EXIT_OK if ok else EXIT_MISMATCH

    structures = [s.strip() for s in args.structures.split(",") if s.strip()]
    points = read_points(args.points) if args.points else None
    specs = []
    if points is None:
        n = args.n_min
        while n <= args.n_max:
            specs.append(GeneratorSpec(n, args.dist, args.seed, args.s))
            n *= 2
    rows = cmd_bench(specs, structures, args.out, args.queries, points)
    for name, series in space_series(rows).items():
        for n, space in series:
            print(f"{name} n={n} space_nodes={space} per_point={space / max(n, 1):.3f}",
                  file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
