import csv
import json
import subprocess
import sys

import pytest

from priority_range import cli
from priority_range.cli import (EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, UsageError, cmd_verify,
                                drop_bucket_point, main, parse_points)

from conftest import CANON, canonical_points


@pytest.fixture
def canon_file(tmp_path):
    path = tmp_path / "canon.txt"
    path.write_text("# six points\n" + "".join(f"{x} {y} {w}\n" for x, y, w in CANON))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(text):
    return [json.loads(line) for line in text.splitlines()]


def test_parse_points_errors_carry_line_numbers():
    assert len(parse_points(["# c", "", "1 2 3"])) == 1
    for bad, where in [(["1 2 3", "1 2"], ":2:"), (["1 2 0"], ":1:"), (["a 2 3"], ":1:"),
                       (["1 2 2.5"], ":1:"), (["1 nan 1"], ":1:")]:
        with pytest.raises(UsageError, match=where):
            parse_points(bad)


def test_gen_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        assert run(capsys, "gen", "--n", "8", "--seed", "7", "--out", str(path))[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    pts = cli.read_points(str(a))
    assert len(pts) == 8


def test_gen_round_trips_floats(tmp_path, capsys):
    path = tmp_path / "z.txt"
    run(capsys, "gen", "--n", "100", "--dist", "zipf", "--out", str(path))
    from priority_range.gen import GeneratorSpec, generate
    assert cli.read_points(str(path)) == generate(GeneratorSpec(100, "zipf"))


def test_gen_bad_path(capsys):
    code, _, err = run(capsys, "gen", "--n", "3", "--out", "/nonexistent/dir/x.txt")
    assert code == EXIT_USAGE and "cannot write" in err


def test_query_threshold3(canon_file, capsys):
    code, out, _ = run(capsys, "query", "--points", canon_file, "--mode", "threshold3",
                       "--x1", "2", "--x2", "6", "--y", "3", "--w", "4")
    assert code == EXIT_OK
    (rec,) = records(out)
    assert rec["ids"] == [2, 5]
    assert rec["points"][0] == [2, 3.0, 4.0, 8, 3]
    assert set(rec["counters"]) >= {"tree_nodes_visited", "heap_nodes_visited"}
    assert rec["wall_us"] >= 0


def test_query_topk_and_max(canon_file, capsys):
    _, out, _ = run(capsys, "query", "--points", canon_file, "--mode", "topk3",
                    "--x1", "1", "--x2", "6", "--y", "0", "--k", "2")
    assert [p[4] for p in records(out)[0]["points"]] == [5, 4]
    _, out, _ = run(capsys, "query", "--points", canon_file, "--mode", "max3",
                    "--x1", "2", "--x2", "4", "--y", "5")
    assert records(out)[0]["ids"] == [1]


def test_query_four_sided_empty_box(canon_file, capsys):
    _, out, _ = run(capsys, "query", "--points", canon_file, "--mode", "threshold4",
                    "--a", "10", "--b", "20", "--c", "0", "--d", "1", "--w", "1")
    assert records(out)[0]["ids"] == []


def test_query_batch(canon_file, tmp_path, capsys):
    batch = tmp_path / "q.txt"
    batch.write_text("# two queries\na=1 b=6 c=0 d=9 k=2\na=2 b=4 c=5 d=9 k=1\n")
    _, out, _ = run(capsys, "query", "--points", canon_file, "--mode", "topk4",
                    "--batch", str(batch))
    assert [r["ids"] for r in records(out)] == [[4, 0], [1]]


@pytest.mark.parametrize("params", [
    ["--x1", "1", "--x2", "6", "--y", "0", "--k", "0"],
    ["--x1", "1"],
    ["--x1", "1", "--x2", "6", "--y", "0", "--k", "two"],
    ["--x1", "6", "--x2", "1", "--y", "0", "--k", "1"],
])
def test_query_usage_errors(canon_file, capsys, params):
    code, _, err = run(capsys, "query", "--points", canon_file, "--mode", "topk3", *params)
    assert code == EXIT_USAGE and "error" in err


def test_query_w_zero(canon_file, capsys):
    code, _, _ = run(capsys, "query", "--points", canon_file, "--mode", "threshold3",
                     "--x1", "1", "--x2", "2", "--y", "0", "--w", "0")
    assert code == EXIT_USAGE


def test_query_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n1 x 3\n")
    code, _, err = run(capsys, "query", "--points", str(bad), "--mode", "max3",
                       "--x1", "0", "--x2", "1", "--y", "0")
    assert code == EXIT_USAGE and "bad.txt:2" in err


def test_verify_passes_and_is_repeatable(canon_file, capsys):
    first = run(capsys, "verify", "--points", canon_file, "--trials", "100")
    second = run(capsys, "verify", "--points", canon_file, "--trials", "100")
    assert first[0] == EXIT_OK and first == second
    assert "PASS" in first[1]


def test_verify_single_point(tmp_path, capsys):
    one = tmp_path / "one.txt"
    one.write_text("0.5 0.5 3\n")
    assert run(capsys, "verify", "--points", str(one), "--trials", "20")[0] == EXIT_OK


def test_verify_catches_injected_fault(canon_file, capsys):
    code, out, _ = run(capsys, "verify", "--points", canon_file, "--trials", "3", "--inject-fault")
    assert code == EXIT_MISMATCH
    assert "MISMATCH trial=0" in out and "FAIL" in out


def test_verify_hook_and_reproduction_line():
    pts = canonical_points()
    ok, report = cmd_verify(pts, 2, 0, fault=drop_bucket_point)
    assert not ok
    line = next(r for r in report if r.startswith("MISMATCH"))
    assert "mode=" in line and "x1=" in line
    with pytest.raises(UsageError):
        cmd_verify(pts, 0, 0)


def test_bench_csv(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, err = run(capsys, "bench", "--n-min", "64", "--n-max", "256", "--queries", "3",
                       "--dist", "exp-freq", "--out", str(out))
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert set(rows[0]) == set(cli.BENCH_COLUMNS)
    assert {(r["structure"], r["n"]) for r in rows} == {
        (s, str(n)) for s in ("prt", "baseline") for n in (64, 128, 256)}
    assert "per_point" in err


def test_bench_from_file(canon_file, tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--points", canon_file, "--structures", "prt",
                     "--queries", "2", "--out", str(out))
    rows = list(csv.DictReader(out.open()))
    assert code == EXIT_OK and len(rows) == 2 and rows[0]["n"] == "6"


def test_bench_unknown_structure(tmp_path, capsys):
    code, _, _ = run(capsys, "bench", "--n-min", "8", "--n-max", "8", "--structures", "kd",
                     "--out", str(tmp_path / "x.csv"))
    assert code == EXIT_USAGE


def test_argparse_usage_exit_code():
    proc = subprocess.run([sys.executable, "-m", "priority_range", "query"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
