import json
import math

import numpy as np
import pytest

from simsmooth.cli import main, parse_dims, parse_subsets, UsageError
from simsmooth.io import dump_state
from simsmooth.operators import ClassicalState


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_subsets():
    assert parse_subsets("1;2;1,2") == ((0,), (1,), (0, 1))
    assert parse_subsets(" 2 , 1 ; 3 ") == ((0, 1), (2,))
    for bad in ("", "0", "1;;2", "a", "1,1"):
        with pytest.raises(UsageError):
            parse_subsets(bad)
    with pytest.raises(UsageError):
        parse_subsets("1;4", 3)


def test_parse_dims():
    assert parse_dims("2,3,2") == (2, 3, 2)
    for bad in ("", "2,0", "x"):
        with pytest.raises(UsageError):
            parse_dims(bad)


def test_smooth_classical_uniform(tmp_path, capsys):
    path = tmp_path / "p.json"
    dump_state(ClassicalState((2, 2), np.full((2, 2), 0.25)), path)
    code, out, _ = run(capsys, "smooth", "--input", str(path), "--subsets", "1", "--epsilon", "0.1")
    assert code == 0
    doc = json.loads(out)
    assert doc["smoother"] == "commuting"
    assert doc["report"]["distance_trace"] == pytest.approx(0.1)
    assert doc["report"]["entropy_pass"] and doc["report"]["distance_pass"]


def test_smooth_two_qutrits(capsys, tmp_path):
    out_path = tmp_path / "out.json"
    code, _, _ = run(
        capsys, "smooth", "--dims", "3,3", "--subsets", "1;2;1,2", "--epsilon", "0.05",
        "--seed", "3", "--out", str(out_path),
    )
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["smoother"] == "two-party"
    assert doc["report"]["distance_purified"] <= 3 * math.sqrt(0.1)
    assert doc["report"]["entropy_pass"]


def test_smooth_overlap_exits_one(capsys):
    code, _, err = run(capsys, "smooth", "--dims", "2,2,2", "--subsets", "1,2;2,3")
    assert code == 1
    assert "{A1,A2}" in err and "{A2,A3}" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["smooth", "--dims", "2,2"],
        ["smooth", "--subsets", "1"],
        ["smooth", "--dims", "2,2", "--subsets", "3"],
        ["smooth", "--dims", "2,2", "--subsets", "1", "--epsilon", "1.5"],
        ["smooth", "--input", "/nonexistent.json", "--subsets", "1"],
        ["verify", "nosuch"],
        ["worstcase", "--epsilon", "0.34"],
        ["worstcase", "--n-min", "1"],
        ["explore", "--dims", "2,2"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_malformed_input_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"dims": [2], "matrix": [[1, 0]]}')
    assert run(capsys, "smooth", "--input", str(path), "--subsets", "1")[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "theorem2", "--trials", "100", "--dims", "2,3,2", "--epsilon", "0.05"],
        ["verify", "lemma4", "--trials", "100"],
        ["verify", "lemma3", "--trials", "20"],
    ],
)
def test_verify_suites_pass(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert json.loads(out)["failures"] == 0


def test_verify_zero_epsilon(capsys):
    code, out, _ = run(capsys, "verify", "theorem4", "--epsilon", "0", "--trials", "20")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert all(r["distance_trace"] == 0 and r["distance_purified"] == 0 for r in rows)


def test_verify_csv_and_determinism(capsys, monkeypatch):
    argv = ["verify", "sandwich", "--trials", "30", "--seed", "4", "--format", "csv"]
    _, first, _ = run(capsys, *argv)
    monkeypatch.setenv("SIMSMOOTH_THREADS", "4")
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert first.splitlines()[0].startswith("trial,seed,passed")


def test_worstcase_single_line(capsys):
    code, out, _ = run(capsys, "worstcase", "--subsets", "1", "--epsilon", "0.2", "--n-max", "3")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["n"] for r in rows] == [2, 3]
    assert all(abs(r["d_star"] - 0.2) <= 1e-9 and r["claim_pass"] for r in rows)


def test_worstcase_csv(capsys, tmp_path):
    path = tmp_path / "wc.csv"
    code, _, _ = run(capsys, "worstcase", "--n-max", "3", "--format", "csv", "--out", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "n,d_iterative,d_star,bound,gap,claim_pass"
    assert len(lines) == 3


@pytest.mark.parametrize("kind", ["product", "classical"])
def test_explore_independent_kinds(capsys, kind):
    code, out, _ = run(capsys, "explore", "--kind", kind, "--trials", "20", "--seed", "1")
    assert code == 0
    summary = json.loads(out)
    assert summary["deficit_12"]["max"] <= 1e-9
    assert summary["deficit_23"]["max"] <= 1e-9


def test_explore_writes_deterministic_summary(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(capsys, "explore", "--trials", "25", "--seed", "9", "--format", "csv", "--out", str(path))
    assert a.read_text() == b.read_text()
    assert (tmp_path / "a.csv.summary.json").read_text() == (tmp_path / "b.csv.summary.json").read_text()
    summary = json.loads((tmp_path / "a.csv.summary.json").read_text())
    assert summary["trials"] == 25 and summary["deficit_12"]["max"] >= 0


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "1;2;1,2" in capsys.readouterr().out
