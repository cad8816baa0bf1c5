"""Command-line front end: subcommands, determinism, error codes."""

import json

import pytest

from cmvdyn.cli import main


def run(args, tmp_path, name):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def test_simulate_runs_and_is_deterministic(tmp_path):
    args = ["simulate", "--preset", "rotation", "--K", "12"]
    code1, text1 = run(args, tmp_path, "a.csv")
    code2, text2 = run(args, tmp_path, "b.csv")
    assert code1 == code2 == 0
    assert text1 == text2
    assert "# config-digest" in text1
    assert text1.count("\n") > 12


def test_simulate_norm_column_is_one(tmp_path):
    _, text = run(["simulate", "--preset", "random", "--K", "10"], tmp_path, "s.csv")
    rows = [l for l in text.splitlines() if l and not l.startswith("#")][1:]
    for row in rows:
        assert float(row.split(",")[1]) == pytest.approx(1.0, abs=1e-12)


def test_exponents_free_walk_ballistic(tmp_path):
    code, text = run(
        ["exponents", "--preset", "free", "--K-max", "128", "--p", "1"],
        tmp_path,
        "e.csv",
    )
    assert code == 0
    line = next(l for l in text.splitlines() if l.startswith("# exponent"))
    assert "slope=1" in line


def test_parseval_subcommand(tmp_path):
    code, text = run(
        ["parseval-check", "--preset", "random", "--K", "16"], tmp_path, "p.csv"
    )
    assert code == 0
    row = [l for l in text.splitlines() if l and not l.startswith("#")][1]
    assert abs(float(row.split(",")[3])) < 1e-8


def test_subordinacy_subcommand(tmp_path):
    code, text = run(
        ["subordinacy", "--preset", "free", "--z-count", "2", "--L-count", "6"],
        tmp_path,
        "sub.csv",
    )
    assert code == 0
    rows = [l for l in text.splitlines() if l and not l.startswith("#")][1:]
    for row in rows:
        assert float(row.split(",")[4]) == pytest.approx(1.0, abs=0.05)


def test_fib_bound_subcommand(tmp_path):
    code, text = run(
        ["fib-bound", "--z-grid", "4", "--trunc-N", "64"], tmp_path, "f.csv"
    )
    assert code == 0
    assert "# max_beta_over_spectrum" in text


def test_measure_diag_emits_json(tmp_path):
    code, text = run(["measure-diag", "--uniform", "128"], tmp_path, "m.json")
    assert code == 0
    payload = json.loads(text.splitlines()[-1])
    assert payload["atoms"] == 128
    assert payload["total_mass"] == pytest.approx(1.0)


def test_config_file_merges_under_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("K=9\npreset=rotation\n")
    out = tmp_path / "c.csv"
    code = main(["--config", str(cfg), "simulate", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert "# config K=9" in text
    assert "# config preset=rotation" in text


def test_missing_operator_is_a_usage_error(capsys):
    code = main(["simulate", "--K", "4"])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert "operator" in err["message"]


def test_unreadable_file_is_reported(capsys):
    code = main(["simulate", "--verblunsky", "/nonexistent/alphas.txt"])
    assert code == 2
