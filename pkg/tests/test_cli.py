import json

import pytest

from vorace.cli import main

EXAMPLE = {"scores": [[0.4, 0.2, 0.1, 0.3], [0.1, 0.3, 0.2, 0.4], [0.4, 0.2, 0.1, 0.3]]}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "profile.json"
    path.write_text(json.dumps(EXAMPLE))
    return str(path)


@pytest.mark.parametrize("rule, winner", [("borda", "c4"), ("plurality", "c1"), ("copeland", "c1")])
def test_aggregate_example(capsys, example_file, rule, winner):
    code, out, _ = run(capsys, "aggregate", "--profile", example_file, "--rule", rule)
    assert code == 0
    data = json.loads(out)
    assert data["winner_label"] == winner
    if rule == "borda":
        assert data["rule_scores"] == [6, 4, 1, 7]


def test_aggregate_rankings_file(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"m": 3, "rankings": [[2, 0, 1], [2, 1, 0]], "validation_accuracy": None, "weights": None}))
    code, out, _ = run(capsys, "aggregate", "--profile", str(path), "--rule", "kemeny")
    assert code == 0 and json.loads(out)["winner"] == 2


def test_aggregate_bad_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    code, out, err = run(capsys, "aggregate", "--profile", str(path))
    assert code == 2 and out == "" and "not valid JSON" in err


def test_aggregate_sum_needs_scores(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"m": 2, "rankings": [[0, 1]]}))
    code, _, err = run(capsys, "aggregate", "--profile", str(path), "--rule", "sum")
    assert code == 2 and "score vectors" in err


def test_theory_rows(capsys):
    code, out, _ = run(capsys, "theory", "--n", "10,50", "--m", "2", "--p", "0.6", "--compare", "binary")
    rows = json.loads(out)
    assert code == 0 and [r["n"] for r in rows] == [10, 50]
    assert abs(rows[1]["value_float"] - 0.902193) < 1e-5


def test_theory_mu_csv(capsys):
    code, out, _ = run(capsys, "theory", "--n", "10", "--m", "2", "--p", "0.5", "--compare", "mu", "--format", "csv")
    header, row = out.strip().splitlines()
    assert header.startswith("n,m,p,method") and "0.41190147399902344" in row


def test_theory_p_one_all_methods(capsys):
    argv = ["theory", "--n", "4", "--m", "2", "--p", "1"]
    for method in ("paper", "model", "oracle", "mu", "binary"):
        argv += ["--compare", method]
    code, out, _ = run(capsys, *argv)
    assert code == 0 and all(r["value_exact"] == "1" for r in json.loads(out))


def test_theory_infeasible_rows_are_reported(capsys):
    code, out, _ = run(capsys, "theory", "--n", "3,200", "--m", "6", "--p", "1/2", "--compare", "oracle")
    rows = json.loads(out)
    assert code == 0 and rows[0]["error"] is None and "limit" in rows[1]["error"]


def test_theory_audit(capsys):
    code, out, _ = run(capsys, "theory", "--audit", "--n", "3", "--m", "4", "--p", "0.8")
    report = json.loads(out)
    assert report["K_theorem"] == "343/125" and report["T_oracle"] == "112/125"
    assert report["discrepancies"]


def test_theory_grid(capsys):
    code, out, _ = run(capsys, "theory", "--n", "10", "--p", "0:1:1/20", "--compare", "binary")
    rows = json.loads(out)
    assert len(rows) == 21 and rows[-1]["value_exact"] == "1"


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "3", "--m", "4", "--p", "0.8", "--trials", "20000", "--seed", "1")
    data = json.loads(out)
    assert code == 0 and abs(data["rate"] - 0.896) < 4 * data["stderr"]
    assert data["config"]["seed"] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--n", "3", "--m", "4", "--p", "0.8", "--trials", "0"],
        ["simulate", "--n", "3", "--m", "4", "--p", "0.8"],
        ["simulate", "--bogus"],
        ["run", "--dataset", "iris", "--rule", "stv"],
        ["run", "--csv", "missing.csv"],
        ["frobnicate"],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 2 and out == ""


def test_unknown_rule_lists_valid(capsys):
    _, _, err = run(capsys, "run", "--dataset", "iris", "--rule", "stv")
    assert "plurality" in err and "kemeny" in err


def test_run_bad_paths(capsys, tmp_path):
    code, _, err = run(capsys, "run", "--csv", str(tmp_path / "x.csv"), "--schema", str(tmp_path / "x.json"))
    assert code == 2 and "cannot read" in err


def test_run_json_and_csv(capsys):
    code, out, _ = run(capsys, "run", "--dataset", "iris", "--n", "5", "--folds", "3")
    rep = json.loads(out)
    assert code == 0 and len(rep["fold_scores"]) == 3
    code, out, _ = run(capsys, "run", "--dataset", "wine", "--n", "5", "--folds", "3", "--rule", "all", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 6 and lines[1].startswith("wine,plurality")


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "m": 4, "p": 0.8, "trials": 5000, "seed": 7}))
    code, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert code == 0 and json.loads(out)["config"]["seed"] == 7
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--seed", "8")
    assert json.loads(out)["config"]["seed"] == 8
    cfg.write_text(json.dumps({"nonsense": 1}))
    code, _, err = run(capsys, "simulate", "--config", str(cfg))
    assert code == 2 and "nonsense" in err


def test_runtime_failure_exit_code(capsys, monkeypatch):
    import vorace.cli as cli

    def boom(*_a, **_k):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(cli, "simulate", boom)
    code, _, err = run(capsys, "simulate", "--n", "3", "--m", "2", "--p", "0.5", "--trials", "10")
    assert code == 1 and "disk on fire" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["theory", "--n", "5,10", "--m", "2,3", "--p", "0.3,0.7", "--compare", "model", "--compare", "mu"],
        ["simulate", "--n", "5", "--m", "3", "--p", "0.6", "--trials", "9000", "--rule", "borda", "--seed", "3"],
        ["run", "--dataset", "iris", "--n", "7", "--folds", "3", "--seed", "5"],
    ],
)
def test_byte_identical_reruns(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0 and first[1] == second[1]
