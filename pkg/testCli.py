import json
from pathlib import Path

import pytest

import Config
import pwlmip
from LpFormat import parse_lp
from RationalIO import parse_rational

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = pwlmip.main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_wsm_report(capsys):
    code, report = run_json(capsys, "wsm", FIXTURES / "wsm3.json")
    assert code == pwlmip.EXIT_OK
    assert report["command"] == "wsm"
    assert report["status"] == "feasible"
    assert report["cost"] == "3"
    assert report["result"]["cost"] == 3
    assert report["statistics"]["nodes"] >= 1
    assert "wall_time" not in report


def test_reports_are_byte_identical(capsys):
    _, first, _ = run(capsys, "wsm", FIXTURES / "wsm3.json", "--json", "--minimize-cost")
    _, second, _ = run(capsys, "wsm", FIXTURES / "wsm3.json", "--json", "--minimize-cost")
    assert first == second


def test_timing_flag(capsys):
    _, report = run_json(capsys, "wsm", FIXTURES / "wsm3.json", "--timing")
    assert report["wall_time"] >= 0


def test_umm_report(capsys):
    code, report = run_json(capsys, "umm", FIXTURES / "umm2.json")
    assert code == 0
    assert report["result"]["chosen"] == [0, 1]
    assert report["cost"] == "2"


def test_empty_model(capsys):
    code, report = run_json(capsys, "solve-emip", FIXTURES / "empty.json")
    assert code == 0
    assert report["status"] == "feasible"
    assert report["result"] == {"assignment": {}}


def test_solve_emip_objective(capsys):
    code, report = run_json(capsys, "solve-emip", FIXTURES / "lp1.json")
    assert code == 0
    assert report["result"]["objective"] == "2"
    assert report["result"]["assignment"]["x"] == "2"


def test_mmc_approx(capsys):
    code, report = run_json(capsys, "mmc-approx", FIXTURES / "uniformish.json", "--epsilon", "1/2",
                            "--minimize-cost", "--dump-decomposition")
    assert code == 0
    assert report["status"] == "feasible"
    result = report["result"]
    assert result["total_misses"] == 0
    assert parse_rational(result["bound"]) == 11
    assert len(result["chosen"]) <= 2
    assert result["decomposition"]["Z"] == 24
    assert len(result["decomposition"]["vectors"]) == 5


def test_mmc_approx_bad_epsilon(capsys):
    code, out, err = run(capsys, "mmc-approx", FIXTURES / "uniformish.json", "--epsilon", "0")
    assert code == pwlmip.EXIT_INPUT
    assert out == ""
    assert "Invalid --epsilon" in err


def test_control_reports(capsys):
    code, report = run_json(capsys, "ccdv", FIXTURES / "ccdv3.json")
    assert code == 0
    assert report["result"]["action"] == [1, 2]
    assert report["cost"] == "3"

    code, report = run_json(capsys, "scoring-ccdv", FIXTURES / "borda3.json")
    assert report["status"] == "feasible"
    assert report["cost"] == "1"


def test_infeasible_is_not_an_error(capsys):
    code, report = run_json(capsys, "ccdv", FIXTURES / "ccdv3.json", "--unique-winner")
    assert code == 0
    assert report["status"] == "infeasible"


def test_invalid_input(capsys, tmp_path):
    code, out, err = run(capsys, "wsm", tmp_path / "missing.json")
    assert code == pwlmip.EXIT_INPUT
    assert "cannot read file" in err

    code, report = run_json(capsys, "wsm", FIXTURES / "ccdv3.json")
    assert code == pwlmip.EXIT_INPUT
    assert report["status"] == "error"
    assert "schema version mismatch" in report["result"]["message"]


def test_node_limit(capsys, tmp_path):
    model = tmp_path / "half.json"
    model.write_text(json.dumps({
        "schema": "emip-v1",
        "variables": [{"name": "x", "upper": 1}],
        "constraints": [{"lhs": {"x": 2}, "b": 1}, {"rhs": {"x": 2}, "b": -1}],
    }))
    code, report = run_json(capsys, "solve-emip", model, "--node-limit", "1")
    assert code == pwlmip.EXIT_EXHAUSTED
    assert report["status"] == "resource-exhausted"

    code, report = run_json(capsys, "solve-emip", model)
    assert code == 0
    assert report["status"] == "infeasible"

    code, _, err = run(capsys, "solve-emip", model, "--node-limit", "0")
    assert code == pwlmip.EXIT_INPUT


def test_node_limit_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(Config.NODE_LIMIT_ENV, "nonsense")
    code, _, err = run(capsys, "solve-emip", FIXTURES / "empty.json")
    assert code == pwlmip.EXIT_INPUT
    assert Config.NODE_LIMIT_ENV in err


def test_export_lp(capsys, tmp_path):
    code, out, _ = run(capsys, "export-lp", FIXTURES / "lp1.json")
    assert code == 0
    model, objective, sense = parse_lp(out)
    assert sense == "maximize"
    assert objective == {"x": 1}
    assert "General" in out

    target = tmp_path / "lp1.lp"
    code, out, _ = run(capsys, "export-lp", FIXTURES / "lp1.json", "-o", target)
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("\\* lowered from")


def test_oracle_is_gated(capsys, monkeypatch):
    monkeypatch.delenv(Config.DEV_ORACLE_ENV, raising=False)
    code, _, err = run(capsys, "oracle", "cover", FIXTURES / "wsm3.json")
    assert code == pwlmip.EXIT_INPUT
    assert Config.DEV_ORACLE_ENV in err

    code, report = run_json(capsys, "oracle", "cover", FIXTURES / "wsm3.json", "--dev-oracle")
    assert code == 0
    assert report["cost"] == "3"
    assert report["result"]["witness"] == [1]


def test_oracle_hard_instances(capsys, monkeypatch):
    monkeypatch.setenv(Config.DEV_ORACLE_ENV, "1")
    code, report = run_json(capsys, "oracle", "subsetsum-mmc", "--seed", "4")
    assert code == 0
    assert report["status"] == "feasible"
    assert report["result"]["instance"]["schema"] == "cover-v1"


def test_human_summary(capsys):
    code, out, _ = run(capsys, "ccdv", FIXTURES / "ccdv3.json")
    assert code == 0
    assert out.startswith("ccdv: feasible\ncost: 3\n")


def test_oracle_hidden_from_help(capsys):
    with pytest.raises(SystemExit):
        pwlmip.main(["--help"])
    assert "oracle" not in capsys.readouterr().out


def test_fractional_objective(capsys, tmp_path):
    model = tmp_path / "half_objective.json"
    model.write_text(json.dumps({
        "schema": "emip-v1",
        "variables": [{"name": "x", "upper": 5}],
        "objective": {"sense": "max", "coefficients": {"x": "1/2"}},
    }))
    code, report = run_json(capsys, "solve-emip", model)
    assert code == 0
    assert report["result"]["objective"] == "5/2"
    assert report["result"]["assignment"] == {"x": "5"}


def test_unnamed_constraint_after_named_one(capsys, tmp_path):
    convex = {"shape": "convex", "breakpoints": ["2"], "slopes": ["1", "3"]}
    model = tmp_path / "names.json"
    model.write_text(json.dumps({
        "schema": "emip-v1",
        "variables": [{"name": "x", "upper": 3}],
        "constraints": [{"name": "c1", "lhs": {"x": convex}, "b": 4}, {"lhs": {"x": convex}, "b": 6}],
    }))
    code, report = run_json(capsys, "solve-emip", model)
    assert code == 0
    assert report["status"] == "feasible"
    assert report["result"]["assignment"] == {"x": "0"}
