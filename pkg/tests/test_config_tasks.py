import json

import numpy as np
import pytest

from sigmaflow.config import ConfigError, RunConfig, config_from_dict, parse_config
from sigmaflow.tasks import run_task


def test_parse_minimal_flow_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "background": {"m_family": "sphere:1"},
        "flow": {"nu": 1.0, "tau_end": 0.3},
    }))
    cfg = parse_config(path)
    assert cfg.flow.tau_end == 0.3
    assert cfg.background.m_family == "sphere:1"


def test_zero_step_rejected_with_field_name(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"flow": {"dt": 0.0}}))
    with pytest.raises(ConfigError) as err:
        parse_config(path)
    assert any("flow.dt" in p for p in err.value.problems)


def test_unknown_key_rejected_by_name():
    with pytest.raises(ConfigError) as err:
        config_from_dict({"foo": 1})
    assert any("foo" in p for p in err.value.problems)


def test_all_errors_reported_at_once():
    with pytest.raises(ConfigError) as err:
        config_from_dict({"flow": {"dt": -1.0, "tau_end": 0.0}, "bar": {}})
    joined = " ".join(err.value.problems)
    assert "flow.dt" in joined and "flow.tau_end" in joined and "bar" in joined


def test_negative_lambda_rejected():
    with pytest.raises(ConfigError) as err:
        config_from_dict({"hadamard": {"lambdas": [0.5, -2.0]}})
    assert any("lambdas" in p for p in err.value.problems)


def test_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/path.json")


def test_flow_task_writes_constant_rows(tmp_path):
    cfg = config_from_dict({"background": {"m_family": "torus:2"},
                            "flow": {"tau_end": 0.05, "dt": 5e-3,
                                     "record_every": 2}})
    report, run_dir = run_task(cfg, "flow", out_dir=tmp_path)
    assert report.passed
    csv_lines = (run_dir / "trajectory.csv").read_text().strip().splitlines()
    header = csv_lines[0].split(",")
    assert header[0] == "tau"
    first = csv_lines[1].split(",")
    last = csv_lines[-1].split(",")
    assert first[1:5] == last[1:5]          # metric components never move


def test_report_determinism(tmp_path):
    cfg = config_from_dict({"background": {"m_family": "sphere:1"},
                            "flow": {"tau_end": 0.05}})
    _, dir1 = run_task(cfg, "flow", out_dir=tmp_path / "a", tag="x")
    _, dir2 = run_task(cfg, "flow", out_dir=tmp_path / "b", tag="x")
    assert (dir1 / "report.json").read_bytes() == (dir2 / "report.json").read_bytes()
    assert (dir1 / "trajectory.csv").read_bytes() == \
        (dir2 / "trajectory.csv").read_bytes()


def test_report_rows_name_their_check(tmp_path):
    cfg = config_from_dict({"background": {"m_family": "sphere:1"},
                            "flow": {"tau_end": 0.05}})
    report, _ = run_task(cfg, "flow", out_dir=tmp_path)
    for row in report.checks:
        assert row.check
        assert row.detail
    data = json.loads(report.to_json())
    assert data["config_digest"]
    assert data["task"] == "flow"


def test_renorm_task_artifact_schema(tmp_path):
    cfg = config_from_dict({
        "background": {"sigma_family": "sphere:1", "m_family": "sphere:1"},
        "renorm": {"lambdas": [0.5, 2.0], "nu": 0.1},
    })
    report, run_dir = run_task(cfg, "renorm-check", out_dir=tmp_path)
    assert report.passed
    rows = json.loads((run_dir / "identity_checks.json").read_text())
    assert {"lambda", "nu", "lhs", "rhs", "residual"} == set(rows[0])


def test_unknown_task_rejected(tmp_path):
    with pytest.raises(ValueError):
        run_task(RunConfig(), "mystery", out_dir=tmp_path)


def test_env_out_root(monkeypatch, tmp_path):
    from sigmaflow.tasks import output_root

    monkeypatch.setenv("SIGMAFLOW_OUT", str(tmp_path / "envroot"))
    assert output_root() == tmp_path / "envroot"
    assert output_root("explicit") == __import__("pathlib").Path("explicit")
