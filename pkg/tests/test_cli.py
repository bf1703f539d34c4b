import json

import pytest

from sigmaflow.cli import main


def write_config(tmp_path, data):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_cli_flow_pass(tmp_path, capsys):
    cfg = write_config(tmp_path, {"background": {"m_family": "sphere:1"},
                                  "flow": {"tau_end": 0.05}})
    code = main(["flow", "--config", cfg, "--out", str(tmp_path / "out"),
                 "--tag", "clirun"])
    out = capsys.readouterr().out
    assert code == 0
    assert "[PASS] flow.sphere-closed-form" in out
    assert (tmp_path / "out" / "flow" / "clirun" / "report.json").exists()


def test_cli_defaults_without_config(tmp_path, capsys):
    code = main(["flow", "--out", str(tmp_path / "out")])
    assert code == 0


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, {"flow": {"dt": 0.0}})
    code = main(["flow", "--config", cfg, "--out", str(tmp_path / "out")])
    err = capsys.readouterr().err
    assert code == 2
    assert "flow.dt" in err


def test_cli_missing_config_file(tmp_path, capsys):
    code = main(["flow", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "out")])
    assert code == 2


def test_cli_seed_override_changes_digest(tmp_path):
    cfg = write_config(tmp_path, {"background": {"m_family": "sphere:1"},
                                  "flow": {"tau_end": 0.05}})
    main(["flow", "--config", cfg, "--out", str(tmp_path / "o1"), "--seed", "7"])
    main(["flow", "--config", cfg, "--out", str(tmp_path / "o2"), "--seed", "8"])
    d1 = next((tmp_path / "o1" / "flow").iterdir())
    d2 = next((tmp_path / "o2" / "flow").iterdir())
    r1 = json.loads((d1 / "report.json").read_text())
    r2 = json.loads((d2 / "report.json").read_text())
    assert r1["config_digest"] != r2["config_digest"]
    assert r1["seed"] == 7 and r2["seed"] == 8
