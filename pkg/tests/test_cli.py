#!/usr/bin/env python3
"""Tests for the evac-wayfinding command line."""

import json
from pathlib import Path

import pandas as pd
import pytest

from evac_wayfinding.__main__ import EXIT_INPUT, EXIT_IO, EXIT_OK, main, parse_args
from evac_wayfinding.simulation.presets import preset_document

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def no_config(tmp_path):
    """Arguments pointing at a settings file that does not exist, so defaults apply."""
    return ["--config", str(tmp_path / "absent.yaml")]


def create_scenario_file(tmp_path, agents=10, name="small.json", **changes):
    doc = preset_document("synthetic-junction")
    doc["agents"]["count"] = agents
    doc.update(changes)
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_parse_args_requires_a_command():
    with pytest.raises(SystemExit):
        parse_args([])


def test_parse_args_defaults():
    args = parse_args(["sweep", "--scenario", "x.json"])
    assert args.config == "config.yaml"
    assert args.windows == [1, 2, 3, 4, 5, 6]
    assert args.seeds == 20
    assert args.workers == 1


@pytest.mark.parametrize("name", ["junction_m2.json", "junction_m4.json", "crowd_surge.json", "synthetic_junction.json"])
def test_validate_shipped_scenarios(no_config, capsys, name):
    assert main(no_config + ["validate", "--scenario", str(SCENARIOS / name)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("OK ")


def test_validate_reports_counts(no_config, capsys):
    main(no_config + ["validate", "--scenario", str(SCENARIOS / "junction_m4.json")])
    assert "M=4 N=4" in capsys.readouterr().out


def test_validate_missing_scenario(no_config, capsys, tmp_path):
    code = main(no_config + ["validate", "--scenario", str(tmp_path / "nope.json")])
    assert code == EXIT_INPUT
    assert "scenario not found" in capsys.readouterr().err


def test_validate_invalid_scenario(no_config, capsys, tmp_path):
    """Test that overlapping portals are reported as an input error."""
    doc = preset_document("reference-junction")
    doc["environment"]["intersection"]["routes"][1]["portal"] = [[-8.0, 2.0], [4.0, 2.0]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert main(no_config + ["validate", "--scenario", str(path)]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_run_writes_results(no_config, capsys, tmp_path):
    """Test that a run exports both files and prints a one-line summary."""
    scenario = create_scenario_file(tmp_path)
    out = tmp_path / "results"
    code = main(no_config + ["run", "--scenario", str(scenario), "--seed", "3", "--out", str(out)])

    assert code == EXIT_OK
    assert (out / "trajectories.csv").exists()
    metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
    assert metrics["seed"] == 3
    assert metrics["config_echo"]["overrides"] == {"seed": 3}
    assert "synthetic-junction:" in capsys.readouterr().out


def test_run_threshold_override(no_config, tmp_path):
    """Test that a stricter threshold leaves more rows without a prediction."""
    scenario = create_scenario_file(
        tmp_path,
        agents=20,
        synthetic={"levels": {"sign": ["Yes", "No"], "crowd": ["High", "Low"], "space": ["High", "Low"]}},
        tunables={"v_table": 1.0, "eta": 0.0},
    )
    counts = {}
    for theta in ("0.2", "0.9"):
        out = tmp_path / f"theta{theta}"
        assert main(no_config + ["run", "--scenario", str(scenario), "--theta", theta, "--out", str(out)]) == EXIT_OK
        frame = pd.read_csv(out / "trajectories.csv")
        counts[theta] = int((frame["pred_route"] == -1).sum())
    assert counts["0.9"] > counts["0.2"]
    assert counts["0.9"] == len(frame)


def test_run_into_unwritable_directory(no_config, tmp_path):
    scenario = create_scenario_file(tmp_path, agents=1)
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    code = main(no_config + ["run", "--scenario", str(scenario), "--out", str(blocker / "out")])
    assert code == EXIT_IO


def test_unknown_preset(no_config, capsys):
    assert main(no_config + ["preset", "--name", "bogus"]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert "table1" in err and "fig3" in err


def test_sweep_writes_csv(no_config, capsys, tmp_path):
    scenario = create_scenario_file(tmp_path, agents=3)
    out = tmp_path / "sweep"
    code = main(no_config + ["sweep", "--scenario", str(scenario), "--windows", "1", "3", "--seeds", "2",
                             "--out", str(out)])
    assert code == EXIT_OK
    frame = pd.read_csv(out / "sweep.csv")
    assert frame["W"].tolist() == [1, 3]
    assert frame["n_seeds"].tolist() == [2, 2]
    assert "sweep.csv" in capsys.readouterr().out


def test_settings_file_sets_defaults(tmp_path, capsys):
    """Test that tunables from the settings file reach the scenario."""
    config = tmp_path / "config.yaml"
    config.write_text("logging:\n  level: WARNING\ntunables:\n  theta: 0.8\n", encoding="utf-8")
    scenario = create_scenario_file(tmp_path, agents=2)
    out = tmp_path / "results"
    assert main(["--config", str(config), "run", "--scenario", str(scenario), "--out", str(out)]) == EXIT_OK
    metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
    assert metrics["config_echo"]["tunables"]["theta"] == 0.8
