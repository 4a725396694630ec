#!/usr/bin/env python3
"""Tests for scenario loading, validation errors and configuration precedence."""

import json
from pathlib import Path

import pytest
import yaml

from evac_wayfinding.config import AppConfig, Tunables, load_config_from_yaml
from evac_wayfinding.exceptions import ScenarioError
from evac_wayfinding.simulation import build_scenario, load_scenario, load_scenario_file
from evac_wayfinding.simulation.presets import TABLE1_CASES, preset_document, table1_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def create_minimal_document():
    """Two routes on the open plane, no agents."""
    return {
        "environment": {
            "intersection": {
                "center": [0.0, 0.0],
                "routes": [
                    {"id": 0, "portal": [[-4.0, -1.0], [-4.0, 1.0]]},
                    {"id": 1, "portal": [[4.0, -1.0], [4.0, 1.0]]},
                ],
            },
        },
        "agents": {"count": 0},
    }


def load_error(doc) -> ScenarioError:
    with pytest.raises(ScenarioError) as info:
        load_scenario(json.dumps(doc))
    return info.value


def test_minimal_document_gets_defaults():
    """Test that a bare two-route document loads with every default filled in."""
    scenario = load_scenario(json.dumps(create_minimal_document()))
    assert scenario.mode == "geometric"
    assert scenario.route_count == 2
    assert scenario.source_count == 4
    assert scenario.seed == 0
    assert scenario.tunables.theta == 0.5
    assert scenario.tunables.memory_window == 3
    assert scenario.agent_config.step_len == 0.5
    assert scenario.environment.is_open


@pytest.mark.parametrize("name", ["junction_m2.json", "junction_m4.json", "crowd_surge.json", "synthetic_junction.json"])
def test_shipped_scenarios_load(name):
    scenario = load_scenario_file(SCENARIOS / name)
    assert scenario.route_count in (2, 4)
    assert scenario.agents.count >= 1


def test_shipped_scenarios_match_presets():
    """Test that the scenario files and the built-in documents describe the same layouts."""
    from_file = json.loads((SCENARIOS / "junction_m2.json").read_text(encoding="utf-8"))
    preset = preset_document("reference-junction")
    assert from_file["environment"] == json.loads(json.dumps(preset["environment"]))
    assert from_file["crowd"] == json.loads(json.dumps(preset["crowd"]))


def test_yaml_documents_are_accepted():
    doc = create_minimal_document()
    scenario = load_scenario(yaml.safe_dump(doc), fmt="yaml")
    assert scenario.route_count == 2


def test_missing_file():
    with pytest.raises(ScenarioError, match="scenario not found"):
        load_scenario_file(SCENARIOS / "missing.json")


def test_malformed_json():
    with pytest.raises(ScenarioError, match="malformed json"):
        load_scenario("{not json")


def test_unknown_key_is_rejected():
    doc = create_minimal_document()
    doc["bogus"] = 1
    assert load_error(doc).field == "bogus"


def test_overlapping_portals_name_the_routes():
    """Test that crossing portals are rejected with both route ids."""
    doc = create_minimal_document()
    doc["environment"]["intersection"]["routes"] = [
        {"id": 0, "portal": [[-1.0, 4.0], [1.0, 6.0]]},
        {"id": 1, "portal": [[-1.0, 6.0], [1.0, 4.0]]},
    ]
    error = load_error(doc)
    assert "routes.portal" in error.field
    assert "routes 0 and 1" in str(error)


def test_route_ids_must_be_contiguous():
    doc = create_minimal_document()
    doc["environment"]["intersection"]["routes"][1]["id"] = 2
    assert load_error(doc).field == "environment.intersection.routes.id"


def test_single_route_is_rejected():
    doc = create_minimal_document()
    del doc["environment"]["intersection"]["routes"][1]
    assert "routes" in load_error(doc).field


def test_sign_target_out_of_range():
    doc = create_minimal_document()
    doc["environment"]["signs"] = [{"pos": [0.0, 2.0], "facing_deg": -90.0, "target_route": 5}]
    assert load_error(doc).field == "environment.signs.target_route"


def test_center_inside_wall():
    doc = preset_document("reference-junction")
    doc["environment"]["intersection"]["center"] = [0.0, 5.0]
    assert load_error(doc).field == "environment.intersection.center"


def test_portal_leaving_free_space():
    doc = preset_document("reference-junction")
    doc["environment"]["intersection"]["routes"][0]["portal"] = [[-12.0, 2.0], [-3.0, 2.0]]
    assert load_error(doc).field == "environment.intersection.routes.portal"


def test_agents_need_a_spawn_region():
    doc = create_minimal_document()
    doc["agents"]["count"] = 3
    assert load_error(doc).field == "environment.spawn_region"


def test_crowd_flow_validation():
    """Test flows on unknown routes and schedule entries without a flow."""
    doc = preset_document("reference-junction")
    doc["crowd"]["flows"][0]["route"] = 7
    assert load_error(doc).field == "crowd.flows.route"

    doc = preset_document("reference-junction")
    doc["crowd"]["flows"] = doc["crowd"]["flows"][:1]
    doc["crowd"]["schedule"] = [{"tick": 5, "route": 1, "rate": 1.0}]
    assert load_error(doc).field == "crowd.schedule.route"


def test_synthetic_levels_validation():
    """Test the synthetic-mode requirements on the level table."""
    doc = preset_document("synthetic-junction")
    doc["synthetic"]["levels"]["sign"] = ["Yes", "Yes"]
    error = load_error(doc)
    assert error.field == "synthetic.levels"
    assert "Yes" in str(error)

    doc = preset_document("synthetic-junction")
    del doc["synthetic"]
    assert load_error(doc).field == "synthetic"

    doc = preset_document("synthetic-junction")
    doc["synthetic"]["levels"]["crowd"] = ["High", "Med", "Low"]
    assert load_error(doc).field == "synthetic.levels"


def test_unknown_disabled_source():
    doc = create_minimal_document()
    doc["disabled_sources"] = ["smell"]
    assert load_error(doc).field == "disabled_sources"


def test_disabled_sources_reduce_active_count():
    doc = create_minimal_document()
    doc["disabled_sources"] = ["sign"]
    scenario = build_scenario(doc)
    assert scenario.source_count == 3
    assert scenario.agent_config.disabled_sources == ("sign",)


def test_tunable_precedence():
    """Test that document tunables override the defaults and the rest fall through."""
    doc = create_minimal_document()
    doc["tunables"] = {"W": 5}
    scenario = load_scenario(json.dumps(doc), defaults=Tunables(theta=0.7, beta=2.0))
    assert scenario.tunables.memory_window == 5
    assert scenario.tunables.theta == 0.7
    assert scenario.agent_config.crowd_smoothing == 2.0
    assert scenario.agent_config.memory_window == 5


def test_invalid_tunable_reports_field():
    doc = create_minimal_document()
    doc["tunables"] = {"theta": 1.5}
    assert load_error(doc).field == "tunables.theta"


def test_agent_config_overrides():
    doc = create_minimal_document()
    doc["agents"]["config"] = {"fov_deg": 90.0, "step_len": 0.25}
    scenario = build_scenario(doc)
    assert scenario.agent_config.fov == pytest.approx(1.5707963267948966)
    assert scenario.agent_config.step_len == 0.25

    doc["agents"]["config"] = {"step_len": -1.0}
    assert load_error(doc).field == "agents.config"


def test_with_overrides_is_echoed():
    """Test that command-line style overrides land in the config echo."""
    scenario = load_scenario(json.dumps(create_minimal_document()))
    changed = scenario.with_overrides(seed=7, theta=0.9, memory_window=None)
    assert changed.seed == 7
    assert changed.tunables.theta == 0.9
    assert changed.agent_config.theta == 0.9
    assert changed.config_echo()["overrides"] == {"seed": 7, "theta": 0.9}
    assert scenario.with_overrides() is scenario
    with pytest.raises(ScenarioError):
        scenario.with_overrides(colour="blue")


def test_table1_case_one_preset():
    """Test the level encoding of the first reference case."""
    scenario = table1_scenario(TABLE1_CASES[0])
    assert scenario.mode == "synthetic"
    assert scenario.levels.sign == ("Yes", "No")
    assert scenario.levels.crowd == ("High", "Med")
    assert scenario.levels.space == ("High", "Med")
    assert scenario.tunables.v_table == 0.4
    assert (TABLE1_CASES[0].reported_left_pct, TABLE1_CASES[0].reported_right_pct) == (89.0, 11.0)


def test_load_config_from_yaml(tmp_path):
    """Test the application settings loader with a file, a missing file and a broken file."""
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"logging": {"level": "debug"}, "tunables": {"theta": 0.6}}), encoding="utf-8")
    config = load_config_from_yaml(str(path))
    assert config.logging.level == "DEBUG"
    assert config.tunables.theta == 0.6
    assert config.output.directory == "results"

    assert load_config_from_yaml(str(tmp_path / "absent.yaml")) == AppConfig()

    path.write_text("tunables: [1, 2", encoding="utf-8")
    assert load_config_from_yaml(str(path)) == AppConfig()
