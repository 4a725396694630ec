#!/usr/bin/env python3
"""
Tests for the enhanced logging setup and the run/sweep log helpers.
"""

import logging

from evac_wayfinding.simulation import SweepRow, build_scenario, run
from evac_wayfinding.simulation.presets import TABLE1_CASES, preset_document, run_table1_case
from evac_wayfinding.utils import (
    log_preset_row,
    log_run_start,
    log_run_summary,
    log_sweep_row,
    log_validation,
    setup_logger,
)


def create_scenario(agents=3):
    doc = preset_document("synthetic-junction")
    doc["agents"]["count"] = agents
    return build_scenario(doc)


def test_logger_writes_to_file(tmp_path):
    """Test the loguru file sink and forwarding from standard-library loggers."""
    log_file = tmp_path / "logs" / "run.log"
    logger = setup_logger("test_logger", "DEBUG", log_file=str(log_file), use_colors=False)

    logger.info("🚀 direct message")
    logging.getLogger("evac_wayfinding.test").warning("forwarded message")
    logger.remove()

    text = log_file.read_text(encoding="utf-8")
    assert "direct message" in text
    assert "forwarded message" in text
    assert "WARNING" in text


def test_level_filters_debug(tmp_path):
    log_file = tmp_path / "quiet.log"
    logger = setup_logger("test_logger", "warning", log_file=str(log_file), use_colors=False)
    logger.debug("hidden")
    logger.warning("shown")
    logger.remove()

    text = log_file.read_text(encoding="utf-8")
    assert "hidden" not in text
    assert "shown" in text


def test_log_helpers(tmp_path):
    """Test that every helper writes its key figures."""
    log_file = tmp_path / "helpers.log"
    logger = setup_logger("test_logger", "INFO", log_file=str(log_file), use_colors=False)

    scenario = create_scenario()
    result = run(scenario)
    log_run_start(logger, scenario)
    log_run_summary(logger, result)
    log_sweep_row(logger, SweepRow(window=3, mean_entropy=0.42, std_entropy=0.01, n_seeds=5))
    log_preset_row(logger, run_table1_case(TABLE1_CASES[0], agents=5))
    log_validation(logger, {"routes": 2, "sources": 4, "agents": 3})
    logger.remove()

    text = log_file.read_text(encoding="utf-8")
    assert "synthetic run" in text
    assert "Evacuation time" in text
    assert "3 committed agents" in text
