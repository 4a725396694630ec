"""Scenario loading, world stepping, experiments and result export."""

from .crowd import CrowdState, initial_crowd, step_crowd
from .export import export, plot_trajectories, write_sweep, write_table1
from .presets import PRESET_NAMES, TABLE1_CASES, run_fig3, run_table1
from .runner import RunResult, TrajectoryRow, route_shares, run
from .scenario import Scenario, build_scenario, load_scenario, load_scenario_file
from .sweep import SweepRow, sweep_memory

__all__ = [
    "PRESET_NAMES", "TABLE1_CASES", "CrowdState", "RunResult", "Scenario", "SweepRow", "TrajectoryRow",
    "build_scenario", "export", "initial_crowd", "load_scenario", "load_scenario_file", "plot_trajectories",
    "route_shares", "run", "run_fig3", "run_table1", "step_crowd", "sweep_memory", "write_sweep", "write_table1",
]
