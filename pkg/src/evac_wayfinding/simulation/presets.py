"""Built-in experiments: level-encoded reinforcement/contradiction cases and the memory sweep."""

import copy
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .runner import route_shares, run
from .scenario import Scenario, build_scenario
from .sweep import SweepRow, sweep_memory

logger = logging.getLogger(__name__)

PRESET_NAMES = ("table1", "fig3")

# Sign visibility for a "Yes" level in the level-encoded cases
TABLE1_V_TABLE = 0.4
TABLE1_AGENTS = 100
FIG3_WINDOWS = (1, 2, 3, 4, 5, 6)


@dataclass(frozen=True)
class Table1Case:
    """One row of the reference route-choice table: (sign, crowd, space) levels per side."""

    case: int
    label: str
    left: Tuple[str, str, str]
    right: Tuple[str, str, str]
    reported_left_pct: float
    reported_right_pct: float

    @property
    def reported_majority(self) -> str:
        return "L" if self.reported_left_pct > self.reported_right_pct else "R"

    def levels(self) -> Dict[str, List[str]]:
        return {
            "sign": [self.left[0], self.right[0]],
            "crowd": [self.left[1], self.right[1]],
            "space": [self.left[2], self.right[2]],
        }


TABLE1_CASES = (
    Table1Case(1, "S+ C+ P+", ("Yes", "High", "High"), ("No", "Med", "Med"), 89.0, 11.0),
    Table1Case(2, "S+ C- P+", ("Yes", "Low", "Low"), ("No", "High", "High"), 4.0, 96.0),
    Table1Case(3, "S+ C- P-", ("Yes", "Med", "Low"), ("No", "High", "High"), 5.0, 95.0),
    Table1Case(4, "C- P+", ("No", "Low", "Med"), ("No", "Med", "Med"), 5.0, 95.0),
    Table1Case(5, "C+ P+", ("No", "Low", "High"), ("No", "Med", "Low"), 6.0, 94.0),
    Table1Case(6, "C- P+", ("No", "Low", "High"), ("No", "Low", "Low"), 27.0, 73.0),
    Table1Case(7, "C- P-", ("No", "High", "Med"), ("No", "Low", "High"), 44.0, 56.0),
    Table1Case(8, "C+ P-", ("No", "High", "Low"), ("No", "Med", "High"), 11.0, 89.0),
)


@dataclass(frozen=True)
class PresetRow:
    case: int
    label: str
    left_pct: float
    right_pct: float
    reported_left_pct: float
    reported_right_pct: float
    majority_match: bool


# Open two-route junction used by the level-encoded cases (route 0 = Left)
SYNTHETIC_JUNCTION: Dict[str, Any] = {
    "name": "synthetic-junction",
    "mode": "synthetic",
    "environment": {
        "walls": [],
        "intersection": {
            "center": [0.0, 0.0],
            "routes": [
                {"id": 0, "portal": [[-4.0, -1.0], [-4.0, 1.0]], "exit": [-15.0, 0.0]},
                {"id": 1, "portal": [[4.0, -1.0], [4.0, 1.0]], "exit": [15.0, 0.0]},
            ],
        },
        "spawn_region": {"xmin": -3.0, "ymin": -15.0, "xmax": 3.0, "ymax": -8.0},
    },
    "agents": {"count": TABLE1_AGENTS},
    "synthetic": {"levels": {"sign": ["No", "No"], "crowd": ["Med", "Med"], "space": ["Med", "Med"]}},
    "tunables": {"v_table": TABLE1_V_TABLE},
    "seed": 0,
}

# Hall splitting into two passages around a central block (route 0 = Left)
_HALL_WALLS = [[
    [-10.0, -16.0], [10.0, -16.0], [10.0, 16.0], [3.0, 16.0], [3.0, 2.0],
    [-3.0, 2.0], [-3.0, 16.0], [-10.0, 16.0],
]]
_HALL_ROUTES = [
    {"id": 0, "portal": [[-10.0, 2.0], [-3.0, 2.0]], "exit": [-6.5, 15.0]},
    {"id": 1, "portal": [[3.0, 2.0], [10.0, 2.0]], "exit": [6.5, 15.0]},
]

REFERENCE_JUNCTION: Dict[str, Any] = {
    "name": "reference-junction",
    "mode": "geometric",
    "environment": {
        "walls": _HALL_WALLS,
        "intersection": {"center": [0.0, 0.0], "routes": _HALL_ROUTES},
        "signs": [{"id": 0, "pos": [-1.5, 2.0], "facing_deg": -90.0, "target_route": 0, "d_vis": 10.0}],
        "exits": [{"label": "Gate A", "pos": [-6.5, 15.0]}, {"label": "Gate B", "pos": [6.5, 15.0]}],
        "spawn_region": {"xmin": -6.0, "ymin": -14.0, "xmax": 6.0, "ymax": -8.0},
    },
    "agents": {"count": 20},
    "crowd": {
        "flows": [
            {"route": 0, "rate": 0.3, "speed": 0.5},
            {"route": 1, "rate": 0.15, "speed": 0.5},
        ],
        "warmup": 30,
    },
    "seed": 0,
}

# Same hall with no sign and the space source off, so only the crowd informs the agent.
# The right passage is busy until a surge fills the left one at tick 10
CROWD_SURGE: Dict[str, Any] = {
    "name": "crowd-surge",
    "mode": "geometric",
    "environment": {
        "walls": _HALL_WALLS,
        "intersection": {"center": [0.0, 0.0], "routes": _HALL_ROUTES},
        "spawn_region": {"xmin": -1.0, "ymin": -15.0, "xmax": 1.0, "ymax": -14.0},
    },
    "agents": {"count": 1},
    "crowd": {
        "flows": [
            {"route": 0, "rate": 0.05, "speed": 0.5},
            {"route": 1, "rate": 0.8, "speed": 0.5},
        ],
        "schedule": [{"tick": 10, "route": 0, "rate": 2.5}],
        "warmup": 30,
    },
    "disabled_sources": ["space"],
    "seed": 0,
}
SURGE_TICK = 10

# Hall with four corridors leaving its far wall, route ids left to right
FOUR_WAY_JUNCTION: Dict[str, Any] = {
    "name": "four-way-junction",
    "mode": "geometric",
    "environment": {
        "walls": [[
            [-12.0, -14.0], [12.0, -14.0], [12.0, 6.0], [11.0, 6.0], [11.0, 14.0], [8.0, 14.0], [8.0, 6.0],
            [5.0, 6.0], [5.0, 14.0], [2.0, 14.0], [2.0, 6.0], [-2.0, 6.0], [-2.0, 14.0], [-5.0, 14.0],
            [-5.0, 6.0], [-8.0, 6.0], [-8.0, 14.0], [-11.0, 14.0], [-11.0, 6.0], [-12.0, 6.0],
        ]],
        "intersection": {
            "center": [0.0, 2.0],
            "routes": [
                {"id": 0, "portal": [[-11.0, 6.0], [-8.0, 6.0]], "exit": [-9.5, 13.0]},
                {"id": 1, "portal": [[-5.0, 6.0], [-2.0, 6.0]], "exit": [-3.5, 13.0]},
                {"id": 2, "portal": [[2.0, 6.0], [5.0, 6.0]], "exit": [3.5, 13.0]},
                {"id": 3, "portal": [[8.0, 6.0], [11.0, 6.0]], "exit": [9.5, 13.0]},
            ],
        },
        "signs": [{"id": 0, "pos": [0.0, 6.0], "facing_deg": -90.0, "target_route": 1, "d_vis": 12.0}],
        "spawn_region": {"xmin": -4.0, "ymin": -12.0, "xmax": 4.0, "ymax": -8.0},
    },
    "agents": {"count": 10},
    "crowd": {
        "flows": [
            {"route": 0, "rate": 0.1, "speed": 0.5},
            {"route": 1, "rate": 0.1, "speed": 0.5},
            {"route": 2, "rate": 0.3, "speed": 0.5},
            {"route": 3, "rate": 0.1, "speed": 0.5},
        ],
        "warmup": 20,
    },
    "seed": 0,
}


def preset_document(name: str) -> Dict[str, Any]:
    """Deep copy of a built-in scenario document."""
    documents = {
        "synthetic-junction": SYNTHETIC_JUNCTION,
        "reference-junction": REFERENCE_JUNCTION,
        "crowd-surge": CROWD_SURGE,
        "four-way-junction": FOUR_WAY_JUNCTION,
    }
    return copy.deepcopy(documents[name])


def table1_scenario(case: Table1Case, seed: int = 0, agents: int = TABLE1_AGENTS, mirrored: bool = False) -> Scenario:
    """Synthetic scenario for one case; ``mirrored`` swaps the Left/Right labels."""
    doc = preset_document("synthetic-junction")
    levels = case.levels()
    if mirrored:
        levels = {name: values[::-1] for name, values in levels.items()}
    doc["synthetic"]["levels"] = levels
    doc["seed"] = seed
    doc["agents"]["count"] = agents
    doc["name"] = f"table1-case{case.case}"
    return build_scenario(doc)


def run_table1_case(case: Table1Case, seed: int = 0, agents: int = TABLE1_AGENTS) -> PresetRow:
    result = run(table1_scenario(case, seed=seed, agents=agents))
    _, percent = route_shares(result)
    left, right = percent[0], percent[1]
    majority = "L" if left > right else "R" if right > left else None
    return PresetRow(
        case=case.case,
        label=case.label,
        left_pct=left,
        right_pct=right,
        reported_left_pct=case.reported_left_pct,
        reported_right_pct=case.reported_right_pct,
        majority_match=majority == case.reported_majority,
    )


def _table1_task(args: Tuple[Table1Case, int, int]) -> PresetRow:
    return run_table1_case(*args)


def run_table1(seed: int = 0, agents: int = TABLE1_AGENTS, workers: int = 1) -> List[PresetRow]:
    """Run all eight level-encoded cases, in case order."""
    tasks = [(case, seed, agents) for case in TABLE1_CASES]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(_table1_task, tasks))
    return [_table1_task(task) for task in tasks]


def run_fig3(seeds: int = 20, workers: int = 1, scenario: Optional[Scenario] = None) -> List[SweepRow]:
    """Memory sweep over W = 1..6 on the reference junction."""
    scenario = scenario or build_scenario(preset_document("reference-junction"))
    return sweep_memory(scenario, FIG3_WINDOWS, seeds, workers=workers)
