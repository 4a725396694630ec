"""Memory-window sweep: prediction entropy as a function of W."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ScenarioError
from .runner import run
from .scenario import Scenario, build_scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRow:
    window: int
    mean_entropy: float
    std_entropy: float
    n_seeds: int


def seeds_for(scenario: Scenario, n_seeds: int) -> List[int]:
    return [scenario.seed + k for k in range(n_seeds)]


def sweep_memory(scenario: Scenario, w_values: Sequence[int], n_seeds: int, workers: int = 1) -> List[SweepRow]:
    """Run the scenario for every memory window and seed and aggregate the prediction entropy.

    Seeds are ``scenario.seed, scenario.seed + 1, ...``. Runs without any
    macro evaluation are left out of the aggregate.

    Args:
        scenario: Base scenario
        w_values: Memory windows to try
        n_seeds: Seeds per window
        workers: Worker processes (1 runs inline)

    Returns:
        One row per window, in the order given
    """
    if not w_values:
        raise ScenarioError("at least one memory window is required", field="W")
    if n_seeds < 1:
        raise ScenarioError(f"n_seeds must be >= 1, got {n_seeds}", field="seeds")

    tasks = [(w, seed) for w in w_values for seed in seeds_for(scenario, n_seeds)]
    document = scenario.document.model_dump(by_alias=True)
    overrides = dict(scenario.overrides)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            entropies = list(executor.map(_entropy_task, [(document, overrides, w, s) for w, s in tasks]))
    else:
        entropies = [_entropy_of(scenario, w, s) for w, s in tasks]

    rows = []
    for w in w_values:
        values = [e for (tw, _), e in zip(tasks, entropies) if tw == w and e is not None]
        rows.append(SweepRow(
            window=w,
            mean_entropy=float(np.mean(values)) if values else float("nan"),
            std_entropy=float(np.std(values, ddof=1)) if len(values) > 1 else 0.0,
            n_seeds=len(values),
        ))
    return rows


def _entropy_of(scenario: Scenario, window: int, seed: int) -> Optional[float]:
    result = run(scenario.with_overrides(memory_window=window, seed=seed))
    logger.debug(f"W={window} seed={seed}: entropy {result.mean_prediction_entropy}")
    return result.mean_prediction_entropy


def _entropy_task(args: Tuple[Dict[str, Any], Dict[str, Any], int, int]) -> Optional[float]:
    document, overrides, window, seed = args
    scenario = build_scenario(document).with_overrides(**overrides)
    return _entropy_of(scenario, window, seed)
