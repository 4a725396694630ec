"""Tick-synchronous world loop."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..agent.cognitive import AgentState, new_agent, prediction_entropy, tick
from ..exceptions import ScenarioError
from ..sources.levels import levels_to_distributions, perturb
from .crowd import CrowdState, initial_crowd, step_crowd
from .scenario import Scenario

logger = logging.getLogger(__name__)

_MAX_SPAWN_ATTEMPTS = 1000


@dataclass(frozen=True)
class TrajectoryRow:
    tick: int
    agent_id: int
    x: float
    y: float
    heading_rad: float
    pred_route: int
    pred_conf: float
    committed_route: int


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run."""

    scenario_name: str
    seed: int
    route_count: int
    agents: Tuple[AgentState, ...]
    trajectories: Tuple[TrajectoryRow, ...]
    evac_time_s: float
    mean_prediction_entropy: Optional[float]
    uncommitted: Tuple[int, ...]
    ticks_run: int
    config_echo: Dict = field(default_factory=dict)

    @property
    def committed(self) -> List[AgentState]:
        return [a for a in self.agents if a.is_committed]

    @property
    def committed_count(self) -> int:
        return len(self.committed)

    @property
    def route_counts(self) -> Dict[int, int]:
        return route_shares(self)[0]

    @property
    def route_percent(self) -> Dict[int, float]:
        return route_shares(self)[1]


def route_shares(result: RunResult) -> Tuple[Dict[int, int], Dict[int, float]]:
    """Committed agents per route, as counts and as percentages of all committed agents."""
    counts = {route: 0 for route in range(result.route_count)}
    for agent in result.committed:
        counts[agent.committed_route] += 1
    total = sum(counts.values())
    percent = {route: (100.0 * n / total if total else 0.0) for route, n in counts.items()}
    return counts, percent


def spawn_agents(scenario: Scenario, rng: np.random.Generator) -> List[AgentState]:
    """Place agents uniformly in the spawn region, facing the intersection."""
    env = scenario.environment
    center = env.intersection.center
    cfg = scenario.agent_config
    agents = []
    for agent_id in range(scenario.agents.count):
        region = env.spawn_regions[0]
        for _ in range(_MAX_SPAWN_ATTEMPTS):
            pos = region.sample(rng)
            if env.is_free(pos) and pos.distance_to(center) > 0.0:
                break
        else:
            raise ScenarioError("could not place an agent inside the spawn region", field="environment.spawn_region")
        agents.append(new_agent(agent_id, pos, pos.bearing_to(center), cfg, scenario.tunables.tick_s))
    return agents


def run(scenario: Scenario) -> RunResult:
    """Simulate a scenario until every agent has committed or the tick limit is hit.

    Per tick: every deliberating agent perceives the same snapshot (crowd
    plus the other deliberating agents), agents are advanced in id order,
    then the background crowd moves. Synthetic scenarios replace perception
    by noisy level-derived source rows.

    Args:
        scenario: Validated scenario

    Returns:
        RunResult with trajectories, traces and metrics
    """
    seeds = np.random.SeedSequence(scenario.seed)
    spawn_seq, _, noise_seq = seeds.spawn(3)
    agents = spawn_agents(scenario, np.random.default_rng(spawn_seq))
    noise_rngs = [np.random.default_rng(s) for s in noise_seq.spawn(len(agents))]

    env = scenario.environment
    intersection = env.intersection
    cfg = scenario.agent_config
    synthetic = scenario.mode == "synthetic"
    base_rows = levels_to_distributions(scenario.levels, scenario.tunables.v_table) if synthetic else None

    crowd: Optional[CrowdState] = None
    if not synthetic:
        crowd = initial_crowd(scenario)
        while crowd.tick < 0:
            crowd = step_crowd(scenario, crowd)

    finished: Dict[int, AgentState] = {}
    active = list(agents)
    rows: List[TrajectoryRow] = []
    t = 0
    while active and t < scenario.tunables.tick_limit:
        t += 1
        snapshot = [a.position for a in active]
        background = crowd.positions if crowd is not None else []
        advanced = []
        for k, agent in enumerate(active):
            if synthetic:
                noisy = perturb(base_rows, noise_rngs[agent.id], scenario.tunables.noise)
                nxt = tick(env, intersection, (), agent, cfg, synthetic_rows=noisy)
            else:
                others = background + snapshot[:k] + snapshot[k + 1:]
                nxt = tick(env, intersection, others, agent, cfg)
            rows.append(_row(nxt))
            if nxt.is_committed:
                finished[nxt.id] = nxt
            else:
                advanced.append(nxt)
        active = advanced
        if crowd is not None:
            crowd = step_crowd(scenario, crowd)

    if active:
        logger.warning(f"Tick limit {scenario.tunables.tick_limit} reached with {len(active)} agent(s) undecided")
    for agent in active:
        finished[agent.id] = agent

    final = tuple(finished[i] for i in sorted(finished))
    commit_ticks = [a.commit_tick for a in final if a.commit_tick is not None]
    entropies = [prediction_entropy(a.prediction_trace) for a in final if a.prediction_trace]

    return RunResult(
        scenario_name=scenario.name,
        seed=scenario.seed,
        route_count=scenario.route_count,
        agents=final,
        trajectories=tuple(rows),
        evac_time_s=max(commit_ticks, default=0) * scenario.tunables.tick_s,
        mean_prediction_entropy=float(np.mean(entropies)) if entropies else None,
        uncommitted=tuple(a.id for a in final if not a.is_committed),
        ticks_run=t,
        config_echo={**scenario.config_echo(), "seed": scenario.seed},
    )


def _row(agent: AgentState) -> TrajectoryRow:
    pred_route, pred_conf = agent.prediction
    return TrajectoryRow(
        tick=agent.tick,
        agent_id=agent.id,
        x=agent.position.x,
        y=agent.position.y,
        heading_rad=agent.heading,
        pred_route=pred_route,
        pred_conf=pred_conf,
        committed_route=agent.committed_route if agent.committed_route is not None else -1,
    )
