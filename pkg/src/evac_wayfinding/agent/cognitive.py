"""Per-agent perception and decision cycle.

Every tick an agent perceives its surroundings, refreshes its memory,
fuses the sources into a confidence distribution and takes one step,
keeping its gaze on the decision point.
Every ``memory_window`` ticks the macro-decision rule is evaluated. The
agent commits to a route once it reaches the decision point or runs out
of deliberation time.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import AgentConfig
from ..exceptions import SourceError
from ..fusion.credibility import MacroDecision, fuse, macro_decide, normalized_entropy
from ..geometry.environment import Environment, Intersection, line_of_sight
from ..geometry.isovist import compute_isovist, count_in_sector, isovist_measures, partition_fov
from ..geometry.primitives import Point2, wrap_angle
from ..sources.distributions import PHYSICAL_SOURCES, Observation, RouteObservation, SignSignal, uniform
from ..sources.models import MemoryBuffer, f_crowd, f_mem, f_sign, f_space, sign_visibility

logger = logging.getLogger(__name__)

# Tolerance when comparing micro-decision scores
_SCORE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TraceEntry:
    """One macro evaluation."""

    tick: int
    g: np.ndarray
    decision: MacroDecision

    @property
    def confidence(self) -> float:
        return float(np.max(self.g)) if self.g.size else 0.0

    @property
    def leading_route(self) -> int:
        """Route with the highest confidence, whether or not the threshold was met."""
        return int(np.argmax(self.g))


@dataclass(frozen=True, eq=False)
class AgentState:
    """Immutable snapshot of one focal agent."""

    id: int
    position: Point2
    heading: float

    # Walking speed in m/s (reporting only)
    speed: float
    memory: MemoryBuffer

    # Number of completed ticks
    tick: int = 0
    committed_route: MacroDecision = None
    commit_tick: Optional[int] = None
    prediction_trace: Tuple[TraceEntry, ...] = ()

    # Confidence distribution of the most recent tick
    latest_g: Optional[np.ndarray] = None

    # Most recent macro-decision that was not "none"
    last_decision: MacroDecision = None

    @property
    def is_committed(self) -> bool:
        return self.committed_route is not None

    @property
    def prediction(self) -> Tuple[int, float]:
        """``(route, confidence)`` of the latest macro evaluation, ``(-1, 0.0)`` before the first one."""
        if not self.prediction_trace:
            return -1, 0.0
        latest = self.prediction_trace[-1]
        return (-1 if latest.decision is None else latest.decision), latest.confidence


@dataclass(frozen=True, eq=False)
class Perception:
    observation: Optional[Observation]
    matrix: np.ndarray
    memory: MemoryBuffer


def new_agent(agent_id: int, position: Point2, heading: float, cfg: AgentConfig, tick_s: float = 0.4) -> AgentState:
    return AgentState(
        id=agent_id,
        position=position,
        heading=heading,
        speed=cfg.step_len / tick_s,
        memory=MemoryBuffer(cfg.memory_window),
    )


def observe(env: Environment, intersection: Intersection, crowd_positions: Sequence[Point2],
            position: Point2, heading: float, cfg: AgentConfig, tick: int = 0) -> Observation:
    """Collect per-route sign, crowd and spatial observations from one viewpoint.

    Args:
        env: Environment
        intersection: Decision point whose routes are observed
        crowd_positions: Positions of every other visible agent
        position: Viewpoint
        heading: Facing direction
        cfg: Agent configuration (field of view, ray cap)
        tick: Tick index stored on the observation

    Returns:
        Observation with one entry per route
    """
    iso = compute_isovist(env, position, heading, cfg.fov, cfg.d_cap)
    sectors = partition_fov(position, heading, cfg.fov, intersection)

    best_signs: List[Optional[SignSignal]] = [None] * intersection.route_count
    for sign in env.signs:
        v = sign_visibility(env, position, heading, sign, cfg.fov)
        if v <= 0.0:
            continue
        current = best_signs[sign.target_route]
        if current is None or (v, -sign.id) > (current.visibility, -current.sign_id):
            best_signs[sign.target_route] = SignSignal(
                sign_id=sign.id,
                visibility=v,
                view_angle=abs(wrap_angle(position.bearing_to(sign.position) - heading)),
                distance=position.distance_to(sign.position),
            )

    routes = tuple(
        RouteObservation(
            sign=best_signs[i],
            crowd_count=count_in_sector(iso, sector, crowd_positions),
            measures=isovist_measures(iso, sector),
        )
        for i, sector in enumerate(sectors)
    )
    return Observation(routes=routes, position=position, heading=heading, tick=tick)


def physical_rows(obs: Observation, cfg: AgentConfig) -> np.ndarray:
    """Sign, crowd and space distributions for one observation, disabled sources made uniform."""
    rows = {
        "sign": f_sign(obs),
        "crowd": f_crowd(obs, cfg.crowd_smoothing),
        "space": f_space(obs, cfg.measure_weights),
    }
    return mask_sources(np.vstack([rows[name] for name in PHYSICAL_SOURCES]), cfg.disabled_sources)


def mask_sources(rows: np.ndarray, disabled: Sequence[str]) -> np.ndarray:
    if not disabled:
        return rows
    rows = np.array(rows, dtype=float)
    for name in disabled:
        rows[PHYSICAL_SOURCES.index(name)] = uniform(rows.shape[1])
    return rows


def assemble(rows: np.ndarray, memory: MemoryBuffer, tick: int, cfg: AgentConfig,
             observation: Optional[Observation] = None) -> Perception:
    """Push the physical rows into memory and append the memory row."""
    memory = memory.pushed(tick, rows)
    matrix = np.vstack([rows, f_mem(memory, cfg.decay)])
    return Perception(observation=observation, matrix=matrix, memory=memory)


def perceive(env: Environment, intersection: Intersection, crowd_positions: Sequence[Point2],
             state: AgentState, cfg: AgentConfig) -> Perception:
    """Observe from the agent's position and build the 4 x M source matrix (sign, crowd, space, memory)."""
    tick = state.tick + 1
    obs = observe(env, intersection, crowd_positions, state.position, state.heading, cfg, tick)
    return assemble(physical_rows(obs, cfg), state.memory, tick, cfg, observation=obs)


def candidate_headings(state: AgentState, cfg: AgentConfig) -> np.ndarray:
    """Absolute headings evenly spread over the field of view, leftmost last."""
    half = cfg.fov / 2.0
    return state.heading + np.linspace(-half, half, cfg.candidate_headings)


def candidate_positions(env: Environment, state: AgentState, cfg: AgentConfig) -> List[Point2]:
    """Neighbouring positions one step away inside the field of view.

    Candidates inside walls (or whose step crosses one) are dropped. When
    every candidate is blocked the current position is the only option.
    """
    return [pos for pos, _ in _reachable(env, state, cfg)] or [state.position]


def _reachable(env: Environment, state: AgentState, cfg: AgentConfig) -> List[Tuple[Point2, float]]:
    out = []
    for heading in candidate_headings(state, cfg):
        pos = state.position.moved(float(heading), cfg.step_len)
        if env.is_free(pos) and line_of_sight(env, state.position, pos):
            out.append((pos, float(heading)))
    return out


def micro_score(obs: Observation, cfg: AgentConfig) -> float:
    """Largest route probability offered by either signage or spatial layout."""
    m = obs.route_count
    sign = uniform(m) if "sign" in cfg.disabled_sources else f_sign(obs)
    space = uniform(m) if "space" in cfg.disabled_sources else f_space(obs, cfg.measure_weights)
    return float(max(sign.max(), space.max()))


def micro_decide(env: Environment, intersection: Intersection, state: AgentState, cfg: AgentConfig) -> Point2:
    """Pick the next position among the reachable candidates.

    Each candidate is observed from its position while facing the decision
    point, and the one that maximises the micro score wins. Only candidates
    that bring the agent closer to the decision point compete, unless none
    does. Ties go to the smallest turn, then to the left.
    """
    reachable = _reachable(env, state, cfg)
    if not reachable:
        return state.position

    center = intersection.center
    here = state.position.distance_to(center)
    approaching = [(p, h) for p, h in reachable if p.distance_to(center) < here]
    pool = approaching or reachable

    scored = []
    for pos, heading in pool:
        obs = observe(env, intersection, (), pos, facing(pos, center, heading), cfg, state.tick + 1)
        turn = wrap_angle(heading - state.heading)
        scored.append((micro_score(obs, cfg), turn, pos))

    best_score = max(score for score, _, _ in scored)
    ties = [(turn, pos) for score, turn, pos in scored if score >= best_score - _SCORE_TOL]
    _, chosen = min(ties, key=lambda item: (round(abs(item[0]), 9), -item[0]))
    return chosen


def facing(position: Point2, center: Point2, fallback: float) -> float:
    """Bearing from ``position`` to the decision point; ``fallback`` once standing on it."""
    if position.distance_to(center) <= 1e-9:
        return fallback
    return position.bearing_to(center)


def _step_towards(position: Point2, target: Point2, step_len: float) -> Point2:
    d = position.distance_to(target)
    if d <= step_len:
        return target
    return position.moved(position.bearing_to(target), step_len)


def tick(env: Environment, intersection: Intersection, crowd_positions: Sequence[Point2],
         state: AgentState, cfg: AgentConfig, synthetic_rows: Optional[np.ndarray] = None) -> AgentState:
    """Advance one deliberating agent by one tick.

    With ``synthetic_rows`` the physical sources are taken from that (3, M)
    array instead of being perceived, and the agent walks straight at the
    decision point.

    Args:
        env: Environment
        intersection: Decision point
        crowd_positions: Everyone the agent may see this tick
        state: Current state (must not be committed)
        cfg: Agent configuration
        synthetic_rows: Optional physical-source rows overriding perception

    Returns:
        The next state

    Raises:
        SourceError: If the agent is already committed
    """
    if state.is_committed:
        raise SourceError(f"agent {state.id} is already committed to route {state.committed_route}")

    t = state.tick + 1
    if synthetic_rows is None:
        perception = perceive(env, intersection, crowd_positions, state, cfg)
        position = micro_decide(env, intersection, state, cfg)
    else:
        perception = assemble(mask_sources(synthetic_rows, cfg.disabled_sources), state.memory, t, cfg)
        position = _step_towards(state.position, intersection.center, cfg.step_len)

    heading = facing(position, intersection.center, state.heading)
    g = fuse(perception.matrix, cfg.epsilon)

    trace = state.prediction_trace
    last_decision = state.last_decision
    if t % cfg.memory_window == 0:
        decision = macro_decide(g, cfg.theta)
        trace = trace + (TraceEntry(tick=t, g=g, decision=decision),)
        if decision is not None:
            last_decision = decision
        logger.debug(f"agent {state.id} tick {t}: G={np.round(g, 4).tolist()} decision={decision}")

    committed, commit_tick = None, None
    near = position.distance_to(intersection.center) <= cfg.stop_radius
    if near or t >= cfg.max_deliberation_ticks:
        committed = last_decision if last_decision is not None else int(np.argmax(g))
        commit_tick = t
        logger.debug(f"agent {state.id} commits to route {committed} at tick {t} ({'arrived' if near else 'deadline'})")

    return replace(
        state,
        position=position,
        heading=heading,
        memory=perception.memory,
        tick=t,
        committed_route=committed,
        commit_tick=commit_tick,
        prediction_trace=trace,
        latest_g=g,
        last_decision=last_decision,
    )


def prediction_entropy(trace: Sequence[TraceEntry]) -> float:
    """Mean normalised entropy of the renormalised confidence over a trace.

    A confidence distribution with no mass counts as maximally uncertain.

    Raises:
        SourceError: If the trace is empty
    """
    if not trace:
        raise SourceError("prediction entropy needs at least one macro evaluation")
    values = []
    for entry in trace:
        total = float(np.sum(entry.g))
        values.append(1.0 if total <= 0.0 else normalized_entropy(entry.g / total))
    return float(np.mean(values))


__all__ = [
    "AgentState", "Perception", "TraceEntry", "assemble", "candidate_headings", "candidate_positions",
    "facing", "mask_sources", "micro_decide", "micro_score", "new_agent", "observe", "perceive", "physical_rows",
    "prediction_entropy", "tick",
]
