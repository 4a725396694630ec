"""Scripted background crowd.

Background walkers have no cognition: they appear at the start of their
route's path at the scripted rate, walk along it at constant speed and
disappear at its end. They exist to be seen by focal agents.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Tuple

import numpy as np

from ..geometry.primitives import Point2
from .scenario import FlowSpec, Scenario

logger = logging.getLogger(__name__)

# Stream tag separating crowd randomness from spawn/noise randomness
_CROWD_STREAM = 1


@dataclass(frozen=True)
class Walker:
    id: int
    route: int
    flow: int
    path: Tuple[Point2, ...]

    # Distance walked along the path
    progress: float = 0.0

    @property
    def length(self) -> float:
        return sum(a.distance_to(b) for a, b in zip(self.path, self.path[1:]))

    @property
    def position(self) -> Point2:
        remaining = self.progress
        for a, b in zip(self.path, self.path[1:]):
            seg = a.distance_to(b)
            if remaining <= seg:
                t = remaining / seg if seg > 0.0 else 0.0
                return Point2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
            remaining -= seg
        return self.path[-1]


@dataclass(frozen=True)
class CrowdState:
    """Background crowd at the end of tick ``tick``."""

    tick: int
    walkers: Tuple[Walker, ...] = ()

    # Fractional spawn credit per flow
    credit: Tuple[float, ...] = ()
    next_id: int = 0

    # Walkers that reached the end of their path, per route
    exited: Tuple[int, ...] = ()

    @property
    def positions(self) -> List[Point2]:
        return [w.position for w in self.walkers]

    def count_on_route(self, route: int) -> int:
        return sum(1 for w in self.walkers if w.route == route)


def initial_crowd(scenario: Scenario) -> CrowdState:
    """Empty crowd positioned ``warmup`` ticks before the first run tick."""
    return CrowdState(
        tick=-scenario.crowd.warmup,
        credit=tuple(0.0 for _ in scenario.crowd.flows),
        exited=tuple(0 for _ in range(scenario.route_count)),
    )


def flow_rate(scenario: Scenario, index: int, tick: int) -> float:
    """Rate of flow ``index`` at ``tick``: the latest schedule entry for its route, else the base rate."""
    flow = scenario.crowd.flows[index]
    rate = flow.rate
    latest = -1
    for entry in scenario.crowd.schedule:
        if entry.route == flow.route and latest <= entry.tick <= tick:
            rate, latest = entry.rate, entry.tick
    return rate


def flow_path(scenario: Scenario, flow: FlowSpec) -> Tuple[Point2, ...]:
    if flow.path is not None:
        return tuple(Point2.of(xy) for xy in flow.path)
    route = scenario.environment.intersection.routes[flow.route]
    return (route.midpoint, route.exit)


def step_crowd(scenario: Scenario, state: CrowdState) -> CrowdState:
    """Advance the background crowd by one tick.

    Walkers move first and leave at the end of their path; each flow then
    spawns ``floor(credit + rate)`` new walkers at the start of its path,
    spread laterally by a seeded offset.

    Args:
        scenario: Scenario with the crowd script
        state: Crowd after the previous tick

    Returns:
        Crowd after this tick
    """
    t = state.tick + 1
    flows = scenario.crowd.flows

    exited = list(state.exited)
    walkers = []
    for walker in state.walkers:
        moved = replace(walker, progress=walker.progress + flows[walker.flow].speed)
        if moved.progress >= moved.length:
            exited[walker.route] += 1
        else:
            walkers.append(moved)

    credit = list(state.credit)
    next_id = state.next_id
    for i, flow in enumerate(flows):
        credit[i] += flow_rate(scenario, i, t)
        n = int(math.floor(credit[i] + 1e-12))
        credit[i] -= n
        if n == 0:
            continue
        rng = np.random.default_rng([scenario.seed, _CROWD_STREAM, t + scenario.crowd.warmup, i])
        base = flow_path(scenario, flow)
        for offset in rng.uniform(-flow.spread / 2.0, flow.spread / 2.0, size=n):
            walkers.append(Walker(id=next_id, route=flow.route, flow=i, path=_shifted(base, float(offset))))
            next_id += 1

    if t == 1 or t % 50 == 0:
        logger.debug(f"crowd tick {t}: {len(walkers)} walkers, exited {exited}")
    return CrowdState(tick=t, walkers=tuple(walkers), credit=tuple(credit), next_id=next_id, exited=tuple(exited))


def _shifted(path: Tuple[Point2, ...], offset: float) -> Tuple[Point2, ...]:
    """Shift a path sideways (perpendicular to its first segment)."""
    if offset == 0.0:
        return path
    a, b = path[0], path[1]
    heading = a.bearing_to(b)
    dx, dy = -math.sin(heading) * offset, math.cos(heading) * offset
    return tuple(Point2(p.x + dx, p.y + dy) for p in path)
