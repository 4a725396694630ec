"""Polygonal environment: walls, intersection routes, signs, exits and spawn regions."""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import shapely
from shapely.geometry import LineString, Point, Polygon
from shapely.geometry.polygon import orient

from .primitives import EPS_GEOM, Point2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Route:
    """One macro-decision at an intersection: a portal segment leading into a corridor."""

    id: int
    portal: Tuple[Point2, Point2]

    # Far end of the corridor behind the portal (used for crowd paths)
    exit: Optional[Point2] = None

    @property
    def midpoint(self) -> Point2:
        a, b = self.portal
        return Point2((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)


@dataclass(frozen=True)
class Intersection:
    """A decision point with ``M >= 2`` routes."""

    center: Point2
    routes: Tuple[Route, ...]

    @property
    def route_count(self) -> int:
        return len(self.routes)


@dataclass(frozen=True)
class Sign:
    """A directional sign pointing towards one route."""

    id: int
    position: Point2

    # Direction the sign face looks at, radians
    facing: float
    target_route: int
    d_vis: float


@dataclass(frozen=True)
class SpawnRegion:
    """Axis-aligned rectangle in which focal agents are spawned."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def sample(self, rng: np.random.Generator) -> Point2:
        return Point2(float(rng.uniform(self.xmin, self.xmax)), float(rng.uniform(self.ymin, self.ymax)))


@dataclass(frozen=True)
class Exit:
    """A labeled exit location."""

    label: str
    position: Point2


@dataclass(frozen=True)
class Environment:
    """Walls plus everything an agent can perceive or walk to.

    ``walls[0]`` is the outer boundary (counter-clockwise); the remaining
    polygons are obstacles (clockwise holes). An environment without walls
    is the open plane.
    """

    walls: Tuple[Tuple[Point2, ...], ...]
    intersections: Tuple[Intersection, ...]
    signs: Tuple[Sign, ...] = ()
    exits: Tuple[Exit, ...] = ()
    spawn_regions: Tuple[SpawnRegion, ...] = ()

    @property
    def intersection(self) -> Intersection:
        return self.intersections[0]

    @property
    def is_open(self) -> bool:
        return not self.walls

    @cached_property
    def free_space(self) -> Optional[Polygon]:
        """Walkable region as a shapely polygon, or None for the open plane."""
        if self.is_open:
            return None
        outer = [p.as_tuple() for p in self.walls[0]]
        holes = [[p.as_tuple() for p in ring] for ring in self.walls[1:]]
        polygon = orient(Polygon(outer, holes), sign=1.0)
        shapely.prepare(polygon)
        return polygon

    @cached_property
    def free_boundary(self):
        if self.free_space is None:
            return None
        boundary = self.free_space.boundary
        shapely.prepare(boundary)
        return boundary

    @cached_property
    def segments(self) -> np.ndarray:
        """All wall edges as an ``(E, 2, 2)`` array."""
        edges = []
        for ring in self.walls:
            pts = [p.as_tuple() for p in ring]
            for i in range(len(pts)):
                a, b = pts[i], pts[(i + 1) % len(pts)]
                if a != b:
                    edges.append((a, b))
        if not edges:
            return np.zeros((0, 2, 2))
        return np.asarray(edges, dtype=float)

    def is_free(self, point: Point2) -> bool:
        """True when ``point`` lies strictly inside the walkable region."""
        if self.free_space is None:
            return True
        return bool(self.free_space.contains(Point(point.x, point.y)))


def line_of_sight(env: Environment, a: Point2, b: Point2) -> bool:
    """Check whether segment ``ab`` is unobstructed.

    Grazing contact with a wall (within ``EPS_GEOM``) counts as blocked.

    Args:
        env: Environment
        a: First endpoint (free space)
        b: Second endpoint (free space)

    Returns:
        True iff the segment touches no wall
    """
    if env.free_space is None:
        return True
    if a == b:
        return env.is_free(a)
    segment = LineString([a.as_tuple(), b.as_tuple()])
    if not env.free_space.contains(segment):
        return False
    return env.free_boundary.distance(segment) > EPS_GEOM
