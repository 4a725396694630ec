"""Geometry package: environment, visibility and isovist measures."""

from .environment import Environment, Exit, Intersection, Route, Sign, SpawnRegion, line_of_sight
from .isovist import (
    EdgeKind,
    IsovistMeasures,
    IsovistPolygon,
    compute_isovist,
    count_in_sector,
    isovist_measures,
    partition_fov,
)
from .primitives import EPS_GEOM, Point2, Sector, wrap_angle

__all__ = [
    "EPS_GEOM", "EdgeKind", "Environment", "Exit", "Intersection", "IsovistMeasures", "IsovistPolygon",
    "Point2", "Route", "Sector", "Sign", "SpawnRegion", "compute_isovist", "count_in_sector",
    "isovist_measures", "line_of_sight", "partition_fov", "wrap_angle",
]
