"""Points, angular sectors and angle helpers."""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

# Tolerance for vertex grazing and collinearity
EPS_GEOM = 1e-9

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Point2:
    """A location in the plane, in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")

    @classmethod
    def of(cls, xy) -> "Point2":
        """Build a point from any (x, y) pair."""
        return cls(float(xy[0]), float(xy[1]))

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def bearing_to(self, other: "Point2") -> float:
        """Absolute direction from this point towards ``other`` in radians."""
        return math.atan2(other.y - self.y, other.x - self.x)

    def moved(self, heading: float, distance: float) -> "Point2":
        return Point2(self.x + distance * math.cos(heading), self.y + distance * math.sin(heading))


@dataclass(frozen=True)
class Sector:
    """Angular sector ``[start, end]`` (absolute radians, ``start <= end``) assigned to one route."""

    route: int
    start: float
    end: float

    @property
    def width(self) -> float:
        return max(0.0, self.end - self.start)

    @property
    def is_empty(self) -> bool:
        return self.width <= EPS_GEOM


def wrap_angle(angle: float) -> float:
    """Wrap an angle to ``(-pi, pi]``."""
    wrapped = math.remainder(angle, TWO_PI)
    return math.pi if wrapped == -math.pi else wrapped


def cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """z-component of the cross product for (..., 2) arrays."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
