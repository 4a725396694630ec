"""Route distributions, observations and qualitative source levels."""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import SourceError
from ..geometry.isovist import IsovistMeasures
from ..geometry.primitives import Point2

# Physical information sources, in SourceMatrix row order (memory is appended last)
PHYSICAL_SOURCES = ("sign", "crowd", "space")
SOURCE_ORDER = PHYSICAL_SOURCES + ("memory",)

SIGN_LEVELS = ("Yes", "No")
INTENSITY_LEVELS = {"High": 3.0, "Med": 2.0, "Low": 1.0}

_SUM_TOL = 1e-9


def uniform(m: int) -> np.ndarray:
    """Maximum-entropy distribution over ``m`` routes."""
    return np.full(m, 1.0 / m)


def check_distribution(p, m: Optional[int] = None) -> np.ndarray:
    """Validate and return a ProbabilityOverRoutes as a float array.

    Raises:
        SourceError: If entries are negative/non-finite, the sum differs from 1 or the length is wrong
    """
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise SourceError(f"distribution must be a non-empty vector, got shape {arr.shape}")
    if m is not None and arr.size != m:
        raise SourceError(f"distribution has {arr.size} entries, expected {m}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise SourceError(f"distribution has negative or non-finite entries: {arr}")
    if abs(arr.sum() - 1.0) > _SUM_TOL:
        raise SourceError(f"distribution sums to {arr.sum():.12f}, not 1")
    return arr


@dataclass(frozen=True)
class SignSignal:
    """The best visible sign pointing at one route."""

    sign_id: int
    visibility: float

    # Angle between the viewer's heading and the direction to the sign
    view_angle: float
    distance: float


@dataclass(frozen=True)
class RouteObservation:
    sign: Optional[SignSignal]
    crowd_count: int
    measures: IsovistMeasures


@dataclass(frozen=True)
class Observation:
    """Everything perceived from one location at one tick."""

    routes: Tuple[RouteObservation, ...]
    position: Point2
    heading: float
    tick: int

    def __post_init__(self):
        if any(r.crowd_count < 0 for r in self.routes):
            raise SourceError("crowd counts must be non-negative")

    @property
    def route_count(self) -> int:
        return len(self.routes)

    @classmethod
    def from_counts(cls, counts: Sequence[int], measures: Optional[Sequence[IsovistMeasures]] = None,
                    signs: Optional[Sequence[Optional[SignSignal]]] = None, tick: int = 0) -> "Observation":
        """Build an observation directly from per-route values (used by synthetic fixtures)."""
        m = len(counts)
        measures = measures or [IsovistMeasures.zero()] * m
        signs = signs or [None] * m
        routes = tuple(RouteObservation(s, int(c), ms) for s, c, ms in zip(signs, counts, measures))
        return cls(routes=routes, position=Point2(0.0, 0.0), heading=0.0, tick=tick)


@dataclass(frozen=True)
class SourceLevels:
    """Qualitative per-route levels of the three physical sources.

    ``sign`` uses Yes/No, ``crowd`` and ``space`` use High/Med/Low.
    """

    sign: Tuple[str, ...]
    crowd: Tuple[str, ...]
    space: Tuple[str, ...]

    def __post_init__(self):
        m = len(self.sign)
        if m < 2 or len(self.crowd) != m or len(self.space) != m:
            raise SourceError("sign, crowd and space levels must all list the same M >= 2 routes")
        if any(level not in SIGN_LEVELS for level in self.sign):
            raise SourceError(f"sign levels must be Yes/No, got {list(self.sign)}")
        for name in ("crowd", "space"):
            bad = [level for level in getattr(self, name) if level not in INTENSITY_LEVELS]
            if bad:
                raise SourceError(f"{name} levels must be High/Med/Low, got {bad}")
        if sum(level == "Yes" for level in self.sign) > 1:
            raise SourceError("at most one route may have a Yes sign level")

    @property
    def route_count(self) -> int:
        return len(self.sign)

    @classmethod
    def from_mapping(cls, data: Dict[str, Sequence[str]]) -> "SourceLevels":
        return cls(tuple(data["sign"]), tuple(data["crowd"]), tuple(data["space"]))

    def mirrored(self) -> "SourceLevels":
        """Same levels with the route order reversed (label swap)."""
        return SourceLevels(self.sign[::-1], self.crowd[::-1], self.space[::-1])
