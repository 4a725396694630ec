"""Constituent macro-decision models: signage, spatial layout, crowd flow and memory."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..exceptions import SourceError
from ..geometry.environment import Environment, Sign, line_of_sight
from ..geometry.primitives import Point2, wrap_angle
from .distributions import Observation, uniform

logger = logging.getLogger(__name__)

DEFAULT_MEASURE_WEIGHTS = (0.25, 0.25, 0.25, 0.25)

# Meters in front of a sign face used for the line-of-sight test
SIGN_STANDOFF = 1e-3


def sign_visibility(env: Environment, pos: Point2, heading: float, sign: Sign,
                    fov: float = 2.0 * math.pi / 3.0) -> float:
    """Visibility of a sign from a viewpoint, in ``[0, 1]``.

    ``v = max(0, cos(view_angle)) * max(0, 1 - d / d_vis)``; zero when the sign
    is occluded, outside the field of view, or seen from behind its face.

    Args:
        env: Environment (for occlusion)
        pos: Viewer position
        heading: Viewer heading
        sign: Sign to evaluate
        fov: Viewer field of view

    Returns:
        Visibility score
    """
    d = pos.distance_to(sign.position)
    if d <= 0.0:
        return 1.0
    view_angle = abs(wrap_angle(pos.bearing_to(sign.position) - heading))
    if view_angle > fov / 2.0:
        return 0.0

    # Viewer must stand in front of the sign face
    fx, fy = math.cos(sign.facing), math.sin(sign.facing)
    if fx * (pos.x - sign.position.x) + fy * (pos.y - sign.position.y) <= 0.0:
        return 0.0

    # Signs are usually mounted on walls; test sight to a point just in front of the face
    if not line_of_sight(env, pos, sign.position.moved(sign.facing, SIGN_STANDOFF)):
        return 0.0
    return max(0.0, math.cos(view_angle)) * max(0.0, 1.0 - d / sign.d_vis)


def sign_distribution(m: int, target: int, visibility: float) -> np.ndarray:
    """Interpolate between uniform (``v = 0``) and a point mass on ``target`` (``v = 1``)."""
    if not 0 <= target < m:
        raise SourceError(f"sign target route {target} outside [0, {m})")
    v = min(1.0, max(0.0, visibility))
    peak = 1.0 / m + v * (1.0 - 1.0 / m)
    p = np.full(m, (1.0 - peak) / (m - 1)) if m > 1 else np.zeros(m)
    p[target] = peak
    return p


def f_sign(obs: Observation) -> np.ndarray:
    """Signage source: distribution peaked at the route of the most visible sign.

    Ties on visibility go to the smaller sign id; no visible sign gives the
    uniform distribution.
    """
    m = obs.route_count
    best: Optional[Tuple[float, int, int]] = None
    for route, entry in enumerate(obs.routes):
        signal = entry.sign
        if signal is None or signal.visibility <= 0.0:
            continue
        key = (signal.visibility, -signal.sign_id, route)
        if best is None or key[:2] > best[:2]:
            best = key
    if best is None:
        return uniform(m)
    return sign_distribution(m, best[2], best[0])


def f_space(obs: Observation, weights: Sequence[float] = DEFAULT_MEASURE_WEIGHTS) -> np.ndarray:
    """Spatial-layout source from the ratios of the partial-isovist measures.

    Each of the four measures is normalised across routes (all-zero measures
    contribute uniformly) and the shares are mixed with ``weights``.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,) or np.any(w < 0.0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-9):
        raise SourceError(f"measure weights must be 4 non-negative values summing to 1, got {list(weights)}")
    m = obs.route_count
    table = np.array([entry.measures.as_array() for entry in obs.routes])  # (M, 4)
    totals = table.sum(axis=0)
    shares = np.where(totals > 0.0, table / np.where(totals > 0.0, totals, 1.0), 1.0 / m)
    p = shares @ w
    return p / p.sum()


def f_crowd(obs: Observation, beta: float = 1.0) -> np.ndarray:
    """Crowd-flow source: Laplace-smoothed share of visible agents per route."""
    if beta <= 0.0:
        raise SourceError(f"crowd smoothing must be positive, got {beta}")
    counts = np.array([entry.crowd_count for entry in obs.routes], dtype=float) + beta
    return counts / counts.sum()


@dataclass(frozen=True, eq=False)
class MemoryBuffer:
    """The last ``window`` ticks of physical-source distributions, newest last."""

    window: int
    entries: Tuple[Tuple[int, np.ndarray], ...] = ()

    def __post_init__(self):
        if self.window < 1:
            raise SourceError(f"memory window must be >= 1, got {self.window}")

    def pushed(self, tick: int, rows) -> "MemoryBuffer":
        """Return a new buffer with ``rows`` (N-1 x M) appended for ``tick``."""
        arr = np.array(rows, dtype=float)
        if arr.ndim != 2:
            raise SourceError("memory rows must be a 2-D (sources x routes) array")
        if self.entries and tick <= self.entries[-1][0]:
            raise SourceError(f"memory ticks must increase (got {tick} after {self.entries[-1][0]})")
        arr.setflags(write=False)
        kept = self.entries[-(self.window - 1):] if self.window > 1 else ()
        return MemoryBuffer(self.window, tuple(kept) + ((tick, arr),))

    @property
    def ticks(self) -> Tuple[int, ...]:
        return tuple(t for t, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def f_mem(buf: MemoryBuffer, decay: float = 0.5) -> np.ndarray:
    """Memory source: recency-weighted linear pool of the buffered ticks.

    Each tick's physical-source rows are averaged, then ticks are mixed with
    weights proportional to ``decay ** age``.

    Raises:
        SourceError: If the buffer is empty
    """
    if not buf.entries:
        raise SourceError("memory buffer is empty; seed it with the first observation")
    if not 0.0 < decay < 1.0:
        raise SourceError(f"memory decay must be in (0, 1), got {decay}")
    newest = buf.entries[-1][0]
    ages = np.array([newest - tick for tick, _ in buf.entries], dtype=float)
    weights = decay ** ages
    weights /= weights.sum()
    pooled = np.stack([rows.mean(axis=0) for _, rows in buf.entries])
    p = weights @ pooled
    return p / p.sum()
