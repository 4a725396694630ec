"""Field-of-view isovists, per-route partial isovists and their measures.

An isovist is stored as a list of angular pieces swept around the apex.
Inside one piece the visible boundary is a single wall segment or the
``d_cap`` arc, so clipping to a sector and computing area, perimeter and
occlusivity are exact operations on the pieces. The polygon vertex list
is derived from the pieces (arcs sampled on a fixed angular grid).
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import shapely
from shapely.geometry import Polygon

from ..exceptions import GeometryError
from .environment import Environment, Intersection
from .primitives import EPS_GEOM, TWO_PI, Point2, Sector, cross2, wrap_angle

logger = logging.getLogger(__name__)

# Angular spacing of arc samples in the polygon vertex list
ARC_STEP = math.radians(0.5)

# Minimum angular width of a sweep interval
_MIN_SPAN = 1e-12


class EdgeKind(str, Enum):
    """Why an isovist boundary edge exists."""

    WALL = "wall"
    OCCLUDING = "occluding"
    FOV_LIMIT = "fov-limit"


@dataclass(frozen=True)
class IsovistPiece:
    """Angular interval ``[start, end]`` whose boundary is one wall segment or the cap arc."""

    start: float
    end: float
    r_start: float
    r_end: float

    # Wall segment endpoints relative to the apex, None for the d_cap arc
    segment: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None

    @property
    def is_arc(self) -> bool:
        return self.segment is None


@dataclass(frozen=True)
class IsovistPolygon:
    """Region visible from ``apex`` inside the wedge ``[start, start + fov]``."""

    apex: Point2
    start: float
    fov: float
    d_cap: float
    pieces: Tuple[IsovistPiece, ...]
    boundary: Tuple[Point2, ...]
    edge_kinds: Tuple[EdgeKind, ...]

    @property
    def end(self) -> float:
        return self.start + self.fov


@dataclass(frozen=True)
class IsovistMeasures:
    """The four isovist measures of one (partial) isovist."""

    max_radial: float
    area: float
    perimeter: float
    occlusivity: float

    def as_array(self) -> np.ndarray:
        return np.array([self.max_radial, self.area, self.perimeter, self.occlusivity])

    @classmethod
    def zero(cls) -> "IsovistMeasures":
        return cls(0.0, 0.0, 0.0, 0.0)


def compute_isovist(env: Environment, apex: Point2, heading: float, fov: float, d_cap: float) -> IsovistPolygon:
    """Compute the visibility polygon of ``apex`` within a field of view.

    Angular sweep: every wall vertex and every crossing of a wall with the
    ``d_cap`` circle is a critical angle. Between consecutive critical angles
    the nearest wall is fixed, found by casting one ray at the interval
    midpoint; the interval endpoints are then intersected exactly with
    that wall's supporting line.

    Args:
        env: Environment
        apex: Viewpoint in free space
        heading: Center direction of the field of view (radians)
        fov: Field of view width, ``0 < fov <= 2*pi``
        d_cap: Ray cap in meters

    Returns:
        IsovistPolygon with tagged edges

    Raises:
        GeometryError: If the apex lies inside a wall or the parameters are out of range
    """
    if not 0.0 < fov <= TWO_PI + EPS_GEOM:
        raise GeometryError(f"field of view must be in (0, 2pi], got {fov}")
    if d_cap <= 0.0:
        raise GeometryError(f"d_cap must be positive, got {d_cap}")
    if not env.is_free(apex):
        raise GeometryError(f"apex ({apex.x:.3f}, {apex.y:.3f}) is not in free space")

    fov = min(fov, TWO_PI)
    start = heading - fov / 2.0
    end = start + fov
    origin = np.array(apex.as_tuple())
    segments = env.segments

    angles = _critical_angles(origin, segments, d_cap, start, end)
    pieces = _sweep(origin, segments, d_cap, angles)
    boundary, kinds = _trace(apex, pieces, fan=fov < TWO_PI - EPS_GEOM)

    return IsovistPolygon(
        apex=apex,
        start=start,
        fov=fov,
        d_cap=d_cap,
        pieces=tuple(pieces),
        boundary=tuple(boundary),
        edge_kinds=tuple(kinds),
    )


def partition_fov(apex: Point2, heading: float, fov: float, intersection: Intersection) -> List[Sector]:
    """Split the field of view into one angular sector per route.

    Each sector is centered on the bearing to its route's portal midpoint and
    bounded by the angular bisectors with the neighbouring route bearings,
    clipped to the field-of-view wedge.

    Args:
        apex: Viewpoint
        heading: Center direction of the field of view
        fov: Field of view width
        intersection: Intersection whose routes are partitioned

    Returns:
        Sectors ordered by route id (possibly empty ones)

    Raises:
        GeometryError: If two routes share a bearing from the apex
    """
    routes = intersection.routes
    rel = []
    for route in routes:
        mid = route.midpoint
        if apex.distance_to(mid) <= EPS_GEOM:
            raise GeometryError(f"route {route.id} portal midpoint coincides with the apex")
        rel.append(wrap_angle(apex.bearing_to(mid) - heading))

    for i in range(len(rel)):
        for j in range(i + 1, len(rel)):
            if abs(wrap_angle(rel[i] - rel[j])) <= EPS_GEOM:
                raise GeometryError(f"routes {routes[i].id} and {routes[j].id} have identical bearings")

    order = sorted(range(len(rel)), key=lambda k: rel[k])
    half = min(fov, TWO_PI) / 2.0
    full = fov >= TWO_PI - EPS_GEOM
    m = len(order)
    bounds = {}

    for k, idx in enumerate(order):
        here = rel[idx]
        if full:
            prev = rel[order[k - 1]] - (TWO_PI if k == 0 else 0.0)
            nxt = rel[order[(k + 1) % m]] + (TWO_PI if k == m - 1 else 0.0)
            lo, hi = (prev + here) / 2.0, (here + nxt) / 2.0
        else:
            lo = -half if k == 0 else (rel[order[k - 1]] + here) / 2.0
            hi = half if k == m - 1 else (here + rel[order[k + 1]]) / 2.0
            lo, hi = max(lo, -half), min(hi, half)
        bounds[idx] = (lo, max(lo, hi))

    return [
        Sector(route=routes[i].id, start=heading + bounds[i][0], end=heading + bounds[i][1])
        for i in range(len(routes))
    ]


def isovist_measures(iso: IsovistPolygon, sector: Sector) -> IsovistMeasures:
    """Measures of the partial isovist restricted to ``sector``.

    Args:
        iso: Full field-of-view isovist
        sector: Angular sector inside the isovist's wedge

    Returns:
        max radial line, area, perimeter and occlusivity (only ``occluding``
        edges count); all zero for an empty partial isovist
    """
    pieces = restrict_pieces(iso, sector)
    if not pieces:
        return IsovistMeasures.zero()

    area = 0.0
    for piece in pieces:
        span = piece.end - piece.start
        if piece.is_arc:
            area += 0.5 * iso.d_cap * iso.d_cap * span
        else:
            area += 0.5 * piece.r_start * piece.r_end * math.sin(span)

    lengths = edge_lengths(pieces, fan=not _covers_circle(pieces))
    return IsovistMeasures(
        max_radial=max(max(p.r_start, p.r_end) for p in pieces),
        area=area,
        perimeter=sum(lengths.values()),
        occlusivity=lengths[EdgeKind.OCCLUDING],
    )


def partial_polygon(iso: IsovistPolygon, sector: Sector) -> Optional[Polygon]:
    """Shapely polygon of the partial isovist, or None when it is empty."""
    pieces = restrict_pieces(iso, sector)
    if not pieces:
        return None
    boundary, _ = _trace(iso.apex, pieces, fan=not _covers_circle(pieces))
    if len(boundary) < 3:
        return None
    polygon = Polygon([p.as_tuple() for p in boundary])
    if polygon.area <= 0.0:
        return None
    shapely.prepare(polygon)
    return polygon


def count_in_sector(iso: IsovistPolygon, sector: Sector, points: Sequence[Point2]) -> int:
    """Count points strictly inside the partial isovist of ``sector``.

    Args:
        iso: Full field-of-view isovist
        sector: Route sector
        points: Candidate points (e.g. crowd member positions)

    Returns:
        Number of points strictly inside
    """
    if not points:
        return 0
    polygon = partial_polygon(iso, sector)
    if polygon is None:
        return 0
    xs = np.fromiter((p.x for p in points), dtype=float, count=len(points))
    ys = np.fromiter((p.y for p in points), dtype=float, count=len(points))
    return int(np.count_nonzero(shapely.contains_xy(polygon, xs, ys)))


def restrict_pieces(iso: IsovistPolygon, sector: Sector) -> List[IsovistPiece]:
    """Clip the isovist's pieces to a sector, handling the 2*pi wrap-around."""
    if sector.is_empty:
        return []
    lo = iso.start + ((sector.start - iso.start) % TWO_PI)
    hi = lo + sector.width
    clipped: List[IsovistPiece] = []

    if lo < iso.end:
        clipped.extend(_clip(iso.pieces, lo, min(hi, iso.end)))
    if hi > iso.start + TWO_PI:
        # Wrapped tail, expressed after the first part so the pieces stay ordered
        tail = _clip(iso.pieces, iso.start, min(hi - TWO_PI, iso.end))
        clipped.extend(_shift(p, TWO_PI) for p in tail)
    return clipped


def edge_lengths(pieces: Sequence[IsovistPiece], fan: bool) -> dict:
    """Total boundary length per edge kind; arcs are measured exactly."""
    lengths = {kind: 0.0 for kind in EdgeKind}
    if not pieces:
        return lengths

    for i, piece in enumerate(pieces):
        if piece.is_arc:
            lengths[EdgeKind.FOV_LIMIT] += piece.r_start * (piece.end - piece.start)
        else:
            p0 = _polar(piece.start, piece.r_start)
            p1 = _polar(piece.end, piece.r_end)
            lengths[EdgeKind.WALL] += math.hypot(p1[0] - p0[0], p1[1] - p0[1])
        if i + 1 < len(pieces):
            lengths[EdgeKind.OCCLUDING] += _jump(piece, pieces[i + 1])

    if fan:
        lengths[EdgeKind.FOV_LIMIT] += pieces[0].r_start + pieces[-1].r_end
    else:
        lengths[EdgeKind.OCCLUDING] += _jump(pieces[-1], pieces[0])
    return lengths


def _jump(prev: IsovistPiece, nxt: IsovistPiece) -> float:
    gap = abs(nxt.r_start - prev.r_end)
    return gap if gap > EPS_GEOM else 0.0


def _covers_circle(pieces: Sequence[IsovistPiece]) -> bool:
    return pieces[-1].end - pieces[0].start >= TWO_PI - EPS_GEOM


def _polar(angle: float, radius: float) -> Tuple[float, float]:
    return (radius * math.cos(angle), radius * math.sin(angle))


def _shift(piece: IsovistPiece, offset: float) -> IsovistPiece:
    return IsovistPiece(piece.start + offset, piece.end + offset, piece.r_start, piece.r_end, piece.segment)


def _clip(pieces: Iterable[IsovistPiece], lo: float, hi: float) -> List[IsovistPiece]:
    out = []
    if hi - lo <= _MIN_SPAN:
        return out
    for piece in pieces:
        a, b = max(piece.start, lo), min(piece.end, hi)
        if b - a <= _MIN_SPAN:
            continue
        if a == piece.start and b == piece.end:
            out.append(piece)
            continue
        if piece.is_arc:
            out.append(IsovistPiece(a, b, piece.r_start, piece.r_end))
        else:
            out.append(IsovistPiece(
                a, b,
                _radius_on_line(piece, a),
                _radius_on_line(piece, b),
                piece.segment,
            ))
    return out


def _radius_on_line(piece: IsovistPiece, angle: float) -> float:
    """Distance from the apex to the piece's wall line along ``angle`` (apex-relative coordinates)."""
    (px, py), (qx, qy) = piece.segment
    dx, dy = math.cos(angle), math.sin(angle)
    ex, ey = qx - px, qy - py
    denom = dx * ey - dy * ex
    if abs(denom) <= 1e-15:
        return piece.r_start if abs(angle - piece.start) < abs(angle - piece.end) else piece.r_end
    return max(0.0, (px * ey - py * ex) / denom)


def _critical_angles(origin: np.ndarray, segments: np.ndarray, d_cap: float, start: float, end: float) -> np.ndarray:
    candidates = [start, end]
    if len(segments):
        rel = segments - origin  # (E, 2, 2)
        verts = rel.reshape(-1, 2)
        candidates.extend(np.arctan2(verts[:, 1], verts[:, 0]))

        # Crossings of each wall with the d_cap circle
        p, e = rel[:, 0, :], rel[:, 1, :] - rel[:, 0, :]
        a = np.einsum("ij,ij->i", e, e)
        b = 2.0 * np.einsum("ij,ij->i", p, e)
        c = np.einsum("ij,ij->i", p, p) - d_cap * d_cap
        disc = b * b - 4.0 * a * c
        ok = (disc >= 0.0) & (a > 0.0)
        root = np.sqrt(np.where(ok, disc, 0.0))
        for sign in (-1.0, 1.0):
            s = np.where(ok, (-b + sign * root) / np.where(a > 0.0, 2.0 * a, 1.0), -1.0)
            hit = ok & (s >= 0.0) & (s <= 1.0)
            pts = p[hit] + s[hit, None] * e[hit]
            candidates.extend(np.arctan2(pts[:, 1], pts[:, 0]))

    angles = np.asarray(candidates, dtype=float)
    # Move every angle onto the branch [start, start + 2*pi)
    angles = start + np.mod(angles - start, TWO_PI)
    angles = angles[(angles >= start) & (angles <= end)]
    angles = np.unique(np.concatenate([angles, [start, end]]))
    keep = np.concatenate([[True], np.diff(angles) > _MIN_SPAN])
    return angles[keep]


def _sweep(origin: np.ndarray, segments: np.ndarray, d_cap: float, angles: np.ndarray) -> List[IsovistPiece]:
    lo, hi = angles[:-1], angles[1:]
    mids = 0.5 * (lo + hi)
    n = len(mids)
    nearest = np.full(n, np.inf)
    which = np.full(n, -1, dtype=int)

    if len(segments):
        rel = segments - origin
        p = rel[:, 0, :]
        e = rel[:, 1, :] - p
        d = np.stack([np.cos(mids), np.sin(mids)], axis=1)  # (A, 2)
        denom = cross2(d[:, None, :], e[None, :, :])  # (A, E)
        safe = np.where(np.abs(denom) > 1e-15, denom, np.nan)
        t = cross2(p, e)[None, :] / safe
        u = cross2(p[None, :, :], d[:, None, :]) / safe
        valid = np.isfinite(t) & (t > EPS_GEOM) & (u >= -EPS_GEOM) & (u <= 1.0 + EPS_GEOM)
        t = np.where(valid, t, np.inf)
        which = np.argmin(t, axis=1)
        nearest = t[np.arange(n), which]

    pieces: List[IsovistPiece] = []
    for k in range(n):
        if nearest[k] >= d_cap - EPS_GEOM:
            piece = IsovistPiece(float(lo[k]), float(hi[k]), d_cap, d_cap)
        else:
            seg = segments[which[k]] - origin
            proto = IsovistPiece(float(lo[k]), float(hi[k]), 0.0, 0.0, (tuple(seg[0]), tuple(seg[1])))
            piece = IsovistPiece(
                proto.start, proto.end,
                min(d_cap, _radius_on_line(proto, proto.start)),
                min(d_cap, _radius_on_line(proto, proto.end)),
                proto.segment,
            )
        if pieces and _continues(pieces[-1], piece):
            last = pieces[-1]
            pieces[-1] = IsovistPiece(last.start, piece.end, last.r_start, piece.r_end, last.segment)
        else:
            pieces.append(piece)
    return pieces


def _continues(prev: IsovistPiece, piece: IsovistPiece) -> bool:
    if prev.segment != piece.segment:
        return False
    return abs(prev.r_end - piece.r_start) <= EPS_GEOM


def _trace(apex: Point2, pieces: Sequence[IsovistPiece], fan: bool) -> Tuple[List[Point2], List[EdgeKind]]:
    """Vertex list of the pieces; ``kinds[i]`` tags the edge leaving vertex ``i``."""
    verts: List[List] = []
    if fan:
        verts.append([apex, EdgeKind.FOV_LIMIT])

    for piece in pieces:
        kind = EdgeKind.FOV_LIMIT if piece.is_arc else EdgeKind.WALL
        pts = _piece_points(apex, piece)
        if verts and verts[-1][0].distance_to(pts[0]) <= EPS_GEOM:
            verts[-1][1] = kind
            pts = pts[1:]
        for pt in pts[:-1]:
            verts.append([pt, kind])
        if pts:
            verts.append([pts[-1], EdgeKind.OCCLUDING])

    if not pieces:
        return [], []
    if fan:
        verts[-1][1] = EdgeKind.FOV_LIMIT
    elif len(verts) > 1 and verts[-1][0].distance_to(verts[0][0]) <= EPS_GEOM:
        verts.pop()

    return [v[0] for v in verts], [v[1] for v in verts]


def _piece_points(apex: Point2, piece: IsovistPiece) -> List[Point2]:
    angles = [piece.start]
    radii = [piece.r_start]
    if piece.is_arc:
        k0 = math.floor(piece.start / ARC_STEP) + 1
        k1 = math.ceil(piece.end / ARC_STEP) - 1
        for k in range(k0, k1 + 1):
            angles.append(k * ARC_STEP)
            radii.append(piece.r_start)
    angles.append(piece.end)
    radii.append(piece.r_end)
    return [Point2(apex.x + r * math.cos(a), apex.y + r * math.sin(a)) for a, r in zip(angles, radii)]
