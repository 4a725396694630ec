#!/usr/bin/env python3
"""Tests for environments, line of sight, isovists and route sectors."""

import math

import numpy as np
import pytest
from shapely.geometry import Polygon

from evac_wayfinding.exceptions import GeometryError
from evac_wayfinding.geometry import (
    EdgeKind,
    Environment,
    Intersection,
    Point2,
    Route,
    Sector,
    compute_isovist,
    count_in_sector,
    isovist_measures,
    line_of_sight,
    partition_fov,
    wrap_angle,
)

FOV = 2.0 * math.pi / 3.0
RAY_STEP = math.radians(0.05)


def create_room_with_pillar():
    """20 x 20 room with a 2 x 2 pillar up and to the right of the origin."""
    outer = [(-10, -10), (10, -10), (10, 10), (-10, 10)]
    pillar = [(2, 2), (2, 4), (4, 4), (4, 2)]
    walls = tuple(tuple(Point2.of(xy) for xy in ring) for ring in (outer, pillar))
    routes = (
        Route(0, (Point2(-10.0, 0.0), Point2(-10.0, 2.0))),
        Route(1, (Point2(10.0, -2.0), Point2(10.0, 0.0))),
    )
    return Environment(walls=walls, intersections=(Intersection(Point2(0.0, 0.0), routes),))


def create_hall():
    """Hall splitting into two passages around a central block (route 0 on the left)."""
    outer = [(-10, -16), (10, -16), (10, 16), (3, 16), (3, 2), (-3, 2), (-3, 16), (-10, 16)]
    routes = (
        Route(0, (Point2(-10.0, 2.0), Point2(-3.0, 2.0))),
        Route(1, (Point2(3.0, 2.0), Point2(10.0, 2.0))),
    )
    walls = (tuple(Point2.of(xy) for xy in outer),)
    return Environment(walls=walls, intersections=(Intersection(Point2(0.0, 0.0), routes),))


def create_open_plane():
    routes = (
        Route(0, (Point2(-3.0, 5.0), Point2(-1.0, 5.0))),
        Route(1, (Point2(1.0, 5.0), Point2(3.0, 5.0))),
    )
    return Environment(walls=(), intersections=(Intersection(Point2(0.0, 5.0), routes),))


def create_square_room():
    """10 x 10 room centred on the origin with a door on each side."""
    outer = [(-5, -5), (5, -5), (5, 5), (-5, 5)]
    routes = (
        Route(0, (Point2(-5.0, -1.0), Point2(-5.0, 1.0))),
        Route(1, (Point2(5.0, -1.0), Point2(5.0, 1.0))),
    )
    walls = (tuple(Point2.of(xy) for xy in outer),)
    return Environment(walls=walls, intersections=(Intersection(Point2(0.0, 0.0), routes),))


def create_l_room():
    """L-shaped room: a 10 x 4 arm along x and a 4 x 10 arm along y, reflex corner at (4, 4)."""
    outer = [(0, 0), (10, 0), (10, 4), (4, 4), (4, 10), (0, 10)]
    routes = (
        Route(0, (Point2(0.0, 10.0), Point2(4.0, 10.0))),
        Route(1, (Point2(10.0, 0.0), Point2(10.0, 4.0))),
    )
    walls = (tuple(Point2.of(xy) for xy in outer),)
    return Environment(walls=walls, intersections=(Intersection(Point2(2.0, 2.0), routes),))


def create_four_way():
    """Hall opening into four parallel corridors (route 0 leftmost)."""
    outer = [
        (-12, -14), (12, -14), (12, 6), (11, 6), (11, 14), (8, 14), (8, 6), (5, 6), (5, 14), (2, 14), (2, 6),
        (-2, 6), (-2, 14), (-5, 14), (-5, 6), (-8, 6), (-8, 14), (-11, 14), (-11, 6), (-12, 6),
    ]
    portals = [(-11.0, -8.0), (-5.0, -2.0), (2.0, 5.0), (8.0, 11.0)]
    routes = tuple(Route(i, (Point2(a, 6.0), Point2(b, 6.0))) for i, (a, b) in enumerate(portals))
    walls = (tuple(Point2.of(xy) for xy in outer),)
    return Environment(walls=walls, intersections=(Intersection(Point2(0.0, 2.0), routes),))


def wall_segments(env):
    segments = []
    for ring in env.walls:
        for i in range(len(ring)):
            a, b = ring[i], ring[(i + 1) % len(ring)]
            segments.append(((a.x, a.y), (b.x, b.y)))
    return np.asarray(segments, dtype=float)


def cast_ray(segments, origin, angle, d_cap):
    """Distance to the nearest wall along one ray, capped at ``d_cap``."""
    d = np.array([math.cos(angle), math.sin(angle)])
    p = segments[:, 0, :] - origin
    e = segments[:, 1, :] - segments[:, 0, :]
    denom = d[0] * e[:, 1] - d[1] * e[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (p[:, 0] * e[:, 1] - p[:, 1] * e[:, 0]) / denom
        u = (p[:, 0] * d[1] - p[:, 1] * d[0]) / denom
    hit = (np.abs(denom) > 1e-12) & (t > 1e-9) & (u >= 0.0) & (u <= 1.0)
    return min(d_cap, float(t[hit].min())) if hit.any() else d_cap


def ray_fan(env, apex, start, end, d_cap):
    """Fan area, perimeter and max radial from rays every 0.05 degrees between ``start`` and ``end``."""
    segments = wall_segments(env)
    origin = np.array(apex.as_tuple())
    angles = np.append(np.arange(start, end, RAY_STEP), end)
    radii = np.array([cast_ray(segments, origin, a, d_cap) for a in angles])
    area = float(np.sum(0.5 * radii[:-1] * radii[1:] * np.sin(np.diff(angles))))
    tips = radii[:, None] * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    perimeter = float(np.sum(np.hypot(*np.diff(tips, axis=0).T)) + radii[0] + radii[-1])
    return area, perimeter, float(radii.max())


def test_wrap_angle_range():
    """Test that angles wrap into (-pi, pi]."""
    assert wrap_angle(3.0 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-3.0 * math.pi / 2.0) == pytest.approx(math.pi / 2.0)
    assert wrap_angle(0.25) == pytest.approx(0.25)


def test_line_of_sight_in_hall():
    """Test clear sight along a passage and blocked sight through the central block."""
    env = create_hall()
    assert line_of_sight(env, Point2(-6.0, -5.0), Point2(-6.0, 10.0))
    assert not line_of_sight(env, Point2(-6.0, 10.0), Point2(6.0, 10.0))
    assert line_of_sight(env, Point2(0.0, -5.0), Point2(0.0, 1.0))


def test_line_of_sight_grazing_a_corner_is_blocked():
    """Test that touching a wall vertex counts as blocked."""
    env = create_hall()
    assert not line_of_sight(env, Point2(-4.0, 3.0), Point2(-2.0, 1.0))
    assert line_of_sight(env, Point2(-4.0, 2.9), Point2(-2.0, 0.9))


def test_open_plane_sees_everything():
    """Test that an environment without walls is fully free and visible."""
    env = create_open_plane()
    assert env.is_free(Point2(1e6, -1e6))
    assert line_of_sight(env, Point2(0.0, 0.0), Point2(100.0, 100.0))


def test_full_circle_isovist_matches_exact_visibility_polygon():
    """Test area, perimeter and occlusivity against the hand-built visible region."""
    env = create_room_with_pillar()
    iso = compute_isovist(env, Point2(0.0, 0.0), 0.0, 2.0 * math.pi, 50.0)
    visible = Polygon([(-10, -10), (10, -10), (10, 5), (4, 2), (2, 2), (2, 4), (5, 10), (-10, 10)])

    sector = Sector(route=0, start=iso.start, end=iso.end)
    measures = isovist_measures(iso, sector)

    assert measures.area == pytest.approx(visible.area, rel=1e-9)
    assert measures.perimeter == pytest.approx(visible.length, rel=1e-9)
    assert measures.occlusivity == pytest.approx(2.0 * (math.sqrt(125.0) - math.sqrt(20.0)), rel=1e-9)
    assert measures.max_radial == pytest.approx(10.0 * math.sqrt(2.0), rel=1e-9)


def test_full_circle_sectors_partition_the_isovist():
    """Test that per-route areas add up to the whole isovist."""
    env = create_room_with_pillar()
    apex = Point2(0.0, 0.0)
    iso = compute_isovist(env, apex, 0.0, 2.0 * math.pi, 50.0)
    sectors = partition_fov(apex, 0.0, 2.0 * math.pi, env.intersection)

    total = isovist_measures(iso, Sector(0, iso.start, iso.end)).area
    parts = [isovist_measures(iso, s).area for s in sectors]
    assert sum(parts) == pytest.approx(total, rel=1e-9)
    assert all(area > 0.0 for area in parts)


@pytest.mark.parametrize("factory, apex, heading, d_cap", [
    (create_hall, Point2(0.0, -5.0), math.pi / 2.0, 50.0),
    (create_hall, Point2(-4.0, -10.0), math.radians(75.0), 50.0),
    (create_hall, Point2(5.0, 0.0), math.radians(120.0), 50.0),
    (create_hall, Point2(0.0, -5.0), math.pi / 2.0, 8.0),
    (create_l_room, Point2(2.0, 8.0), -math.pi / 2.0, 50.0),
    (create_l_room, Point2(8.0, 2.0), math.pi, 50.0),
    (create_l_room, Point2(2.0, 2.0), math.pi / 4.0, 5.0),
    (create_four_way, Point2(0.0, -10.0), math.pi / 2.0, 50.0),
    (create_four_way, Point2(-6.0, -2.0), math.radians(80.0), 8.0),
    (create_four_way, Point2(9.0, 0.0), math.radians(120.0), 50.0),
], ids=lambda value: value.__name__ if callable(value) else None)
def test_partial_isovists_match_ray_casting(factory, apex, heading, d_cap):
    """Test sector area, perimeter and max radial against a brute-force 0.05 degree ray caster."""
    env = factory()
    iso = compute_isovist(env, apex, heading, FOV, d_cap)
    checked = 0
    for sector in partition_fov(apex, heading, FOV, env.intersection):
        if sector.is_empty:
            continue
        measures = isovist_measures(iso, sector)
        area, perimeter, max_radial = ray_fan(env, apex, sector.start, sector.end, d_cap)
        assert measures.area == pytest.approx(area, rel=0.01)
        assert measures.perimeter == pytest.approx(perimeter, rel=0.01)
        assert measures.max_radial == pytest.approx(max_radial, rel=0.01)
        checked += 1
    assert checked >= 1


def test_square_room_full_view():
    """Test the 10 x 10 room seen whole from its centre and through a 3 m cap."""
    env = create_square_room()
    apex = Point2(0.0, 0.0)

    iso = compute_isovist(env, apex, 0.0, 2.0 * math.pi, 50.0)
    whole = isovist_measures(iso, Sector(0, iso.start, iso.end))
    assert whole.area == pytest.approx(100.0, rel=1e-9)
    assert whole.perimeter == pytest.approx(40.0, rel=1e-9)
    assert whole.occlusivity == 0.0
    assert whole.max_radial == pytest.approx(5.0 * math.sqrt(2.0), rel=1e-9)

    capped = compute_isovist(env, apex, 0.0, 2.0 * math.pi, 3.0)
    disc = isovist_measures(capped, Sector(0, capped.start, capped.end))
    assert disc.area == pytest.approx(9.0 * math.pi, rel=1e-9)
    assert disc.area == pytest.approx(28.27, abs=0.01)
    assert disc.perimeter == pytest.approx(6.0 * math.pi, rel=1e-9)
    assert disc.max_radial == pytest.approx(3.0)


def test_l_room_reflex_corner_occludes():
    """Test the L-room seen from its vertical arm against the hand-built visible region."""
    env = create_l_room()
    apex = Point2(2.0, 8.0)
    iso = compute_isovist(env, apex, 0.0, 2.0 * math.pi, 50.0)
    measures = isovist_measures(iso, Sector(0, iso.start, iso.end))
    visible = Polygon([(0, 0), (6, 0), (4, 4), (4, 10), (0, 10)])

    assert measures.area == pytest.approx(visible.area, rel=1e-9)
    assert measures.perimeter == pytest.approx(visible.length, rel=1e-9)
    assert measures.occlusivity == pytest.approx(math.sqrt(20.0), rel=1e-9)
    assert measures.max_radial == pytest.approx(math.sqrt(80.0), rel=1e-9)


def test_l_room_fully_visible_from_the_corner_square():
    env = create_l_room()
    iso = compute_isovist(env, Point2(2.0, 2.0), 0.0, 2.0 * math.pi, 50.0)
    measures = isovist_measures(iso, Sector(0, iso.start, iso.end))
    assert measures.area == pytest.approx(64.0, rel=1e-9)
    assert measures.perimeter == pytest.approx(40.0, rel=1e-9)
    assert measures.occlusivity == 0.0


@pytest.mark.parametrize("factory, apex, heading", [
    (create_hall, Point2(0.0, -5.0), math.pi / 2.0),
    (create_l_room, Point2(8.0, 2.0), math.pi),
    (create_four_way, Point2(0.0, -10.0), math.pi / 2.0),
])
def test_isovist_area_grows_with_fov_and_cap(factory, apex, heading):
    """Test that widening the view or extending the cap never shrinks the visible area."""
    env = factory()

    def area(fov, d_cap):
        iso = compute_isovist(env, apex, heading, fov, d_cap)
        return isovist_measures(iso, Sector(0, iso.start, iso.end)).area

    fovs = [math.radians(deg) for deg in (10, 45, 90, 120, 180, 270, 360)]
    by_fov = [area(fov, 50.0) for fov in fovs]
    assert all(b >= a - 1e-9 for a, b in zip(by_fov, by_fov[1:]))
    assert by_fov[-1] > by_fov[0]

    by_cap = [area(FOV, d_cap) for d_cap in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 50.0)]
    assert all(b >= a - 1e-9 for a, b in zip(by_cap, by_cap[1:]))
    assert by_cap[-1] > by_cap[0]


@pytest.mark.parametrize("factory, apex, heading, d_cap", [
    (create_hall, Point2(0.0, -5.0), math.pi / 2.0, 50.0),
    (create_hall, Point2(0.0, -5.0), math.pi / 2.0, 8.0),
    (create_l_room, Point2(8.0, 2.0), math.pi, 50.0),
    (create_four_way, Point2(0.0, -10.0), math.pi / 2.0, 50.0),
])
def test_edge_kind_lengths_add_up_to_perimeter(factory, apex, heading, d_cap):
    """Test that occluding, wall and fov-limit edges of the traced boundary make up the perimeter."""
    env = factory()
    iso = compute_isovist(env, apex, heading, FOV, d_cap)
    measures = isovist_measures(iso, Sector(0, iso.start, iso.end))

    lengths = {kind: 0.0 for kind in EdgeKind}
    ring = list(iso.boundary)
    for i, kind in enumerate(iso.edge_kinds):
        lengths[kind] += ring[i].distance_to(ring[(i + 1) % len(ring)])

    # Arcs are sampled as chords in the vertex list
    assert sum(lengths.values()) == pytest.approx(measures.perimeter, rel=1e-4)
    assert lengths[EdgeKind.OCCLUDING] == pytest.approx(measures.occlusivity, abs=1e-9)
    assert lengths[EdgeKind.WALL] > 0.0
    assert lengths[EdgeKind.FOV_LIMIT] > 0.0


def test_isovist_in_open_plane_is_a_wedge():
    """Test the closed-form wedge measures when nothing blocks the view."""
    env = create_open_plane()
    d_cap = 8.0
    iso = compute_isovist(env, Point2(0.0, 0.0), math.pi / 2.0, FOV, d_cap)
    measures = isovist_measures(iso, Sector(0, iso.start, iso.end))

    assert measures.area == pytest.approx(0.5 * d_cap * d_cap * FOV)
    assert measures.perimeter == pytest.approx(d_cap * FOV + 2.0 * d_cap)
    assert measures.occlusivity == 0.0
    assert measures.max_radial == pytest.approx(d_cap)
    assert set(iso.edge_kinds) == {EdgeKind.FOV_LIMIT}


def test_isovist_edges_are_tagged():
    """Test that walls, occluding jumps and the fov limit all show up in the hall."""
    env = create_hall()
    iso = compute_isovist(env, Point2(0.0, -5.0), math.pi / 2.0, FOV, 50.0)
    assert {EdgeKind.WALL, EdgeKind.OCCLUDING, EdgeKind.FOV_LIMIT} <= set(iso.edge_kinds)
    assert len(iso.boundary) == len(iso.edge_kinds)


def test_apex_inside_wall_raises():
    """Test that an apex inside the central block is rejected."""
    env = create_hall()
    with pytest.raises(GeometryError):
        compute_isovist(env, Point2(0.0, 5.0), 0.0, FOV, 50.0)


def test_partition_fov_splits_at_bisector():
    """Test that two symmetric routes split the wedge at the heading."""
    env = create_hall()
    heading = math.pi / 2.0
    left, right = partition_fov(Point2(0.0, -5.0), heading, FOV, env.intersection)

    assert (left.route, right.route) == (0, 1)
    assert right.start == pytest.approx(heading - FOV / 2.0)
    assert right.end == pytest.approx(heading)
    assert left.start == pytest.approx(heading)
    assert left.end == pytest.approx(heading + FOV / 2.0)


def test_partition_fov_route_outside_wedge_gets_empty_sector():
    """Test that a route behind the viewer gets no part of the field of view."""
    routes = (
        Route(0, (Point2(-1.0, 10.0), Point2(1.0, 10.0))),
        Route(1, (Point2(-1.0, -10.0), Point2(1.0, -10.0))),
    )
    intersection = Intersection(Point2(0.0, 0.0), routes)
    ahead, behind = partition_fov(Point2(0.0, 0.0), math.pi / 2.0, FOV, intersection)
    assert ahead.width == pytest.approx(FOV)
    assert behind.is_empty


def test_partition_fov_rejects_identical_bearings():
    """Test that two portals in the same direction cannot be told apart."""
    routes = (
        Route(0, (Point2(-1.0, 5.0), Point2(1.0, 5.0))),
        Route(1, (Point2(-1.0, 10.0), Point2(1.0, 10.0))),
    )
    with pytest.raises(GeometryError):
        partition_fov(Point2(0.0, 0.0), math.pi / 2.0, FOV, Intersection(Point2(0.0, 0.0), routes))


def test_count_in_sector_respects_sectors_and_walls():
    """Test crowd counting: in-sector, other-sector, occluded and behind the viewer."""
    env = create_hall()
    apex, heading = Point2(0.0, -5.0), math.pi / 2.0
    iso = compute_isovist(env, apex, heading, FOV, 50.0)
    left, right = partition_fov(apex, heading, FOV, env.intersection)

    visible_left = Point2(-5.0, 0.0)
    visible_right = Point2(4.0, -1.0)
    hidden_left = Point2(-4.0, 14.0)
    behind = Point2(0.0, -10.0)
    crowd = [visible_left, visible_right, hidden_left, behind]

    assert count_in_sector(iso, left, crowd) == 1
    assert count_in_sector(iso, right, crowd) == 1
    assert count_in_sector(iso, left, []) == 0


@pytest.mark.parametrize("factory, apex, heading", [
    (create_hall, Point2(0.0, -5.0), math.pi / 2.0),
    (create_l_room, Point2(2.0, 8.0), -math.pi / 2.0),
    (create_four_way, Point2(0.0, -10.0), math.pi / 2.0),
])
def test_counted_points_are_in_line_of_sight(factory, apex, heading):
    """Test that every point counted in a sector can be seen from the apex."""
    env = factory()
    iso = compute_isovist(env, apex, heading, FOV, 50.0)
    sectors = partition_fov(apex, heading, FOV, env.intersection)

    rng = np.random.default_rng(5)
    xs = [p.x for p in env.walls[0]]
    ys = [p.y for p in env.walls[0]]
    points = [Point2(float(x), float(y)) for x, y in zip(rng.uniform(min(xs), max(xs), 400),
                                                         rng.uniform(min(ys), max(ys), 400))]
    seen = [p for p in points if env.is_free(p) and line_of_sight(env, apex, p)]

    counted = 0
    for sector in sectors:
        inside = [p for p in points if count_in_sector(iso, sector, [p]) == 1]
        assert all(p in seen for p in inside)
        assert count_in_sector(iso, sector, points) == len(inside)
        counted += len(inside)
    assert 0 < counted <= len(seen)
