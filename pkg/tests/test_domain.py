"""
영역 모듈 테스트: 경계 거리, 포함 판정, 선분 판정, 명세 로드
"""

import json
import math

import numpy as np
import pytest

from qh_gromov.domain import (
    Annulus,
    Box,
    HalfPlane,
    Point2,
    PolygonComplement,
    get_domain,
    load_domain,
)
from qh_gromov.errors import InvalidDomainSpec, InvalidParameter, PointOutsideDomain


def _random_interior(domain, rng, count: int, box: Box) -> list[Point2]:
    pts = []
    while len(pts) < count:
        xy = rng.uniform([box.x0, box.y0], [box.x1, box.y1], size=(4 * count, 2))
        keep = xy[domain.contains_many(xy)]
        pts.extend(Point2(x, y) for x, y in keep)
    return pts[:count]


# ========== Point2 / Box ==========

def test_point_parse():
    assert Point2.parse("0, 2.5") == Point2(0.0, 2.5)
    assert Point2.parse("-1,0").to_list() == [-1.0, 0.0]


@pytest.mark.parametrize("text", ["1", "1,2,3", "a,b", "nan,1"])
def test_point_parse_rejects(text):
    with pytest.raises(InvalidParameter):
        Point2.parse(text)


def test_point_rejects_infinite():
    with pytest.raises(InvalidParameter):
        Point2(math.inf, 0.0)


def test_box_requires_positive_extent():
    with pytest.raises(InvalidParameter):
        Box(1.0, 0.0, 0.0, 1.0)


# ========== 경계 거리 ==========

@pytest.mark.parametrize(
    "name, point, expected",
    [
        ("half_plane", (3.0, 2.0), 2.0),
        ("punctured_plane", (3.0, 4.0), 5.0),
        ("unit_disk", (0.0, 0.25), 0.75),
        ("annulus", (2.0, 0.0), 1.0),
        ("annulus", (0.0, 3.5), 0.5),
        ("strip_rect", (0.0, 0.25), 0.25),
        ("square_hole", (3.0, 0.0), 2.0),
        ("square_hole", (4.0, 5.0), 5.0),
    ],
)
def test_boundary_distance_examples(name, point, expected):
    domain = load_domain(name)
    assert domain.boundary_distance(Point2(*point)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "name, point",
    [
        ("half_plane", (0.0, 0.0)),
        ("half_plane", (1.0, -1.0)),
        ("punctured_plane", (0.0, 0.0)),
        ("unit_disk", (1.0, 0.0)),
        ("annulus", (0.5, 0.0)),
        ("square_hole", (0.0, 0.0)),
        ("square_hole", (1.0, 0.5)),
    ],
)
def test_boundary_distance_outside_raises(name, point):
    domain = load_domain(name)
    assert not domain.contains(Point2(*point))
    with pytest.raises(PointOutsideDomain):
        domain.boundary_distance(Point2(*point))


@pytest.mark.parametrize("name", ["half_plane", "punctured_plane", "unit_disk", "annulus", "square_hole"])
def test_boundary_distance_is_1_lipschitz(name):
    domain = load_domain(name)
    box = domain.working_box(10.0).intersect(Box(-6.0, -6.0, 6.0, 6.0))
    rng = np.random.default_rng(7)
    pts = _random_interior(domain, rng, 2000, box)
    for p, q in zip(pts[::2], pts[1::2]):
        gap = abs(domain.boundary_distance(p) - domain.boundary_distance(q))
        assert gap <= p.distance(q) + 1e-12


def test_polygon_distance_matches_brute_force(square_hole):
    rng = np.random.default_rng(3)
    verts = np.array(square_hole.params["vertices"])
    edges = list(zip(verts, np.roll(verts, -1, axis=0)))
    # 각 변을 촘촘히 샘플링한 최근접 거리와 비교
    dense = np.concatenate([a + np.linspace(0, 1, 4001)[:, None] * (b - a) for a, b in edges])
    for p in _random_interior(square_hole, rng, 200, Box(-4.0, -4.0, 4.0, 4.0)):
        brute = np.hypot(*(dense - p.as_array()).T).min()
        assert square_hole.boundary_distance(p) == pytest.approx(brute, abs=1e-3)


def test_j_distance_on_vertical_ray(half_plane):
    assert half_plane.j_distance(Point2(0, 1), Point2(0, math.e)) == pytest.approx(1.0, abs=1e-12)


# ========== 선분 판정 ==========

def test_segment_in_convex_domain(half_plane, unit_disk):
    assert half_plane.segment_in_domain(Point2(-5, 0.1), Point2(5, 3))
    assert unit_disk.segment_in_domain(Point2(-0.9, 0), Point2(0.9, 0))


def test_segment_through_puncture(punctured_plane):
    assert not punctured_plane.segment_in_domain(Point2(1, 0), Point2(-1, 0))
    assert punctured_plane.segment_in_domain(Point2(1, 0), Point2(-1, 0.01))


def test_segment_around_annulus_hole(annulus):
    assert not annulus.segment_in_domain(Point2(-2, 0), Point2(2, 0))
    assert annulus.segment_in_domain(Point2(-2, 1.5), Point2(2, 1.5))


def test_segment_across_polygon(square_hole):
    assert not square_hole.segment_in_domain(Point2(-3, 0), Point2(3, 0))
    assert square_hole.segment_in_domain(Point2(-3, 1.5), Point2(3, 1.5))


def test_segment_endpoint_outside_raises(unit_disk):
    with pytest.raises(PointOutsideDomain):
        unit_disk.segment_in_domain(Point2(0, 0), Point2(2, 0))


# ========== 명세 ==========

@pytest.mark.parametrize(
    "spec",
    [
        {},
        {"kind": "sphere"},
        {"kind": "annulus", "params": {"r_in": 2.0, "r_out": 1.0}},
        {"kind": "annulus", "params": {}},
        {"kind": "axis_rect", "params": {"x0": 1, "y0": 0, "x1": 0, "y1": 1}},
        {"kind": "polygon_complement", "params": {"vertices": [[0, 0], [1, 0]]}},
        {"kind": "polygon_complement", "params": {"vertices": [[0, 0], [1, 1], [2, 2]]}},
        {"kind": "punctured_plane", "params": {"outer_radius": -1}},
        {"kind": "half_plane", "params": [1, 2]},
    ],
)
def test_invalid_domain_spec(spec):
    with pytest.raises(InvalidDomainSpec):
        get_domain(spec)


def test_get_domain_kinds():
    assert isinstance(get_domain({"kind": "half_plane"}), HalfPlane)
    annulus = get_domain({"kind": "annulus", "params": {"r_in": 1, "r_out": 2}})
    assert isinstance(annulus, Annulus)
    assert annulus.to_spec() == {"kind": "annulus", "params": {"r_in": 1, "r_out": 2}}


def test_load_domain_from_json(tmp_path):
    spec = {"kind": "polygon_complement", "params": {"vertices": [[0, 0], [2, 0], [1, 1]]}}
    path = tmp_path / "triangle.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    domain = load_domain(path)
    assert isinstance(domain, PolygonComplement)
    assert domain == get_domain(spec)


def test_load_domain_unknown_reference(tmp_path):
    with pytest.raises(InvalidDomainSpec):
        load_domain("no_such_domain")
    broken = tmp_path / "broken.json"
    broken.write_text("{kind:", encoding="utf-8")
    with pytest.raises(InvalidDomainSpec):
        load_domain(broken)
