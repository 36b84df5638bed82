"""
거리 엔진 테스트: 그래프 생성, 경로 정밀화, 거리 추정, h-short 호
"""

import math

import numpy as np
import pytest

from qh_gromov.curve import Arc
from qh_gromov.domain import Box, Point2
from qh_gromov.engine import QhEngine, build_graph, qh_distance, refine_path, short_arc
from qh_gromov.errors import EmptyRegion, InvalidParameter, PointOutsideDomain


E = math.e


def _half_plane_k(p: Point2, q: Point2) -> float:
    """상반평면 준쌍곡 거리 (쌍곡 거리와 같음)"""
    return math.acosh(1.0 + p.distance(q) ** 2 / (2.0 * p.y * q.y))


# ========== 그래프 ==========

def test_graph_respects_cutoff(punctured_plane):
    graph = build_graph(punctured_plane, Box(-2, -2, 2, 2), 0.25)
    assert graph.node_count > 0
    assert graph.delta.min() >= graph.cutoff
    assert graph.cutoff == pytest.approx(0.25 * 0.125)
    count, _ = graph.components()
    assert count == 1


def test_graph_edge_weights_are_positive(half_plane):
    graph = build_graph(half_plane, Box(-1, 0, 1, 2), 0.2)
    assert graph.edge_count > 0
    assert np.all(graph.weights > 0)
    assert np.all(np.isfinite(graph.weights))


def test_graph_refines_near_boundary(half_plane):
    graph = build_graph(half_plane, Box(-1, 0, 1, 2), 0.2, cutoff=0.01)
    assert graph.levels >= 1
    spacing = np.diff(np.unique(graph.nodes[:, 1]))
    assert spacing.min() < 0.2


def test_graph_rejects_bad_resolution(half_plane):
    with pytest.raises(InvalidParameter):
        build_graph(half_plane, Box(-1, 0, 1, 2), 0.0)


def test_graph_empty_region(half_plane, unit_disk):
    with pytest.raises(EmptyRegion):
        build_graph(half_plane, Box(-1, -3, 1, -1), 0.1)
    with pytest.raises(EmptyRegion):
        build_graph(unit_disk, Box(5, 5, 6, 6), 0.1)


# ========== 정밀화 ==========

def test_refine_straightens_staircase(half_plane, engine_settings):
    ys = np.geomspace(1.0, E, 21)
    xs = np.where(np.arange(21) % 2 == 1, 0.05, 0.0)
    xs[0] = xs[-1] = 0.0
    arc = Arc(np.column_stack([xs, ys]), half_plane)
    refined = refine_path(half_plane, arc, engine_settings)
    assert refined.start == arc.start and refined.end == arc.end
    assert refined.qh_length() <= arc.qh_length()
    assert refined.qh_length() == pytest.approx(1.0, rel=5e-3)


def test_refine_keeps_straight_segment(half_plane, engine_settings):
    arc = Arc([Point2(0, 1), Point2(0, E)], half_plane)
    refined = refine_path(half_plane, arc, engine_settings)
    assert refined.qh_length() == pytest.approx(arc.qh_length(), abs=1e-12)


# ========== 거리 ==========

def test_vertical_distance_uses_segment(half_engine):
    est = half_engine.distance(Point2(0, 1), Point2(0, E), 0.01)
    assert 1.0 - 1e-9 <= est.upper <= 1.01
    assert est.lower >= 0.99
    assert est.method == "segment"
    assert half_engine.stats.segment_hits == 1


def test_identical_points(half_engine):
    est = half_engine.distance(Point2(0.5, 2), Point2(0.5, 2))
    assert est.lower == est.upper == 0.0
    assert est.path is None


def test_graph_distance_matches_hyperbolic(half_engine):
    x, y = Point2(-1, 1), Point2(1, 1)
    exact = _half_plane_k(x, y)
    est = half_engine.distance(x, y, 0.02)
    assert est.method == "graph"
    assert est.lower <= exact + 1e-9
    assert exact - 1e-9 <= est.upper <= exact + 0.05
    assert est.path.qh_length() == pytest.approx(est.upper, rel=1e-12)
    assert est.resolutions


def test_distance_is_symmetric_and_cached(half_engine):
    x, y = Point2(-1, 1), Point2(1, 1)
    forward = half_engine.distance(x, y, 0.05)
    builds = half_engine.stats.graph_builds
    backward = half_engine.distance(y, x, 0.05)
    assert backward.upper == forward.upper
    assert backward.path.start == y
    assert half_engine.stats.graph_builds == builds
    assert half_engine.stats.cache_hits == 1


def test_distance_bounds_bracket_j(half_plane):
    rng = np.random.default_rng(5)
    engine = QhEngine(half_plane)
    for _ in range(5):
        x = Point2(rng.uniform(-1, 1), rng.uniform(0.5, 2))
        y = Point2(rng.uniform(-1, 1), rng.uniform(0.5, 2))
        est = engine.distance(x, y, 0.05)
        assert half_plane.j_distance(x, y) <= est.lower + 1e-12
        assert est.lower <= est.upper
        assert est.upper >= _half_plane_k(x, y) - 1e-9


def test_distance_outside_point(half_engine):
    with pytest.raises(PointOutsideDomain):
        half_engine.distance(Point2(0, 1), Point2(0, -1))


@pytest.mark.parametrize("tol", [0.0, -1.0, math.nan])
def test_distance_rejects_bad_tol(half_engine, tol):
    with pytest.raises(InvalidParameter):
        half_engine.distance(Point2(0, 1), Point2(0, 2), tol)


def test_module_level_distance(unit_disk):
    est = qh_distance(unit_disk, Point2(0, 0), Point2(0.5, 0), 0.01)
    assert est.upper == pytest.approx(math.log(2.0), abs=1e-8)


# ========== h-short 호 ==========

def test_short_arc_on_vertical(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E), 0.1)
    assert cert.h_achieved <= 0.1
    assert cert.length == pytest.approx(1.0, abs=1e-8)
    assert cert.start == Point2(0, 1) and cert.end == Point2(0, E)
    assert cert.k_lower <= cert.k_upper <= cert.length + 1e-12


def test_short_arc_reversed(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E), 0.1)
    back = cert.reversed()
    assert back.start == cert.end
    assert back.length == pytest.approx(cert.length, rel=1e-12)


@pytest.mark.parametrize("h", [0.0, -0.1])
def test_short_arc_rejects_bad_h(half_engine, h):
    with pytest.raises(InvalidParameter):
        half_engine.short_arc(Point2(0, 1), Point2(0, 2), h)


def test_short_arc_rejects_identical_points(half_engine):
    with pytest.raises(InvalidParameter):
        half_engine.short_arc(Point2(0, 1), Point2(0, 1), 0.1)


def test_short_arc_around_obstacle(square_hole):
    cert = short_arc(square_hole, Point2(-2, 0), Point2(2, 0), 0.2)
    assert cert.h_achieved <= 0.2
    # 호가 장애물 위나 아래로 돌아감
    assert np.abs(cert.arc.xy[:, 1]).max() > 1.0


def test_certificate_to_dict(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E), 0.1)
    payload = cert.to_dict()
    assert payload["start"] == [0.0, 1.0]
    assert payload["h_requested"] == 0.1
    assert payload["vertices"] == 2
    assert payload["lower"] <= payload["upper"] <= payload["length"] + 1e-12
    assert payload["h_achieved"] <= 0.1
    assert "k_lower" not in payload


# ========== 경계 근처 질의 ==========

def test_graph_filter_applies_while_generating(half_plane):
    def near(nodes, delta, slack=0.0):
        return np.hypot(nodes[:, 0], nodes[:, 1] - 0.3) - slack <= 0.3

    # 거르지 않으면 경계 띠 전체가 상한을 넘음
    graph = build_graph(
        half_plane, Box(-1, 0, 1, 2), 0.05, cutoff=0.01, node_filter=near, max_nodes=3000, require_connected=False
    )
    assert 0 < graph.node_count <= 3000
    assert graph.pruned > 0
    assert np.all(np.hypot(graph.nodes[:, 0], graph.nodes[:, 1] - 0.3) <= 0.3 + 1e-12)


def test_distance_between_points_near_boundary(half_engine):
    x, y = Point2(0, 0.001), Point2(1, 0.001)
    exact = _half_plane_k(x, y)
    est = half_engine.distance(x, y, 0.05)
    assert est.method == "graph"
    assert est.converged
    assert est.lower <= exact + 1e-9
    assert exact - 1e-9 <= est.upper <= 1.01 * exact


def test_disk_distance_near_boundary(disk_engine):
    est = disk_engine.distance(Point2(0.999, 0), Point2(0, 0.999), 0.05)
    assert est.converged
    assert est.lower <= est.upper
    # 중심을 지나는 두 반지름 경로보다 짧음
    assert est.upper <= 2.0 * math.log(1000.0) + 1e-6


def test_short_arc_toward_boundary_point(disk_engine):
    cert = disk_engine.short_arc(Point2(0.6215, 0.1156), Point2(0.99966, 0.000168), 0.1)
    assert cert.h_achieved <= 0.1
    assert cert.end == Point2(0.99966, 0.000168)


# ========== 일괄 거리 ==========

def test_pairwise_matches_single_queries(half_plane):
    points = [Point2(0, 1), Point2(0, E), Point2(0, E ** 2), Point2(-1, 1), Point2(1, 1)]
    engine = QhEngine(half_plane)
    values, widths = engine.pairwise(points, 0.05)
    assert np.allclose(values, values.T)
    assert np.all(np.diag(values) == 0.0)
    # 수직선 위 세 쌍은 직선으로 인증
    assert engine.stats.segment_hits >= 3
    assert values[0, 2] == pytest.approx(2.0, rel=1e-5)
    single = QhEngine(half_plane)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            est = single.distance(points[i], points[j], 0.05)
            assert values[i, j] == pytest.approx(est.upper, rel=1e-5)
            assert widths[i, j] <= max(0.05, est.width) + 1e-12


def test_pairwise_rejects_outside_point(half_engine):
    with pytest.raises(PointOutsideDomain):
        half_engine.pairwise([Point2(0, 1), Point2(0, -1)], 0.05)
