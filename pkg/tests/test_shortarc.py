"""
h-short 호 모듈 테스트: 판정, 곱 샌드위치, 부분호, 길이 사상, 삼각형 분할
"""

import math

import numpy as np
import pytest

from qh_gromov.curve import Arc
from qh_gromov.domain import Point2
from qh_gromov.engine import ShortArcCert
from qh_gromov.errors import InvalidParameter, NotATriangle, PointNotOnArc, RangeOverflow
from qh_gromov.shortarc import (
    LengthMap,
    apply_length_map,
    is_h_short,
    make_length_map,
    subarc_is_short,
    subdivide_triangle,
    verify_product_sandwich,
)


E = math.e


def _vertical_arc(domain, bottom: float, top: float) -> Arc:
    return Arc([Point2(0.0, bottom), Point2(0.0, top)], domain)


def _cert(arc: Arc, k_lower: float) -> ShortArcCert:
    return ShortArcCert(
        arc=arc,
        h_achieved=max(0.0, arc.qh_length() - k_lower),
        k_lower=k_lower,
        k_upper=min(arc.qh_length(), k_lower),
    )


# ========== h-short 판정 ==========

def test_vertical_is_zero_short(half_plane):
    cert = _cert(_vertical_arc(half_plane, 1.0, E), 1.0)
    assert is_h_short(cert, 0.0)
    assert is_h_short(cert, 0.1)
    assert not is_h_short(cert, -0.1)


def test_detour_is_not_short(half_plane):
    arc = Arc([Point2(0, 1), Point2(1, 1.65), Point2(0, E)], half_plane)
    assert arc.qh_length() > 1.1
    assert not is_h_short(_cert(arc, 1.0), 0.1)


# ========== 곱 샌드위치 ==========

def test_sandwich_on_vertical(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E ** 2), 0.1)
    report = verify_product_sandwich(half_engine, cert, 11)
    assert report.passed
    assert len(report.samples) == 11
    middle = report.samples[5]
    assert middle.z.y == pytest.approx(E, rel=1e-7)
    assert middle.k_xz == pytest.approx(1.0, abs=1e-6)
    # 측지선에서는 위쪽 부등식이 등호
    assert middle.product == pytest.approx(1.0, abs=1e-6)


def test_sandwich_at_start_is_tight(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E), 0.1)
    first = verify_product_sandwich(half_engine, cert, 2).samples[0]
    assert first.k_xz == 0.0
    assert first.product == pytest.approx(0.0, abs=1e-12)


def test_sandwich_on_graph_arc(half_engine):
    cert = half_engine.short_arc(Point2(-1, 1), Point2(1, 1), 0.1)
    report = verify_product_sandwich(half_engine, cert, 6)
    assert report.passed, report.to_dict()
    assert report.failures == 0


def test_sandwich_needs_two_samples(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E), 0.1)
    with pytest.raises(InvalidParameter):
        verify_product_sandwich(half_engine, cert, 1)


# ========== 부분호 ==========

def test_subarc_of_vertical(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E ** 2), 0.1)
    sub = subarc_is_short(half_engine, cert, Point2(0, 1), Point2(0, E))
    assert sub.length == pytest.approx(1.0, abs=1e-8)
    assert sub.h_achieved <= sub.width + 1e-9
    assert is_h_short(sub, 0.1)


def test_subarc_of_whole_arc_is_original(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E), 0.1)
    assert subarc_is_short(half_engine, cert, cert.start, cert.end) is cert
    back = subarc_is_short(half_engine, cert, cert.end, cert.start)
    assert back.start == cert.end


def test_random_subarcs_of_graph_arc(half_engine):
    cert = half_engine.short_arc(Point2(-1, 1), Point2(1, 1), 0.1)
    rng = np.random.default_rng(4)
    for _ in range(3):
        t0, t1 = np.sort(rng.uniform(0.0, cert.length, 2))
        u, v = cert.arc.point_at_qh_length(t0), cert.arc.point_at_qh_length(t1)
        sub = subarc_is_short(half_engine, cert, u, v)
        assert sub.h_achieved <= 0.1 + sub.width + 1e-9


def test_subarc_off_arc(half_engine):
    cert = half_engine.short_arc(Point2(0, 1), Point2(0, E), 0.1)
    with pytest.raises(PointNotOnArc):
        subarc_is_short(half_engine, cert, Point2(0.5, 1.5), cert.end)


# ========== 길이 사상 ==========

def test_identity_length_map(half_plane):
    arc = _vertical_arc(half_plane, 1.0, E)
    f = make_length_map(arc, arc, arc.start, arc.start)
    for t in (0.0, 0.3, 1.0):
        assert f.image_t(t) == pytest.approx(t, abs=1e-12)
    assert f.apply(arc.end) == arc.end


def test_length_map_between_verticals(half_plane):
    src = _vertical_arc(half_plane, 1.0, E)
    dst = _vertical_arc(half_plane, 1.0, E ** 2)
    f = make_length_map(src, dst, src.start, dst.start)
    image = f.apply(Point2(0.0, math.sqrt(E)))
    assert image.y == pytest.approx(math.sqrt(E), abs=1e-7)
    assert apply_length_map(f, src.start) == dst.start


def test_length_map_overflow(half_plane):
    src = _vertical_arc(half_plane, 1.0, E ** 2)
    dst = _vertical_arc(half_plane, 1.0, E)
    with pytest.raises(RangeOverflow):
        make_length_map(src, dst, src.start, dst.start)


def test_length_map_out_of_range_argument(half_plane):
    arc = _vertical_arc(half_plane, 1.0, E)
    f = make_length_map(arc, arc, arc.start, arc.start)
    with pytest.raises(RangeOverflow):
        f.image_t(1.5)


def test_reversed_length_map(half_plane):
    arc = _vertical_arc(half_plane, 1.0, E)
    f = LengthMap(arc, arc, 0.0, arc.qh_length(), orientation=-1)
    images = [f.image_t(t) for t in np.linspace(0.0, arc.qh_length(), 6)]
    assert all(b < a for a, b in zip(images, images[1:]))
    assert f.apply_t(0.0) == arc.end


def test_raw_image_keeps_offset_within_tolerance(half_plane):
    arc = _vertical_arc(half_plane, 1.0, E)
    f = LengthMap(arc, arc, 0.005, 0.0, overflow_tol=0.01)
    # image_t는 0으로 잘리지만 앵커 오차는 그대로 보여야 함
    assert f.image_t(0.0) == 0.0
    assert f.raw_image_t(0.0) == pytest.approx(-0.005, abs=1e-12)


def test_length_map_rejects_orientation(half_plane):
    arc = _vertical_arc(half_plane, 1.0, E)
    with pytest.raises(InvalidParameter):
        LengthMap(arc, arc, 0.0, 0.0, orientation=0)


def test_length_map_composition(half_plane):
    a = _vertical_arc(half_plane, 1.0, E)
    b = Arc([Point2(0.0, 0.5), Point2(0.0, 1.0), Point2(0.0, E ** 2)], half_plane)
    c = _vertical_arc(half_plane, 0.25, E ** 3)
    f = make_length_map(a, b, a.start, Point2(0.0, 1.0))
    g = make_length_map(b, c, b.start, Point2(0.0, 0.5))
    fg = f.compose(g)
    for t in np.linspace(0.0, a.qh_length(), 9):
        assert fg.image_t(t) == pytest.approx(g.image_t(f.image_t(t)), abs=2e-8)
    with pytest.raises(InvalidParameter):
        g.compose(f)


def test_length_map_anchor_off_arc(half_plane):
    arc = _vertical_arc(half_plane, 1.0, E)
    with pytest.raises(PointNotOnArc):
        make_length_map(arc, arc, Point2(1.0, 1.0), arc.start)


# ========== 삼각형 분할 ==========

def test_collinear_triangle(half_engine):
    z, x, y = Point2(0, 1), Point2(0, E ** 2), Point2(0, E ** -2)
    beta = half_engine.short_arc(z, x, 0.1)
    gamma = half_engine.short_arc(z, y, 0.1)
    alpha = half_engine.short_arc(x, y, 0.1)
    tri = subdivide_triangle(beta, gamma, alpha, 0.1)

    assert tri.passed
    assert tri.products["xy_z"] == pytest.approx(0.0, abs=1e-6)
    assert tri.products["zy_x"] == pytest.approx(2.0, abs=1e-6)
    assert tri.products["zx_y"] == pytest.approx(2.0, abs=1e-6)
    assert tri.alpha.w.y == pytest.approx(1.0, abs=1e-5)
    assert tri.alpha.star_length <= tri.slack
    assert tri.beta.prime is None
    assert tri.beta.doubleprime.qh_length() == pytest.approx(beta.length, abs=1e-8)


def test_triangle_pieces_sum(half_engine):
    z, x, y = Point2(0, 1), Point2(-1, 2), Point2(1.5, 1.5)
    beta = half_engine.short_arc(z, x, 0.1)
    gamma = half_engine.short_arc(z, y, 0.1)
    alpha = half_engine.short_arc(x, y, 0.1)
    tri = subdivide_triangle(beta, gamma, alpha, 0.1)
    for side in (tri.alpha, tri.beta, tri.gamma):
        assert side.pieces_sum_error() <= 1e-8 * max(1.0, side.side.qh_length())
        assert side.star_length <= 0.1 + side.slack
    assert tri.to_dict()["passed"] is True


def test_triangle_vertices_must_match(half_engine):
    beta = half_engine.short_arc(Point2(0, 1), Point2(0, 2), 0.1)
    gamma = half_engine.short_arc(Point2(0, 1), Point2(0, 3), 0.1)
    alpha = half_engine.short_arc(Point2(0, 2.5), Point2(0, 3), 0.1)
    with pytest.raises(NotATriangle):
        subdivide_triangle(beta, gamma, alpha, 0.1)
    other = half_engine.short_arc(Point2(0, 1.5), Point2(0, 3), 0.1)
    with pytest.raises(NotATriangle):
        subdivide_triangle(beta, other, half_engine.short_arc(Point2(0, 2), Point2(0, 3), 0.1), 0.1)


def test_degenerate_triangle(half_engine):
    beta = half_engine.short_arc(Point2(0, 1), Point2(0, 2), 0.1)
    alpha = half_engine.short_arc(Point2(0, 2), Point2(0, 1), 0.1)
    with pytest.raises(NotATriangle):
        subdivide_triangle(beta, beta, alpha, 0.1)
