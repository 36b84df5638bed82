"""
수용 검사

기본 실행은 줄인 개수로, 전체 개수는 slow 마커로 돌립니다.
    pytest -m "not slow"   # 빠른 실행
    pytest -m slow         # 전체 크기
"""

import json
import math

import numpy as np
import pytest

from qh_gromov.cli import EXIT_OK, dispatch
from qh_gromov.curve import write_points_csv
from qh_gromov.domain import Point2, load_domain
from qh_gromov.engine import QhEngine, qh_distance
from qh_gromov.gromov import DistanceMatrix, four_point_delta, gromov_product
from qh_gromov.harness import lemma31_construct, theorem13_construct
from qh_gromov.shortarc import (
    is_h_short,
    subarc_is_short,
    subdivide_triangle,
    verify_product_sandwich,
)


H = 0.1
SANDWICH_DOMAINS = ("half_plane", "unit_disk", "punctured_plane")


def _random_point(name: str, rng: np.random.Generator) -> Point2:
    """영역 안쪽의 적당한 범위에서 균등 추출"""
    if name == "half_plane":
        return Point2(rng.uniform(-1.5, 1.5), rng.uniform(0.3, 2.5))
    angle = rng.uniform(0.0, 2.0 * math.pi)
    radius = rng.uniform(0.0, 0.7) if name == "unit_disk" else rng.uniform(0.4, 2.5)
    return Point2(radius * math.cos(angle), radius * math.sin(angle))


def _random_pair(name: str, rng: np.random.Generator, min_gap: float = 0.2) -> tuple[Point2, Point2]:
    while True:
        x, y = _random_point(name, rng), _random_point(name, rng)
        if x.distance(y) >= min_gap:
            return x, y


def _ray(n: int, sign: int = 1) -> list[Point2]:
    return [Point2(0.0, math.exp(sign * i)) for i in range(1, n + 1)]


# ========== 거리 정확도 ==========

def test_half_plane_exactness():
    est = qh_distance(load_domain("half_plane"), Point2(0, 1), Point2(0, math.e), 0.01)
    assert 1.0 <= est.upper <= 1.01
    assert est.lower >= 0.99


def test_punctured_plane_exactness():
    est = qh_distance(load_domain("punctured_plane"), Point2(1, 0), Point2(-1, 0), 0.05 * math.pi)
    assert math.pi - 1e-9 <= est.upper <= 1.05 * math.pi
    assert est.lower <= math.pi + 1e-9


# ========== 짧은 호 성질 ==========

@pytest.mark.parametrize("pairs", [2, pytest.param(34, marks=pytest.mark.slow)])
@pytest.mark.parametrize("name", SANDWICH_DOMAINS)
def test_sandwich_suite(name, pairs):
    rng = np.random.default_rng(100)
    engine = QhEngine(load_domain(name))
    for _ in range(pairs):
        x, y = _random_pair(name, rng)
        cert = engine.short_arc(x, y, H)
        report = verify_product_sandwich(engine, cert, 10, H)
        assert report.passed, report.to_dict()


@pytest.mark.parametrize("arcs", [3, pytest.param(50, marks=pytest.mark.slow)])
def test_subarc_suite(arcs):
    rng = np.random.default_rng(200)
    engines = {name: QhEngine(load_domain(name)) for name in SANDWICH_DOMAINS}
    for k in range(arcs):
        name = SANDWICH_DOMAINS[k % len(SANDWICH_DOMAINS)]
        engine = engines[name]
        x, y = _random_pair(name, rng)
        cert = engine.short_arc(x, y, H)
        assert is_h_short(cert, H)
        for _ in range(3):
            t0, t1 = np.sort(rng.uniform(0.0, cert.length, 2))
            t0 = min(t0, 0.95 * cert.length)
            t1 = max(t1, t0 + 0.05 * cert.length)
            u, v = cert.arc.point_at_qh_length(float(t0)), cert.arc.point_at_qh_length(float(t1))
            sub = subarc_is_short(engine, cert, u, v, H)
            assert sub.h_achieved <= H + sub.width + 1e-9


@pytest.mark.parametrize("triangles", [2, pytest.param(30, marks=pytest.mark.slow)])
def test_subdivision_suite(triangles):
    rng = np.random.default_rng(300)
    engine = QhEngine(load_domain("half_plane"))
    for _ in range(triangles):
        z, x = _random_pair("half_plane", rng, min_gap=0.5)
        y = _random_point("half_plane", rng)
        while min(y.distance(x), y.distance(z)) < 0.5:
            y = _random_point("half_plane", rng)
        tri = subdivide_triangle(engine.short_arc(z, x, H), engine.short_arc(z, y, H), engine.short_arc(x, y, H), H)
        assert tri.passed, tri.checks
        for side in (tri.alpha, tri.beta, tri.gamma):
            assert side.star_length <= H + side.slack
            assert side.pieces_sum_error() <= 1e-8 * max(1.0, side.side.qh_length())


@pytest.mark.slow
def test_subdivision_of_disk_triangle():
    engine = QhEngine(load_domain("unit_disk"))
    z, x, y = (Point2(0.6 * math.cos(a), 0.6 * math.sin(a)) for a in np.radians([90.0, 210.0, 330.0]))
    tri = subdivide_triangle(engine.short_arc(z, x, H), engine.short_arc(z, y, H), engine.short_arc(x, y, H), H)
    assert tri.passed, tri.checks
    # 대칭 삼각형이라 세 곱이 거의 같음
    values = list(tri.products.values())
    assert max(values) - min(values) <= 3 * tri.slack + 0.05


# ========== 구성 ==========

def test_lemma_collinear_instance():
    run = lemma31_construct(load_domain("half_plane"), Point2(0, 1), _ray(7), H, 5)
    assert run.passed, run.checks
    for row in run.displacements:
        assert row.sup <= row.slack


def _disk_prefix(n: int) -> list[Point2]:
    # 경계점 (1, 0)으로 비접선 방향 수렴
    return [
        Point2((1 - math.exp(-i)) * math.cos(0.5 * math.exp(-i)), (1 - math.exp(-i)) * math.sin(0.5 * math.exp(-i)))
        for i in range(1, n + 1)
    ]


def test_lemma_disk_instance_at_defaults():
    run = lemma31_construct(load_domain("unit_disk"), Point2(0, 0), _disk_prefix(8), H, 3)
    assert len(run.selected) == 3
    assert run.checks["composition"]
    for row in run.displacements:
        assert row.sup <= row.bound + row.slack


@pytest.mark.slow
def test_lemma_generic_disk_instance(tmp_path):
    csv_path = write_points_csv(_disk_prefix(8), tmp_path / "disk.csv")
    out = tmp_path / "disk.json"
    code = dispatch(["lemma31", "--domain", "unit_disk", "--basepoint", "0,0", "--prefix", str(csv_path),
                     "--mmax", "3", "--out", str(out)])
    assert code == EXIT_OK
    report = json.loads(out.read_text(encoding="utf-8"))
    for row in report["result"]["displacements"]:
        assert row["sup"] <= row["bound"] + row["slack"]


def test_theorem_main_instance():
    run = theorem13_construct(load_domain("half_plane"), Point2(0, 1), _ray(6), _ray(6, sign=-1), H, 6)
    checks = run.checks
    assert checks["sides_h_short"]
    assert checks["divergence"]
    assert run.divergence.min_step >= 3 * H - 2 * run.divergence.slack
    assert checks["composition"]
    assert run.composition.max_error <= 2e-8
    for row in run.displacements:
        assert row.sup <= 12 * (run.delta_hat + H) + row.slack
    assert run.passed


def test_theorem_punctured_plane_instance():
    z = Point2(1.0, 0.0)
    prefix_a = [Point2(math.exp(i), 0.0) for i in range(1, 7)]
    prefix_b = [Point2(math.exp(-i), 0.0) for i in range(1, 7)]
    run = theorem13_construct(load_domain("punctured_plane"), z, prefix_a, prefix_b, 0.2, 6)
    assert all(run.checks.values()), run.checks
    assert run.passed


# ========== 그로모프 곱과 δ ==========

@pytest.mark.parametrize("quadruples", [4, pytest.param(200, marks=pytest.mark.slow)])
def test_basepoint_shift(quadruples):
    rng = np.random.default_rng(400)
    engine = QhEngine(load_domain("half_plane"))
    tol = 0.05
    for _ in range(quadruples):
        x, y, w, v = (_random_point("half_plane", rng) for _ in range(4))
        at_w = gromov_product(engine, x, y, w, tol)
        at_v = gromov_product(engine, x, y, v, tol)
        k_wv = engine.distance(w, v, tol)
        slack = at_w.distance_slack + at_v.distance_slack
        assert abs(at_w.value - at_v.value) <= k_wv.upper + slack


def test_four_collinear_points():
    engine = QhEngine(load_domain("half_plane"))
    points = [Point2(0.0, math.exp(i)) for i in range(4)]
    estimate = four_point_delta(DistanceMatrix.compute(engine, points, 0.01))
    assert estimate.delta_hat <= estimate.slack


@pytest.mark.parametrize("count", [8, pytest.param(20, marks=pytest.mark.slow)])
def test_delta_monotone_on_nested_samples(count):
    rng = np.random.default_rng(500)
    engine = QhEngine(load_domain("half_plane"))
    points = [_random_point("half_plane", rng) for _ in range(count)]
    matrix = DistanceMatrix.compute(engine, points, 0.05)
    values = [four_point_delta(matrix.subset(range(k))).delta_hat for k in range(1, count + 1)]
    assert all(b >= a for a, b in zip(values, values[1:]))


# ========== 결정성 ==========

def _run_twice(argv: list[str], out) -> bytes:
    assert dispatch(argv) == EXIT_OK
    first = out.read_bytes()
    assert dispatch(argv) == EXIT_OK
    assert out.read_bytes() == first
    return first


def test_lemma_report_is_deterministic(tmp_path):
    prefix = write_points_csv(_ray(7), tmp_path / "u.csv")
    out = tmp_path / "lemma.json"
    argv = ["lemma31", "--domain", "half_plane", "--basepoint", "0,1", "--prefix", str(prefix),
            "--mmax", "5", "--seed", "3", "--out", str(out)]
    report = json.loads(_run_twice(argv, out))
    assert report["passed"] is True


@pytest.mark.slow
def test_theorem_report_is_deterministic(tmp_path):
    a = write_points_csv(_ray(6), tmp_path / "a.csv")
    b = write_points_csv(_ray(6, sign=-1), tmp_path / "b.csv")
    out = tmp_path / "theorem.json"
    argv = ["theorem13", "--domain", "half_plane", "--basepoint", "0,1", "--prefix-a", str(a),
            "--prefix-b", str(b), "--imax", "6", "--seed", "3", "--out", str(out)]
    report = json.loads(_run_twice(argv, out))
    assert report["passed"] is True
