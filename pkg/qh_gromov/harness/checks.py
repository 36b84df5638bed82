"""
실행 공통 검사

- 길이 사상 변위 상한 표 (표본 상한을 배로 늘려 수렴 확인)
- 호장 수준 합성 검사
- 실행 점 집합의 경험적 δ
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import numpy as np

from ..domain import Point2
from ..engine import QhEngine
from ..gromov import DeltaEstimate, DistanceMatrix, four_point_delta
from ..settings import HarnessSettings
from ..shortarc import LengthMap


logger = logging.getLogger(__name__)

COMPOSITION_TOL = 2e-8
SLACK_FLOOR = 1e-9


class _Run(Protocol):
    engine: QhEngine
    settings: HarnessSettings
    maps: dict
    bound: float
    bound_slack: float
    distance_tol: float
    displacements: Optional[list]
    composition: Optional["CompositionReport"]


@dataclass
class SupSample:
    """호 위 표본 상한"""
    value: float
    t_at: float
    samples: int
    width: float
    converged: bool


@dataclass
class DisplacementRow:
    """변위 표 한 줄: sup_u k(f(u), u)"""
    i: int
    j: int
    sup: float
    t_at: float
    samples: int
    converged: bool
    bound: float
    slack: float

    @property
    def margin(self) -> float:
        return self.bound - self.sup

    @property
    def passed(self) -> bool:
        return self.margin >= -self.slack

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "sup": self.sup,
            "t_at": self.t_at,
            "samples": self.samples,
            "converged": self.converged,
            "bound": self.bound,
            "margin": self.margin,
            "slack": self.slack,
            "passed": self.passed,
        }


@dataclass
class CompositionReport:
    """f_im = f_jm ∘ f_ij 호장 검사 결과"""
    triples: int
    samples: int
    max_error: float
    tolerance: float = COMPOSITION_TOL
    worst: Optional[tuple[int, int, int]] = None

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "triples": self.triples,
            "samples": self.samples,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "worst": list(self.worst) if self.worst is not None else None,
            "passed": self.passed,
        }


def sampled_supremum(
    engine: QhEngine,
    length_map: LengthMap,
    tol: float,
    samples: int,
    max_samples: int,
    change_tol: float,
) -> SupSample:
    """
    sup_u k(f(u), u) 표본 추정

    2^k + 1 개 등간격 호장 표본에서 시작해 간격을 반으로 줄이며,
    상한 변화가 change_tol 미만이 되면 멈춥니다.
    격자가 포개지므로 이전 표본은 다시 계산하지 않습니다.

    Args:
        engine: 거리 엔진
        length_map: 길이 사상 f
        tol: 거리 허용오차
        samples: 최소 표본 수
        max_samples: 최대 구간 수
        change_tol: 수렴 판정 변화량

    Returns:
        SupSample
    """
    src = length_map.src
    length = src.qh_length()
    segments = 2 ** max(1, math.ceil(math.log2(max(samples, 2))))
    values: dict[int, tuple[float, float]] = {}
    previous: Optional[float] = None
    converged = False

    while True:
        # 정수 격자 번호를 최대 해상도 기준으로 맞춰 캐시
        stride = max(1, (2 ** 30) // segments)
        fresh = [k for k in range(segments + 1) if k * stride not in values]
        if fresh:
            ts = length * (np.asarray(fresh, dtype=float) / segments)
            us = src.points_at_qh_lengths(ts)
            images = length_map.dst.points_at_qh_lengths([length_map.image_t(float(t)) for t in ts])
            for k, u, v in zip(fresh, us, images):
                est = engine.distance(Point2(*u), Point2(*v), tol)
                values[k * stride] = (est.upper, est.width)

        current = max(v for v, _ in values.values())
        if previous is not None and abs(current - previous) < change_tol:
            converged = True
            break
        if segments * 2 > max_samples:
            break
        previous = current
        segments *= 2

    best_key = max(values, key=lambda key: values[key][0])
    sup, _ = values[best_key]
    if not converged:
        logger.warning(f"변위 상한이 표본 {len(values)}개에서 수렴하지 않았습니다 (마지막 값 {sup:.6g})")
    return SupSample(
        value=float(sup),
        t_at=float(length * best_key / 2 ** 30),
        samples=len(values),
        width=float(max(w for _, w in values.values())),
        converged=converged,
    )


def displacement_rows(
    engine: QhEngine,
    maps: dict,
    bound: float,
    bound_slack: float,
    settings: HarnessSettings,
    tol: float,
    samples: Optional[int] = None,
) -> list[DisplacementRow]:
    """
    사상별 변위 상한 표

    Args:
        maps: {(i, j): LengthMap}
        bound: 적용할 상한 (δ̂ 포함)
        bound_slack: 상한 쪽 슬랙 (δ̂ 슬랙 배수)
        samples: 최소 표본 수 (기본 settings.samples)
    """
    rows = []
    for (i, j), length_map in sorted(maps.items()):
        sup = sampled_supremum(
            engine,
            length_map,
            tol,
            samples or settings.samples,
            settings.max_samples,
            settings.sup_change_tol,
        )
        rows.append(
            DisplacementRow(
                i=i,
                j=j,
                sup=sup.value,
                t_at=sup.t_at,
                samples=sup.samples,
                converged=sup.converged,
                bound=bound,
                slack=sup.width + bound_slack + SLACK_FLOOR,
            )
        )
        logger.debug(f"변위 ({i}, {j}): sup={sup.value:.6g}, 상한={bound:.6g}, 표본={sup.samples}")
    return rows


def displacement_report(run: _Run) -> list[DisplacementRow]:
    """
    실행의 변위 표 (i, j, sup, 상한, 여유, 통과)

    한 번 계산한 표는 실행에 저장해 재사용합니다.
    """
    if run.displacements is None:
        run.displacements = displacement_rows(
            run.engine, run.maps, run.bound, run.bound_slack, run.settings, run.distance_tol
        )
        failed = [(r.i, r.j) for r in run.displacements if not r.passed]
        if failed:
            logger.warning(f"변위 상한 위반: {failed}")
    return run.displacements


def composition_check(run: _Run, samples: Optional[int] = None) -> CompositionReport:
    """
    f_im = f_jm ∘ f_ij 검사

    모든 i <= j <= m 과 α_i 위 등간격 표본 u에 대해
    f_im(u)의 호장과 f_jm(f_ij(u))의 호장을 비교합니다.
    f_ij(u)는 점으로 만든 뒤 α_j 위 위치를 다시 구합니다.
    """
    if run.composition is not None and samples is None:
        return run.composition
    count = samples or run.settings.samples
    labels = sorted({i for i, _ in run.maps} | {j for _, j in run.maps})
    max_error = 0.0
    worst = None
    triples = 0
    for a, i in enumerate(labels):
        src = run.maps[(i, i)].src
        ts = src.equispaced_parameters(count)
        for b in range(a, len(labels)):
            j = labels[b]
            f_ij = run.maps[(i, j)]
            mid_points = f_ij.dst.points_at_qh_lengths([f_ij.image_t(float(t)) for t in ts])
            mid_ts = [f_ij.dst.qh_position(Point2(*p)) for p in mid_points]
            for m in labels[b:]:
                f_im, f_jm = run.maps[(i, m)], run.maps[(j, m)]
                direct = np.array([f_im.image_t(float(t)) for t in ts])
                chained = np.array([f_jm.image_t(t) for t in mid_ts])
                error = float(np.abs(direct - chained).max())
                triples += 1
                if error > max_error:
                    max_error, worst = error, (i, j, m)

    report = CompositionReport(triples=triples, samples=count, max_error=max_error, worst=worst)
    if not report.passed:
        logger.warning(f"합성 검사 실패: 최대 오차 {max_error:.3e} at {worst}")
    if samples is None:
        run.composition = report
    return report


def run_point_delta(
    engine: QhEngine,
    required: Sequence[Point2],
    optional: Sequence[Point2],
    settings: HarnessSettings,
    tol: float,
) -> tuple[DeltaEstimate, int]:
    """
    실행 점 집합의 경험적 δ

    중복 점을 합친 전체 점 집합의 거리 행렬을 한 번 계산합니다.
    점 수가 delta_exhaustive_max를 넘으면 4점 조합만 시드 표본으로 훑습니다.

    Returns:
        (DeltaEstimate, 점 수)
    """
    seen: set = set()
    points: list[Point2] = []
    for p in list(required) + list(optional):
        key = (p.x, p.y)
        if key not in seen:
            seen.add(key)
            points.append(p)

    logger.info(f"δ 점 집합 {len(points)}개 거리 행렬 계산")
    matrix = DistanceMatrix.compute(engine, points, tol)
    estimate = four_point_delta(
        matrix,
        exhaustive_max=settings.delta_exhaustive_max,
        samples=settings.delta_sampled_quadruples,
        seed=settings.seed,
    )
    return estimate, len(points)


@dataclass
class ArcSampling:
    """δ 점 집합용 호 표본"""
    endpoints: list[Point2] = field(default_factory=list)
    interior: list[Point2] = field(default_factory=list)

    def add_arc(self, arc, pitch: float):
        pts = arc.sample_by_qh_pitch(pitch)
        self.endpoints.extend([arc.start, arc.end])
        self.interior.extend(Point2(*p) for p in pts[1:-1])
