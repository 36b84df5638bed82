"""
그로모프 수열에서 h-short 호 수열 구성

기준점 x와 prefix {u_i}에서
- N(m): 꼬리 곱 min_{i,j>=N} (u_i|u_j)_x >= m 인 최소 인덱스 (N(m) > N(m-1))
- β_m: x -> u_{N(m)} h-short 호를 길이 m으로 자른 호
- f_mn: x를 고정하는 길이 사상 β_m -> β_n
변위 sup k(f_mn(z), z)를 4 δ̂ + 2h와 비교합니다.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..curve import SNAP_TOL
from ..domain import BaseDomain, Point2
from ..engine import QhEngine, ShortArcCert
from ..errors import InvalidParameter, PrefixTooShort
from ..gromov import DeltaEstimate, SequenceDiagnostics, as_engine, SequencePrefix, sequence_diagnostics
from ..settings import HarnessSettings
from ..shortarc import LengthMap, make_length_map, subarc_is_short
from .checks import (
    ArcSampling,
    CompositionReport,
    DisplacementRow,
    composition_check,
    displacement_report,
    run_point_delta,
)


logger = logging.getLogger(__name__)

TRIM_TOL = 1e-6
# 잘라낼 호가 m보다 짧아도 받아들이는 여유
SHORTFALL_TOL = 1e-7
MAP_OVERFLOW_TOL = 1e-6


@dataclass
class Lemma31Run:
    """단일 수열 구성 실행 결과"""
    basepoint: Point2
    prefix: list[Point2]
    h: float
    m_max: int
    growth: list[float]
    product_slack: float
    selected: list[int]
    source_certs: list[ShortArcCert]
    betas: list[ShortArcCert]
    maps: dict[tuple[int, int], LengthMap]
    delta: DeltaEstimate
    delta_point_count: int
    bound: float
    bound_slack: float
    distance_tol: float
    claim_growth: Optional[SequenceDiagnostics]
    engine: QhEngine = field(repr=False)
    settings: HarnessSettings = field(repr=False)
    displacements: Optional[list[DisplacementRow]] = None
    composition: Optional[CompositionReport] = None

    @property
    def delta_hat(self) -> float:
        return self.delta.delta_hat

    def trim_errors(self) -> list[float]:
        return [abs(b.arc.qh_length() - m) for m, b in enumerate(self.betas, start=1)]

    @property
    def checks(self) -> dict[str, bool]:
        rows = displacement_report(self)
        snap = SNAP_TOL * self.engine.boundary_distance(self.basepoint)
        return {
            "trim_exact": max(self.trim_errors()) <= TRIM_TOL,
            "anchored_at_basepoint": all(
                f.apply_t(f.src_anchor_t).distance(self.basepoint) <= snap for f in self.maps.values()
            ),
            "displacement_within_bound": all(r.passed for r in rows),
            "composition": composition_check(self).passed,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        rows = displacement_report(self)
        return {
            "basepoint": self.basepoint.to_list(),
            "prefix": [p.to_list() for p in self.prefix],
            "h": self.h,
            "m_max": self.m_max,
            "prefix_growth": list(self.growth),
            "product_slack": self.product_slack,
            "selected": [
                {
                    "m": m,
                    "index": n,
                    "target": self.prefix[n].to_list(),
                    "source_length": cert.length,
                    "source_h_achieved": cert.h_achieved,
                    "beta_end": beta.end.to_list(),
                    "beta_length": beta.length,
                    "beta_h_achieved": beta.h_achieved,
                    "beta_width": beta.width,
                }
                for m, (n, cert, beta) in enumerate(zip(self.selected, self.source_certs, self.betas), start=1)
            ],
            "trim_errors": self.trim_errors(),
            "delta": self.delta.to_dict(),
            "delta_point_count": self.delta_point_count,
            "bound": self.bound,
            "bound_slack": self.bound_slack,
            "distance_tol": self.distance_tol,
            "displacements": [r.to_dict() for r in rows],
            "composition": composition_check(self).to_dict(),
            "endpoint_growth": self.claim_growth.to_dict() if self.claim_growth is not None else None,
            "checks": self.checks,
            "passed": self.passed,
        }


def _select_indices(
    engine: QhEngine,
    x: Point2,
    prefix: Sequence[Point2],
    growth: Sequence[float],
    slack: float,
    h: float,
    m_max: int,
) -> tuple[list[int], list[ShortArcCert]]:
    """N(1) < N(2) < ... 과 각 x -> u_{N(m)} 인증서"""
    selected: list[int] = []
    certs: list[ShortArcCert] = []
    start = 0
    for m in range(1, m_max + 1):
        found = None
        for n in range(start, len(prefix)):
            if growth[n] < m - slack:
                continue
            cert = engine.short_arc(x, prefix[n], h)
            if cert.length < m - SHORTFALL_TOL:
                logger.debug(f"m={m}: 인덱스 {n}의 호 길이 {cert.length:.6g} < m, 다음 인덱스로")
                continue
            found = (n, cert)
            break
        if found is None:
            raise PrefixTooShort(
                f"m={m}: 꼬리 곱 {m} 이상을 만족하는 인덱스가 없습니다 "
                f"(prefix 길이 {len(prefix)}, 최대 꼬리 곱 {max(growth):.6g})"
            )
        n, cert = found
        selected.append(n)
        certs.append(cert)
        start = n + 1
        logger.info(f"N({m}) = {n}, 호 길이 {cert.length:.6g}")
    return selected, certs


def lemma31_construct(
    engine: QhEngine | BaseDomain,
    x: Point2,
    prefix: Sequence[Point2],
    h: float,
    m_max: int,
    settings: Optional[HarnessSettings] = None,
) -> Lemma31Run:
    """
    h-short 호 수열 β_m과 길이 사상 f_mn 구성

    Args:
        engine: 거리 엔진
        x: 기준점
        prefix: 그로모프 수열 prefix u_1, ..., u_n
        h: 짧음 매개변수 (> 0)
        m_max: 만들 호 수 (>= 2)
        settings: 실행 설정

    Returns:
        Lemma31Run (변위 표와 합성 검사 포함)

    Raises:
        InvalidParameter: h <= 0 또는 m_max < 2
        PrefixTooShort: 필요한 곱 수준을 만족하는 인덱스가 없음
        ShortnessNotCertified: 호 인증 실패
    """
    engine = as_engine(engine)
    settings = settings or HarnessSettings()
    if not h > 0:
        raise InvalidParameter(f"h는 양수여야 합니다: {h}")
    if m_max < 2:
        raise InvalidParameter(f"m_max는 2 이상이어야 합니다: {m_max}")
    if len(prefix) == 0:
        raise PrefixTooShort("prefix가 비어 있습니다.")

    distance_tol = min(engine.settings.tol, h / 4.0)
    product_tol = 3.0 * distance_tol
    logger.info(f"단일 수열 구성 시작: x={x}, prefix {len(prefix)}개, h={h}, m_max={m_max}")

    seq = SequencePrefix.compute(engine, prefix, x, product_tol)
    diag = sequence_diagnostics(seq, tail=1, scale=m_max + 2 * h)
    if not diag.gromov_like(m_max + 2 * h):
        logger.warning(f"prefix 꼬리 곱 {diag.tail_min:.6g} < m_max + 2h = {m_max + 2 * h:.6g}")

    selected, source_certs = _select_indices(
        engine, x, prefix, diag.growth, seq.distance_slack, h, m_max
    )

    betas: list[ShortArcCert] = []
    for m, cert in enumerate(source_certs, start=1):
        if cert.length > m:
            end = cert.arc.point_at_qh_length(float(m))
            beta = subarc_is_short(engine, cert, x, end, h)
        else:
            beta = cert
        betas.append(beta)

    maps: dict[tuple[int, int], LengthMap] = {}
    for m in range(1, m_max + 1):
        for n in range(m, m_max + 1):
            maps[(m, n)] = make_length_map(
                betas[m - 1].arc, betas[n - 1].arc, x, x, overflow_tol=MAP_OVERFLOW_TOL
            )

    sampling = ArcSampling()
    for beta in betas:
        sampling.add_arc(beta.arc, h)
    required = [x] + [prefix[n] for n in selected] + sampling.endpoints
    delta, full_count = run_point_delta(engine, required, sampling.interior, settings, distance_tol)

    endpoints = [b.end for b in betas]
    claim = sequence_diagnostics(
        SequencePrefix.compute(engine, endpoints, x, product_tol), tail=len(endpoints)
    )

    run = Lemma31Run(
        basepoint=x,
        prefix=list(prefix),
        h=h,
        m_max=m_max,
        growth=diag.growth,
        product_slack=seq.distance_slack,
        selected=selected,
        source_certs=source_certs,
        betas=betas,
        maps=maps,
        delta=delta,
        delta_point_count=full_count,
        bound=4.0 * delta.delta_hat + 2.0 * h,
        bound_slack=4.0 * delta.slack,
        distance_tol=distance_tol,
        claim_growth=claim,
        engine=engine,
        settings=settings,
    )
    displacement_report(run)
    composition_check(run)
    logger.info(f"단일 수열 구성 완료: δ̂={run.delta_hat:.6g}, 상한={run.bound:.6g}, 통과={run.passed}")
    return run
