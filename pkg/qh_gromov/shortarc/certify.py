"""
h-short 호 판정과 곱 샌드위치 검증

- is_h_short: qh_length(arc) <= k_lower + h
- verify_product_sandwich: 호 위의 z에 대해 k(x,z) - h/2 <= (z|y)_x <= k(x,z)
- subarc_is_short: 부분호 재인증
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..domain import Point2
from ..engine import QhEngine, ShortArcCert
from ..errors import InvalidParameter, ShortnessNotCertified


logger = logging.getLogger(__name__)

# 길이 비교 수치 여유
NUMERIC_TOL = 1e-8
# 슬랙 바닥값 (구적 오차)
SLACK_FLOOR = 1e-9


def is_h_short(cert: ShortArcCert, h: float) -> bool:
    """
    h-short 판정

    k_lower <= k_X 이므로 참이면 l(γ) <= k_X(x, y) + h 입니다.
    """
    return cert.arc.qh_length() <= cert.k_lower + h + NUMERIC_TOL


def _cert_h(cert: ShortArcCert, h: Optional[float]) -> float:
    if h is not None:
        return h
    return cert.h_requested if cert.h_requested is not None else cert.h_achieved


@dataclass
class SandwichSample:
    """샌드위치 표본 하나"""
    t: float
    z: Point2
    k_xz: float
    product: float
    lower_margin: float   # (z|y)_x - (k(x,z) - h/2)
    upper_margin: float   # k(x,z) - (z|y)_x
    slack: float

    @property
    def passed(self) -> bool:
        return self.lower_margin >= -self.slack and self.upper_margin >= -self.slack

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "z": self.z.to_list(),
            "k_xz": self.k_xz,
            "product": self.product,
            "lower_margin": self.lower_margin,
            "upper_margin": self.upper_margin,
            "slack": self.slack,
            "passed": self.passed,
        }


@dataclass
class SandwichReport:
    """곱 샌드위치 검증 결과"""
    h: float
    x: Point2
    y: Point2
    samples: list[SandwichSample] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.samples)

    @property
    def failures(self) -> int:
        return sum(not s.passed for s in self.samples)

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "x": self.x.to_list(),
            "y": self.y.to_list(),
            "sample_count": len(self.samples),
            "passed": self.passed,
            "failures": self.failures,
            "samples": [s.to_dict() for s in self.samples],
        }


def verify_product_sandwich(
    engine: QhEngine,
    cert: ShortArcCert,
    sample_count: int,
    h: Optional[float] = None,
    tol: Optional[float] = None,
) -> SandwichReport:
    """
    곱 샌드위치 검증

    양 끝점을 포함한 등간격 호장 위치의 z마다 k(x,z), (z|y)_x 를 계산합니다.
    슬랙은 세 거리 추정 폭으로 정합니다: 1.5 w(x,z) + 0.5 (w(x,y) + w(z,y)).

    Args:
        engine: 거리 엔진
        cert: x -> y 인증서
        sample_count: 표본 수 (>= 2)
        h: 기준 h (기본: 인증서 요청값)
        tol: 거리 허용오차 (기본 h/4)

    Returns:
        SandwichReport (실패는 보고 내용)
    """
    if sample_count < 2:
        raise InvalidParameter(f"표본 수는 2 이상이어야 합니다: {sample_count}")
    h = _cert_h(cert, h)
    tol = tol if tol is not None else max(h, 1e-6) / 4.0
    arc = cert.arc
    x, y = arc.start, arc.end
    xy_est = engine.distance(x, y, tol)

    report = SandwichReport(h=h, x=x, y=y)
    ts = arc.equispaced_parameters(sample_count)
    zs = arc.points_at_qh_lengths(ts)
    for t, (zx, zy) in zip(ts, zs):
        z = Point2(zx, zy)
        xz = engine.distance(x, z, tol)
        zy_est = engine.distance(z, y, tol)
        product = 0.5 * (xz.upper + xy_est.upper - zy_est.upper)
        slack = 1.5 * xz.width + 0.5 * (xy_est.width + zy_est.width) + SLACK_FLOOR
        report.samples.append(
            SandwichSample(
                t=float(t),
                z=z,
                k_xz=xz.upper,
                product=product,
                lower_margin=product - (xz.upper - h / 2.0),
                upper_margin=xz.upper - product,
                slack=slack,
            )
        )

    if not report.passed:
        logger.warning(f"샌드위치 위반 {report.failures}/{len(report.samples)}: {x} -> {y}")
    return report


def subarc_is_short(
    engine: QhEngine,
    cert: ShortArcCert,
    u: Point2,
    v: Point2,
    h: Optional[float] = None,
) -> ShortArcCert:
    """
    부분호 재인증

    새 거리 추정으로 k_lower(sub)를 구하고
    qh_length(sub) <= k_lower(sub) + h + slack 을 확인합니다 (slack = 추정 폭).

    Raises:
        PointNotOnArc: u 또는 v가 호 위에 있지 않음
        ShortnessNotCertified: 부분호가 h + slack 을 넘음
    """
    h = _cert_h(cert, h)
    arc = cert.arc
    tu, tv = arc.qh_position(u), arc.qh_position(v)
    length = arc.qh_length()
    if min(tu, tv) <= SLACK_FLOOR and max(tu, tv) >= length - SLACK_FLOOR:
        return cert if tu <= tv else cert.reversed()

    sub = arc.subarc_t(tu, tv)
    est = engine.distance(sub.start, sub.end, max(h, 1e-6) / 4.0)
    sub_len = sub.qh_length()
    sub_cert = ShortArcCert(
        arc=sub,
        h_achieved=max(0.0, sub_len - est.lower),
        k_lower=est.lower,
        k_upper=min(est.upper, sub_len),
        h_requested=h,
    )
    slack = est.width + SLACK_FLOOR
    if sub_cert.h_achieved > h + slack:
        raise ShortnessNotCertified(
            f"부분호 h_achieved {sub_cert.h_achieved:.6g} > h + slack {h + slack:.6g}",
            certificate=sub_cert,
        )
    return sub_cert
