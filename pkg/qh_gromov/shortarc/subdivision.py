"""
h-short 삼각형 분할

변 A -> B (맞은편 꼭짓점 C)를 세 조각으로 나눕니다.
- prime: 시작 조각, 길이 (C|B)_A
- star: 가운데 조각
- doubleprime: 끝 조각, 길이 (C|A)_B
곱은 인증서 거리 중간값으로 계산하고, 슬랙은 인증서 폭 합의 절반입니다.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

from ..curve import SNAP_TOL, Arc
from ..domain import Point2
from ..engine import ShortArcCert
from ..errors import CutOverflow, InvalidParameter, NotATriangle


logger = logging.getLogger(__name__)

SLACK_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class Subdivision:
    """한 변의 세 조각 분할"""
    side: Arc
    w: Point2
    p: Point2
    t_w: float
    t_p: float
    cut_start: float     # 시작 조각 길이로 쓴 곱
    cut_end: float       # 끝 조각 길이로 쓴 곱
    prime: Optional[Arc]
    star: Optional[Arc]
    doubleprime: Optional[Arc]
    slack: float
    clamped: bool = False

    @property
    def piece_lengths(self) -> tuple[float, float, float]:
        return tuple(0.0 if a is None else a.qh_length() for a in (self.prime, self.star, self.doubleprime))

    @property
    def star_length(self) -> float:
        return self.piece_lengths[1]

    def pieces_sum_error(self) -> float:
        """조각 길이 합과 변 길이의 차"""
        return abs(sum(self.piece_lengths) - self.side.qh_length())

    def star_within(self, h: float) -> bool:
        return self.star_length <= h + self.slack

    def to_dict(self, h: Optional[float] = None) -> dict:
        lengths = self.piece_lengths
        out = {
            "start": self.side.start.to_list(),
            "end": self.side.end.to_list(),
            "side_length": self.side.qh_length(),
            "w": self.w.to_list(),
            "p": self.p.to_list(),
            "t_w": self.t_w,
            "t_p": self.t_p,
            "cut_start": self.cut_start,
            "cut_end": self.cut_end,
            "piece_lengths": list(lengths),
            "pieces_sum_error": self.pieces_sum_error(),
            "slack": self.slack,
            "clamped": self.clamped,
        }
        if h is not None:
            out["star_within_h"] = self.star_within(h)
        return out


@dataclass
class TriangleSubdivision:
    """삼각형 z, x, y의 세 변 분할"""
    alpha: Subdivision   # x -> y
    beta: Subdivision    # z -> x
    gamma: Subdivision   # z -> y
    products: dict
    slack: float
    h: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "slack": self.slack,
            "products": dict(self.products),
            "alpha": self.alpha.to_dict(self.h),
            "beta": self.beta.to_dict(self.h),
            "gamma": self.gamma.to_dict(self.h),
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def _same_point(a: Point2, b: Point2, scale: float) -> bool:
    return a.distance(b) <= SNAP_TOL * max(scale, 1e-300) + 8e-16 * (1.0 + max(abs(a.x), abs(a.y)))


def _clamp(t: float, length: float, slack: float, label: str) -> tuple[float, bool]:
    if -slack <= t <= length + slack:
        clamped = min(max(t, 0.0), length)
        return clamped, clamped != t
    raise CutOverflow(f"{label} 절단 위치 {t:.12g}이 변 길이 {length:.12g}을 슬랙 {slack:.3g} 이상 벗어납니다.")


def subdivide_side(side: Arc, cut_start: float, cut_end: float, slack: float) -> Subdivision:
    """
    변 하나를 곱 길이로 세 조각 분할

    Args:
        side: 변 A -> B
        cut_start: (C|B)_A
        cut_end: (C|A)_B
        slack: 절단 길이 허용오차

    Raises:
        CutOverflow: 절단 길이가 변 길이를 슬랙 이상 넘음
    """
    length = side.qh_length()
    t_w, c1 = _clamp(cut_start, length, slack, "시작")
    t_p, c2 = _clamp(length - cut_end, length, slack, "끝")
    clamped = c1 or c2
    if t_w > t_p:
        if t_w - t_p > slack:
            raise CutOverflow(f"두 절단 위치가 겹칩니다: {t_w:.12g} > {t_p:.12g}")
        t_w = t_p = (t_w + t_p) / 2.0
        clamped = True
    if clamped:
        logger.debug(f"절단 위치 보정: t_w={t_w:.12g}, t_p={t_p:.12g}, 길이={length:.12g}")

    def piece(a: float, b: float) -> Optional[Arc]:
        if b - a <= SNAP_TOL:
            return None
        return side.subarc_t(a, b)

    return Subdivision(
        side=side,
        w=side.point_at_qh_length(t_w),
        p=side.point_at_qh_length(t_p),
        t_w=t_w,
        t_p=t_p,
        cut_start=cut_start,
        cut_end=cut_end,
        prime=piece(0.0, t_w),
        star=piece(t_w, t_p),
        doubleprime=piece(t_p, length),
        slack=slack,
        clamped=clamped,
    )


def subdivide_triangle(
    beta: ShortArcCert,
    gamma: ShortArcCert,
    alpha: ShortArcCert,
    h: float,
) -> TriangleSubdivision:
    """
    h-short 삼각형 분할

    Args:
        beta: z -> x 인증서
        gamma: z -> y 인증서
        alpha: x -> y 인증서
        h: 변의 h (가운데 조각 상한)

    Returns:
        TriangleSubdivision (가운데 조각 검사는 checks에 기록)

    Raises:
        NotATriangle: 꼭짓점 불일치 또는 퇴화 꼭짓점
        CutOverflow: 곱이 변 길이를 슬랙 이상 넘음
    """
    if h < 0:
        raise InvalidParameter(f"h는 0 이상이어야 합니다: {h}")
    z, x, y = beta.start, beta.end, gamma.end
    scale = max(beta.length, gamma.length, alpha.length, 1.0)
    if not _same_point(gamma.start, z, scale):
        raise NotATriangle(f"beta와 gamma의 시작점이 다릅니다: {z} / {gamma.start}")
    if not _same_point(alpha.start, x, scale):
        raise NotATriangle(f"alpha 시작점이 beta 끝점과 다릅니다: {alpha.start} / {x}")
    if not _same_point(alpha.end, y, scale):
        raise NotATriangle(f"alpha 끝점이 gamma 끝점과 다릅니다: {alpha.end} / {y}")
    if z == x or z == y or x == y:
        raise NotATriangle(f"퇴화 꼭짓점: z={z}, x={x}, y={y}")

    k_zx, k_zy, k_xy = beta.k_mid, gamma.k_mid, alpha.k_mid
    products = {
        "xy_z": 0.5 * (k_zx + k_zy - k_xy),
        "zy_x": 0.5 * (k_zx + k_xy - k_zy),
        "zx_y": 0.5 * (k_zy + k_xy - k_zx),
    }
    slack = 0.5 * (beta.width + gamma.width + alpha.width) + SLACK_FLOOR

    sub_alpha = subdivide_side(alpha.arc, products["zy_x"], products["zx_y"], slack)
    sub_beta = subdivide_side(beta.arc, products["xy_z"], products["zy_x"], slack)
    sub_gamma = subdivide_side(gamma.arc, products["xy_z"], products["zx_y"], slack)

    result = TriangleSubdivision(
        alpha=sub_alpha, beta=sub_beta, gamma=sub_gamma, products=products, slack=slack, h=h
    )
    for name, sub in (("alpha", sub_alpha), ("beta", sub_beta), ("gamma", sub_gamma)):
        result.checks[f"{name}_star_within_h"] = sub.star_within(h)
        result.checks[f"{name}_pieces_sum"] = sub.pieces_sum_error() <= 1e-8 * max(1.0, sub.side.qh_length())
    if not result.passed:
        failed = [k for k, v in result.checks.items() if not v]
        logger.warning(f"삼각형 분할 검사 실패: {failed}")
    return result
