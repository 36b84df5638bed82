"""
길이 사상

앵커에서 잰 준쌍곡 호장을 보존하는 대응
f(u) = dst(dst_anchor_t + orientation * (t_u - src_anchor_t))
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..curve import SNAP_TOL, Arc
from ..domain import Point2
from ..errors import InvalidParameter, RangeOverflow


logger = logging.getLogger(__name__)

OVERFLOW_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LengthMap:
    """
    앵커 기반 길이 사상

    - src, dst: 정의역/공역 호
    - src_anchor_t, dst_anchor_t: 앵커의 호장 위치
    - orientation: +1 (같은 방향) 또는 -1
    """
    src: Arc
    dst: Arc
    src_anchor_t: float
    dst_anchor_t: float
    orientation: int = 1
    overflow_tol: float = OVERFLOW_TOL

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise InvalidParameter(f"orientation은 +1 또는 -1 이어야 합니다: {self.orientation}")
        lo, hi = sorted((self.raw_image_t(0.0), self.raw_image_t(self.src.qh_length())))
        dst_len = self.dst.qh_length()
        if lo < -self.overflow_tol or hi > dst_len + self.overflow_tol:
            raise RangeOverflow(
                f"상 [{lo:.12g}, {hi:.12g}]이 대상 호 [0, {dst_len:.12g}]를 벗어납니다 "
                f"(허용 {self.overflow_tol:.3g})"
            )

    def raw_image_t(self, t: float) -> float:
        """범위 검사와 클리핑 없는 상 호장"""
        return self.dst_anchor_t + self.orientation * (t - self.src_anchor_t)

    def image_t(self, t: float) -> float:
        """
        호장 t의 상 호장

        Raises:
            RangeOverflow: t가 src 범위 밖이거나 상이 dst 밖
        """
        src_len = self.src.qh_length()
        if t < -self.overflow_tol or t > src_len + self.overflow_tol:
            raise RangeOverflow(f"호장 {t:.12g}이 원 호 범위 [0, {src_len:.12g}] 밖입니다.")
        image = self.raw_image_t(min(max(t, 0.0), src_len))
        return float(np.clip(image, 0.0, self.dst.qh_length()))

    def apply_t(self, t: float) -> Point2:
        return self.dst.point_at_qh_length(self.image_t(t))

    def apply(self, u: Point2, snap_tol: float = SNAP_TOL) -> Point2:
        """
        점 u의 상

        Raises:
            PointNotOnArc: u가 src 위에 있지 않음
            RangeOverflow: 상이 dst 밖
        """
        return self.apply_t(self.src.qh_position(u, snap_tol))

    def compose(self, other: "LengthMap") -> "LengthMap":
        """
        합성 other ∘ self (self.dst 와 other.src 가 같은 호)
        """
        if self.dst is not other.src and not np.array_equal(self.dst.xy, other.src.xy):
            raise InvalidParameter("합성하려면 앞 사상의 공역과 뒤 사상의 정의역이 같아야 합니다.")
        return LengthMap(
            src=self.src,
            dst=other.dst,
            src_anchor_t=self.src_anchor_t,
            dst_anchor_t=other.raw_image_t(self.dst_anchor_t),
            orientation=self.orientation * other.orientation,
            overflow_tol=self.overflow_tol + other.overflow_tol,
        )

    def to_dict(self) -> dict:
        return {
            "src": [self.src.start.to_list(), self.src.end.to_list()],
            "dst": [self.dst.start.to_list(), self.dst.end.to_list()],
            "src_anchor_t": self.src_anchor_t,
            "dst_anchor_t": self.dst_anchor_t,
            "orientation": self.orientation,
        }


def make_length_map(
    src: Arc,
    dst: Arc,
    src_anchor: Point2,
    dst_anchor: Point2,
    orientation: int = 1,
    overflow_tol: float = OVERFLOW_TOL,
) -> LengthMap:
    """
    앵커 점으로 길이 사상 생성

    Args:
        src, dst: 호
        src_anchor, dst_anchor: 각 호 위의 앵커 점
        orientation: +1 / -1
        overflow_tol: 범위 검사 허용오차

    Raises:
        PointNotOnArc: 앵커가 호 위에 있지 않음
        RangeOverflow: src 범위의 상이 dst에 들어가지 않음
    """
    return LengthMap(
        src=src,
        dst=dst,
        src_anchor_t=src.qh_position(src_anchor),
        dst_anchor_t=dst.qh_position(dst_anchor),
        orientation=orientation,
        overflow_tol=overflow_tol,
    )


def apply_length_map(length_map: LengthMap, u: Point2) -> Point2:
    """길이 사상 적용"""
    return length_map.apply(u)
