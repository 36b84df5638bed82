"""
그로모프 곱과 거리 행렬

(x|y)_w = ½ (k(x, w) + k(y, w) - k(x, y))
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..domain import BaseDomain, Point2
from ..engine import QhEngine
from ..errors import InvalidParameter, MatrixInconsistent


logger = logging.getLogger(__name__)


def as_engine(source: QhEngine | BaseDomain) -> QhEngine:
    """영역이 주어지면 기본 설정 엔진 생성"""
    if isinstance(source, QhEngine):
        return source
    if isinstance(source, BaseDomain):
        return QhEngine(source)
    raise InvalidParameter(f"엔진 또는 영역이 필요합니다: {type(source).__name__}")


@dataclass(frozen=True)
class ProductRecord:
    """그로모프 곱 기록"""
    x: Point2
    y: Point2
    w: Point2
    value: float
    distance_slack: float
    k_xw: float
    k_yw: float
    k_xy: float

    @property
    def upper_bound(self) -> float:
        """min(k(x, w), k(y, w)) + slack"""
        return min(self.k_xw, self.k_yw) + self.distance_slack

    def within_bounds(self) -> bool:
        """-slack <= value <= min(k(x,w), k(y,w)) + slack"""
        return -self.distance_slack <= self.value <= self.upper_bound

    def to_dict(self) -> dict:
        return {
            "x": self.x.to_list(),
            "y": self.y.to_list(),
            "w": self.w.to_list(),
            "value": self.value,
            "distance_slack": self.distance_slack,
            "k_xw": self.k_xw,
            "k_yw": self.k_yw,
            "k_xy": self.k_xy,
        }


def gromov_product(
    engine: QhEngine | BaseDomain,
    x: Point2,
    y: Point2,
    w: Point2,
    tol: float,
) -> ProductRecord:
    """
    그로모프 곱 (x|y)_w

    세 거리를 각각 tol/3 로 구해 상한값으로 결합합니다.

    Args:
        engine: QhEngine 또는 영역
        x, y, w: 내부 점
        tol: 곱 허용오차 (distance_slack)

    Returns:
        ProductRecord
    """
    if not tol > 0:
        raise InvalidParameter(f"tol은 양수여야 합니다: {tol}")
    engine = as_engine(engine)
    part = tol / 3.0
    k_xw = engine.distance(x, w, part).upper
    k_yw = engine.distance(y, w, part).upper
    k_xy = engine.distance(x, y, part).upper
    value = 0.5 * (k_xw + k_yw - k_xy)
    return ProductRecord(
        x=x, y=y, w=w, value=value, distance_slack=tol, k_xw=k_xw, k_yw=k_yw, k_xy=k_xy
    )


class DistanceMatrix:
    """
    점 집합의 준쌍곡 거리 행렬

    values는 상한 추정, widths는 추정 폭(상한 - 하한)입니다.
    생성 후 읽기 전용입니다.
    """

    def __init__(
        self,
        values: np.ndarray,
        points: Optional[Sequence[Point2]] = None,
        widths: Optional[np.ndarray] = None,
        tol: float = 0.0,
    ):
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise MatrixInconsistent(f"거리 행렬이 정사각이 아닙니다: {values.shape}")
        if points is not None and len(points) != len(values):
            raise MatrixInconsistent("점 개수와 행렬 크기가 다릅니다.")
        self.values = values
        self.values.flags.writeable = False
        self.widths = np.zeros_like(values) if widths is None else np.array(widths, dtype=float)
        self.widths.flags.writeable = False
        self.points = list(points) if points is not None else None
        self.tol = tol

    @classmethod
    def compute(cls, engine: QhEngine | BaseDomain, points: Sequence[Point2], tol: float) -> "DistanceMatrix":
        """
        엔진으로 모든 쌍의 거리 계산

        Args:
            engine: QhEngine 또는 영역
            points: 점 목록
            tol: 거리 허용오차
        """
        engine = as_engine(engine)
        values, widths = engine.pairwise(points, tol)
        logger.debug(f"거리 행렬 {len(values)}x{len(values)} 계산 완료 (tol={tol:.3g})")
        return cls(values, points, widths, tol)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def max_width(self) -> float:
        return float(self.widths.max()) if len(self) else 0.0

    @property
    def slack(self) -> float:
        """행렬 항목 오차 상한 (허용오차와 추정 폭 중 큰 값)"""
        return max(self.tol, self.max_width)

    def products(self, base: int) -> np.ndarray:
        """기준점 base에서의 그로모프 곱 행렬 G[a, b] = (a|b)_base"""
        d = self.values[:, base]
        return 0.5 * (d[:, None] + d[None, :] - self.values)

    def subset(self, indices: Sequence[int]) -> "DistanceMatrix":
        idx = np.asarray(indices, dtype=int)
        pts = [self.points[i] for i in idx] if self.points is not None else None
        return DistanceMatrix(self.values[np.ix_(idx, idx)], pts, self.widths[np.ix_(idx, idx)], self.tol)

    def check_consistency(self, slack: Optional[float] = None):
        """
        대칭, 영대각, 삼각부등식 검사

        Raises:
            MatrixInconsistent: slack을 넘는 위반
        """
        slack = self.slack if slack is None else slack
        D = self.values
        if not np.isfinite(D).all():
            raise MatrixInconsistent("거리 행렬에 유한하지 않은 값이 있습니다.")
        if np.abs(D - D.T).max(initial=0.0) > slack:
            raise MatrixInconsistent("거리 행렬이 대칭이 아닙니다.")
        if np.abs(np.diag(D)).max(initial=0.0) > slack:
            raise MatrixInconsistent("거리 행렬 대각 성분이 0이 아닙니다.")
        if D.min(initial=0.0) < -slack:
            raise MatrixInconsistent("음의 거리가 있습니다.")
        for b in range(len(D)):
            excess = D - (D[:, b][:, None] + D[b, :][None, :])
            worst = excess.max(initial=0.0)
            if worst > 3.0 * slack:
                a, c = np.unravel_index(int(np.argmax(excess)), excess.shape)
                raise MatrixInconsistent(
                    f"삼각부등식 위반: d({a},{c}) > d({a},{b}) + d({b},{c}) + {3.0 * slack:.3g} (초과 {worst:.3g})"
                )
