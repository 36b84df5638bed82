"""
평면 기하 기본 타입

점(Point2)과 축 정렬 사각형(Box)을 정의합니다.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..errors import InvalidParameter


@dataclass(frozen=True)
class Point2:
    """평면 위의 점"""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidParameter(f"좌표가 유한하지 않습니다: ({self.x}, {self.y})")
        # numpy 스칼라가 섞여도 해시/직렬화가 일정하도록 float로 고정
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    @classmethod
    def parse(cls, text: str) -> "Point2":
        """
        "x,y" 형식 문자열 파싱

        Args:
            text: 예) "0,2.71828"

        Returns:
            Point2
        """
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise InvalidParameter(f"점 형식은 'x,y' 입니다: {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]))
        except ValueError as e:
            raise InvalidParameter(f"점 좌표 파싱 오류: {text!r}") from e

    @classmethod
    def from_array(cls, arr: Iterable[float]) -> "Point2":
        x, y = arr
        return cls(float(x), float(y))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def to_list(self) -> list[float]:
        return [self.x, self.y]

    def distance(self, other: "Point2") -> float:
        """유클리드 거리"""
        return math.hypot(self.x - other.x, self.y - other.y)

    def __str__(self) -> str:
        return f"({self.x:.12g}, {self.y:.12g})"


@dataclass(frozen=True)
class Box:
    """축 정렬 사각형 [x0, x1] x [y0, y1]"""
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x0, self.y0, self.x1, self.y1)):
            raise InvalidParameter("사각형 좌표가 유한하지 않습니다.")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise InvalidParameter(
                f"사각형이 비어 있습니다: [{self.x0}, {self.x1}] x [{self.y0}, {self.y1}]"
            )

    @classmethod
    def parse(cls, text: str) -> "Box":
        """'x0,y0,x1,y1' 형식 파싱"""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise InvalidParameter(f"영역 형식은 'x0,y0,x1,y1' 입니다: {text!r}")
        return cls(*(float(p) for p in parts))

    @classmethod
    def around(cls, points: Iterable[Point2], margin: float) -> "Box":
        """점들을 감싸는 사각형에 여백을 더한 영역"""
        pts = list(points)
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        return cls(min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin)

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def intersect(self, other: Optional["Box"]) -> Optional["Box"]:
        """교집합 (비어 있으면 None)"""
        if other is None:
            return self
        x0, y0 = max(self.x0, other.x0), max(self.y0, other.y0)
        x1, y1 = min(self.x1, other.x1), min(self.y1, other.y1)
        if x0 >= x1 or y0 >= y1:
            return None
        return Box(x0, y0, x1, y1)

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        return (
            (pts[:, 0] >= self.x0) & (pts[:, 0] <= self.x1)
            & (pts[:, 1] >= self.y0) & (pts[:, 1] <= self.y1)
        )

    def to_list(self) -> list[float]:
        return [self.x0, self.y0, self.x1, self.y1]
