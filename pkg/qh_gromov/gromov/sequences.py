"""
유한 prefix 그로모프 수열 진단

- 그로모프 수열: (x_i|x_j)_w -> ∞ 를 증가표 m -> min_{i,j>=m} (x_i|x_j)_w 로 대체
- 동치: (x_i|y_j)_w -> ∞ 를 교차 곱 증가표로 대체
척도 T에서 "그로모프 수열 같음"은 꼬리 최솟값 >= T 입니다.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..domain import Point2
from ..engine import QhEngine
from ..errors import InvalidParameter
from .products import DistanceMatrix, as_engine


logger = logging.getLogger(__name__)


def tail_minima(table: np.ndarray) -> np.ndarray:
    """
    증가표 g[m] = min_{i,j >= m} table[i, j]

    정사각 행렬이면 i, j 모두 m 이상, 직사각이면 행/열 각각 m 이상입니다.
    """
    rows, cols = table.shape
    n = min(rows, cols)
    out = np.empty(n)
    running = np.inf
    for m in range(n - 1, -1, -1):
        running = min(running, float(table[m, m:].min()), float(table[m:, m].min()))
        out[m] = running
    return out


@dataclass
class SequencePrefix:
    """유한 수열 prefix와 기준점에서의 쌍별 곱"""
    points: list[Point2]
    basepoint: Point2
    pair_products: np.ndarray
    distance_slack: float

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def compute(
        cls,
        engine: QhEngine,
        points: Sequence[Point2],
        basepoint: Point2,
        tol: float,
    ) -> "SequencePrefix":
        """
        엔진으로 pair_products 계산

        Args:
            engine: QhEngine 또는 영역
            points: x_1, ..., x_n
            basepoint: 기준점 w
            tol: 곱 허용오차 (거리는 tol/3)
        """
        if len(points) == 0:
            raise InvalidParameter("prefix가 비어 있습니다.")
        engine = as_engine(engine)
        matrix = DistanceMatrix.compute(engine, list(points) + [basepoint], tol / 3.0)
        products = matrix.products(len(points))[:-1, :-1]
        return cls(list(points), basepoint, products, tol)

    @classmethod
    def from_matrix(cls, matrix: DistanceMatrix, base: int, indices: Sequence[int], slack: float) -> "SequencePrefix":
        """기존 거리 행렬에서 prefix 구성"""
        idx = np.asarray(indices, dtype=int)
        products = matrix.products(base)[np.ix_(idx, idx)]
        return cls([matrix.points[i] for i in idx], matrix.points[base], products, slack)

    def subsequence(self, indices: Sequence[int]) -> "SequencePrefix":
        idx = np.asarray(indices, dtype=int)
        return SequencePrefix(
            [self.points[i] for i in idx],
            self.basepoint,
            self.pair_products[np.ix_(idx, idx)],
            self.distance_slack,
        )


@dataclass
class SequenceDiagnostics:
    """그로모프 수열 진단 결과"""
    tail: int
    tail_min: float
    growth: list[float]
    slack: float
    scale: Optional[float] = None

    def gromov_like(self, scale: float) -> bool:
        """척도 T에서 그로모프 수열 같음: 꼬리 최솟값 >= T"""
        return self.tail_min >= scale

    def strictly_increasing(self) -> bool:
        return all(b > a for a, b in zip(self.growth, self.growth[1:]))

    def to_dict(self) -> dict:
        return {
            "tail": self.tail,
            "tail_min": self.tail_min,
            "growth": list(self.growth),
            "slack": self.slack,
            "scale": self.scale,
            "gromov_like": self.gromov_like(self.scale) if self.scale is not None else None,
        }


def sequence_diagnostics(prefix: SequencePrefix, tail: int, scale: Optional[float] = None) -> SequenceDiagnostics:
    """
    prefix의 꼬리 최솟값과 증가표

    Args:
        prefix: SequencePrefix
        tail: 꼬리 길이 (<= prefix 길이)
        scale: 판정 척도 T (보고용)

    Returns:
        SequenceDiagnostics
    """
    n = len(prefix)
    if not (1 <= tail <= n):
        raise InvalidParameter(f"tail은 1 이상 prefix 길이 {n} 이하여야 합니다: {tail}")
    growth = tail_minima(prefix.pair_products)
    return SequenceDiagnostics(
        tail=tail,
        tail_min=float(growth[n - tail]),
        growth=[float(v) for v in growth],
        slack=prefix.distance_slack,
        scale=scale,
    )


@dataclass
class EquivalenceDiagnostics:
    """두 prefix의 동치 진단 (교차 곱)"""
    cross: np.ndarray           # (x_i|y_j)_w
    diagonal: list[float]       # (x_i|y_i)_w
    growth: list[float]         # m -> min_{i,j>=m} (x_i|y_j)_w
    slack: float
    scale: Optional[float] = None

    @property
    def tail_min(self) -> float:
        return self.growth[-1]

    def equivalent(self, scale: float) -> bool:
        """척도 T에서 동치: 꼬리 최솟값 >= T"""
        return self.tail_min >= scale

    def to_dict(self) -> dict:
        return {
            "diagonal": list(self.diagonal),
            "growth": list(self.growth),
            "tail_min": self.tail_min,
            "slack": self.slack,
            "scale": self.scale,
            "equivalent": self.equivalent(self.scale) if self.scale is not None else None,
        }


def equivalence_diagnostics(
    engine: QhEngine,
    prefix_a: Sequence[Point2],
    prefix_b: Sequence[Point2],
    basepoint: Point2,
    tol: float,
    scale: Optional[float] = None,
    matrix: Optional[DistanceMatrix] = None,
) -> EquivalenceDiagnostics:
    """
    두 prefix 동치 진단

    Args:
        engine: QhEngine 또는 영역
        prefix_a: x_1, ..., x_n
        prefix_b: y_1, ..., y_n
        basepoint: 기준점 w
        tol: 곱 허용오차
        scale: 판정 척도 T
        matrix: [a..., b..., w] 순서의 기존 거리 행렬 (있으면 재사용)
    """
    na, nb = len(prefix_a), len(prefix_b)
    if na == 0 or nb == 0:
        raise InvalidParameter("prefix가 비어 있습니다.")
    if matrix is None:
        matrix = DistanceMatrix.compute(as_engine(engine), list(prefix_a) + list(prefix_b) + [basepoint], tol / 3.0)
    G = matrix.products(na + nb)
    cross = G[:na, na:na + nb]
    n = min(na, nb)
    return EquivalenceDiagnostics(
        cross=cross,
        diagonal=[float(cross[i, i]) for i in range(n)],
        growth=[float(v) for v in tail_minima(cross)],
        slack=tol,
        scale=scale,
    )
