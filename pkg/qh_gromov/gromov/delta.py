"""
4점 조건 경험적 δ

deficiency(x, y, z, w) = min{(x|z)_w, (z|y)_w} - (x|y)_w
delta_hat = max(0, 검사한 순서 있는 4점의 최대 deficiency)
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..domain import Point2
from .products import DistanceMatrix


logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX = 60
SAMPLED_QUADRUPLES = 200_000


@dataclass
class DeltaEstimate:
    """경험적 4점 δ 추정"""
    delta_hat: float
    witness: Optional[tuple[int, int, int, int]]  # (x, y, z, w) 인덱스
    quadruples_checked: int
    exhaustive: bool
    slack: float
    points: Optional[list[Point2]] = None
    point_count: int = 0
    raw_max: float = 0.0    # 0으로 자르기 전 최대 deficiency
    notes: list[str] = field(default_factory=list)

    @property
    def witness_points(self) -> Optional[list[Point2]]:
        if self.witness is None or self.points is None:
            return None
        return [self.points[i] for i in self.witness]

    def to_dict(self) -> dict:
        wp = self.witness_points
        return {
            "delta_hat": self.delta_hat,
            "raw_max": self.raw_max,
            "witness": list(self.witness) if self.witness is not None else None,
            "witness_points": [p.to_list() for p in wp] if wp is not None else None,
            "quadruples_checked": self.quadruples_checked,
            "exhaustive": self.exhaustive,
            "slack": self.slack,
            "point_count": self.point_count,
        }


def four_point_delta(
    matrix: DistanceMatrix | np.ndarray,
    basepoints: Optional[Sequence[int]] = None,
    *,
    exhaustive_max: int = EXHAUSTIVE_MAX,
    samples: int = SAMPLED_QUADRUPLES,
    seed: int = 0,
    check: bool = True,
) -> DeltaEstimate:
    """
    4점 조건 δ 추정

    n <= exhaustive_max 이면 모든 순서 있는 4점 (중복 포함)을 검사하고,
    그보다 크면 시드 기반 균등 표본을 검사합니다.

    Args:
        matrix: 거리 행렬
        basepoints: 기준점 인덱스 (None이면 전체)
        exhaustive_max: 전수 검사 상한
        samples: 표본 4점 수
        seed: 표본 시드
        check: 행렬 일관성 검사 여부

    Returns:
        DeltaEstimate

    Raises:
        MatrixInconsistent: 대칭/영대각/삼각부등식 위반
    """
    if not isinstance(matrix, DistanceMatrix):
        matrix = DistanceMatrix(matrix)
    if check:
        matrix.check_consistency()

    n = len(matrix)
    bases = list(range(n)) if basepoints is None else [int(b) for b in basepoints]
    # 4점 결손의 오차: 곱 세 개, 곱마다 거리 세 개의 절반
    slack = 3.0 * matrix.slack
    if n == 0 or not bases:
        return DeltaEstimate(0.0, None, 0, True, slack, matrix.points, n)

    if n <= exhaustive_max:
        best, witness, checked = _scan_exhaustive(matrix, bases)
        exhaustive = True
    else:
        best, witness, checked = _scan_sampled(matrix, bases, samples, seed)
        exhaustive = False
        logger.info(f"점 {n}개 > {exhaustive_max}: 4점 {checked}개 표본 검사 (seed={seed})")

    return DeltaEstimate(
        delta_hat=max(0.0, best),
        witness=witness,
        quadruples_checked=checked,
        exhaustive=exhaustive,
        slack=slack,
        points=matrix.points,
        point_count=n,
        raw_max=best,
    )


def _scan_exhaustive(matrix: DistanceMatrix, bases: list[int]) -> tuple[float, tuple, int]:
    n = len(matrix)
    best = -np.inf
    witness = None
    for w in bases:
        G = matrix.products(w)
        # D[x, y, z] = min(G[x, z], G[z, y]) - G[x, y]
        deficiency = np.minimum(G[:, None, :], G.T[None, :, :]) - G[:, :, None]
        k = int(np.argmax(deficiency))
        value = float(deficiency.flat[k])
        if value > best:
            x, y, z = np.unravel_index(k, deficiency.shape)
            best, witness = value, (int(x), int(y), int(z), int(w))
    return best, witness, n ** 3 * len(bases)


def _scan_sampled(matrix: DistanceMatrix, bases: list[int], samples: int, seed: int) -> tuple[float, tuple, int]:
    n = len(matrix)
    rng = np.random.default_rng(seed)
    xyz = rng.integers(0, n, size=(samples, 3))
    w = np.asarray(bases)[rng.integers(0, len(bases), size=samples)]
    D = matrix.values
    x, y, z = xyz.T

    def prod(a, b):
        return 0.5 * (D[a, w] + D[b, w] - D[a, b])

    deficiency = np.minimum(prod(x, z), prod(z, y)) - prod(x, y)
    k = int(np.argmax(deficiency))
    return float(deficiency[k]), (int(x[k]), int(y[k]), int(z[k]), int(w[k])), samples
