"""
폴리라인 호

유클리드/준쌍곡 누적 길이 표를 가지며, 준쌍곡 호장 매개화와
부분호 추출을 제공합니다. 생성 후 불변입니다.
"""

import logging
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import optimize

from ..domain import BaseDomain, Point2
from ..errors import (
    ArcLeavesDomain,
    CurveError,
    InvalidArc,
    ParameterOutOfRange,
    PointNotOnArc,
)
from .quadrature import QUAD_MAX_INTERVALS, QUAD_REL_TOL, segment_qh_lengths


logger = logging.getLogger(__name__)

SNAP_TOL = 1e-9
# 호장 범위 판정 시 부동소수 여유 (상대)
_RANGE_EPS = 1e-12


def _as_xy(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        xy = np.array(points, dtype=float).reshape(-1, 2)
    else:
        xy = np.array(
            [p.to_list() if isinstance(p, Point2) else list(p) for p in points],
            dtype=float,
        ).reshape(-1, 2)
    return xy


class Arc:
    """
    영역 안의 폴리라인 호

    - points: 꼭짓점 (2개 이상, 연속 중복 없음)
    - cum_euclid: 유클리드 누적 길이 (첫 값 0)
    - cum_qh: 준쌍곡 누적 길이 (영역이 주어진 경우)
    """

    def __init__(
        self,
        points: Iterable[Point2] | np.ndarray,
        domain: Optional[BaseDomain] = None,
        *,
        rel_tol: float = QUAD_REL_TOL,
        max_intervals: int = QUAD_MAX_INTERVALS,
    ):
        """
        Args:
            points: 꼭짓점 목록 또는 (n, 2) 배열
            domain: 준쌍곡 길이 기준 영역 (None이면 유클리드 길이만)
            rel_tol: 선분 구적 상대 허용오차
            max_intervals: 선분 구적 구간 상한

        Raises:
            InvalidArc: 점 2개 미만, 연속 중복점, 유한하지 않은 좌표
            ArcLeavesDomain: 꼭짓점 또는 선분이 영역 밖
        """
        xy = _as_xy(points)
        self._init_geometry(xy, domain, rel_tol, max_intervals)
        if domain is None:
            self._seg_qh = None
            self._cum_qh = None
            return

        inside = domain.contains_many(xy)
        if not inside.all():
            bad = xy[np.argmin(inside)]
            raise ArcLeavesDomain(f"꼭짓점이 영역 밖에 있습니다: ({bad[0]:.12g}, {bad[1]:.12g})")
        seg_ok = domain.segments_in_domain(xy[:-1], xy[1:])
        if not seg_ok.all():
            i = int(np.argmin(seg_ok))
            raise ArcLeavesDomain(f"{i}번째 선분이 영역을 벗어납니다.")
        self._set_qh(segment_qh_lengths(domain, xy[:-1], xy[1:], rel_tol, max_intervals))

    @classmethod
    def _trusted(
        cls,
        xy: np.ndarray,
        domain: Optional[BaseDomain],
        seg_qh: Optional[np.ndarray],
        rel_tol: float,
        max_intervals: int,
    ) -> "Arc":
        """
        검증된 선분으로 구성 (부분호/역방향 호용)

        seg_qh의 NaN 항목만 새로 구적합니다.
        """
        arc = cls.__new__(cls)
        arc._init_geometry(np.array(xy, dtype=float), domain, rel_tol, max_intervals)
        if domain is None:
            arc._seg_qh = None
            arc._cum_qh = None
            return arc
        seg_qh = np.array(seg_qh, dtype=float)
        missing = np.isnan(seg_qh)
        if missing.any():
            seg_qh[missing] = segment_qh_lengths(
                domain, arc._xy[:-1][missing], arc._xy[1:][missing], rel_tol, max_intervals
            )
        arc._set_qh(seg_qh)
        return arc

    def _init_geometry(self, xy: np.ndarray, domain, rel_tol: float, max_intervals: int):
        if xy.ndim != 2 or len(xy) < 2:
            raise InvalidArc("호에는 서로 다른 점이 2개 이상 필요합니다.")
        if not np.isfinite(xy).all():
            raise InvalidArc("호 좌표가 유한하지 않습니다.")
        steps = np.hypot(*np.diff(xy, axis=0).T)
        if not (steps > 0.0).all():
            raise InvalidArc(f"연속 중복점이 있습니다: {int(np.argmin(steps > 0.0))}번째 선분")
        xy.flags.writeable = False
        self._xy = xy
        self._domain = domain
        self._rel_tol = rel_tol
        self._max_intervals = max_intervals
        self._cum_euclid = np.concatenate(([0.0], np.cumsum(steps)))
        self._cum_euclid.flags.writeable = False

    def _set_qh(self, seg_qh: np.ndarray):
        seg_qh.flags.writeable = False
        self._seg_qh = seg_qh
        self._cum_qh = np.concatenate(([0.0], np.cumsum(seg_qh)))
        self._cum_qh.flags.writeable = False

    # ========== 기본 속성 ==========

    @property
    def domain(self) -> Optional[BaseDomain]:
        return self._domain

    @property
    def xy(self) -> np.ndarray:
        """(n, 2) 꼭짓점 배열 (읽기 전용)"""
        return self._xy

    @property
    def points(self) -> list[Point2]:
        return [Point2(x, y) for x, y in self._xy]

    @property
    def start(self) -> Point2:
        return Point2(*self._xy[0])

    @property
    def end(self) -> Point2:
        return Point2(*self._xy[-1])

    @property
    def n_segments(self) -> int:
        return len(self._xy) - 1

    @property
    def cum_euclid(self) -> np.ndarray:
        return self._cum_euclid

    @property
    def cum_qh(self) -> np.ndarray:
        self._require_domain()
        return self._cum_qh

    @property
    def segment_qh(self) -> np.ndarray:
        self._require_domain()
        return self._seg_qh

    def __len__(self) -> int:
        return len(self._xy)

    def __repr__(self) -> str:
        qh = f", qh={self._cum_qh[-1]:.12g}" if self._cum_qh is not None else ""
        return f"Arc({self.start} -> {self.end}, vertices={len(self)}{qh})"

    def _require_domain(self):
        if self._domain is None:
            raise CurveError("영역이 지정되지 않은 호에는 준쌍곡 길이가 없습니다.")

    # ========== 길이 ==========

    def euclidean_length(self) -> float:
        """선분 유클리드 길이의 합"""
        return float(self._cum_euclid[-1])

    def qh_length(self) -> float:
        """준쌍곡 길이 l_k(γ) = ∫ ds / δ_X"""
        self._require_domain()
        return float(self._cum_qh[-1])

    def with_domain(self, domain: BaseDomain) -> "Arc":
        """같은 꼭짓점으로 다른 영역에 대한 호 생성"""
        return Arc(self._xy, domain, rel_tol=self._rel_tol, max_intervals=self._max_intervals)

    def _partial_qh(self, i: int, tau: float) -> float:
        """i번째 선분 시작점부터 매개변수 tau 까지의 준쌍곡 길이"""
        if tau <= 0.0:
            return 0.0
        if tau >= 1.0:
            return float(self._seg_qh[i])
        a = self._xy[i]
        b = a + tau * (self._xy[i + 1] - a)
        return float(segment_qh_lengths(self._domain, a[None, :], b[None, :], self._rel_tol, self._max_intervals)[0])

    # ========== 매개화 ==========

    def _check_t(self, t: float) -> float:
        length = self.qh_length()
        eps = _RANGE_EPS * max(length, 1.0)
        if not (-eps <= t <= length + eps) or not np.isfinite(t):
            raise ParameterOutOfRange(f"호장 {t:.12g}이 범위 [0, {length:.12g}]를 벗어납니다.")
        return min(max(t, 0.0), length)

    def _locate_t(self, t: float) -> tuple[int, float]:
        """호장 t를 (선분 번호, 선분 매개변수)로 변환"""
        t = self._check_t(t)
        nseg = self.n_segments
        i = int(np.clip(np.searchsorted(self._cum_qh, t, side="right") - 1, 0, nseg - 1))
        r = t - self._cum_qh[i]
        seg_len = float(self._seg_qh[i])
        if r <= 0.0:
            return i, 0.0
        if r >= seg_len:
            return i, 1.0
        tau = optimize.brentq(
            lambda s: self._partial_qh(i, s) - r, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps
        )
        return i, float(tau)

    def _xy_at(self, i: int, tau: float) -> np.ndarray:
        if tau <= 0.0:
            return self._xy[i].copy()
        if tau >= 1.0:
            return self._xy[i + 1].copy()
        return self._xy[i] + tau * (self._xy[i + 1] - self._xy[i])

    def point_at_qh_length(self, t: float) -> Point2:
        """
        준쌍곡 호장 t인 점

        Args:
            t: 0 <= t <= qh_length

        Returns:
            qh_length(γ|[start, u]) = t 인 점 u

        Raises:
            ParameterOutOfRange: t가 범위 밖
        """
        i, tau = self._locate_t(t)
        return Point2(*self._xy_at(i, tau))

    def points_at_qh_lengths(self, ts: Sequence[float]) -> np.ndarray:
        """여러 호장 위치의 점 (n, 2)"""
        out = np.empty((len(ts), 2))
        for k, t in enumerate(ts):
            i, tau = self._locate_t(float(t))
            out[k] = self._xy_at(i, tau)
        return out

    def qh_position(self, u: Point2, snap_tol: float = SNAP_TOL) -> float:
        """
        호 위의 점 u의 준쌍곡 호장 위치

        u를 가장 가까운 선분에 사영하고, 사영점과의 거리가
        snap_tol * δ(사영점) 이하일 때만 호 위의 점으로 봅니다.

        Raises:
            PointNotOnArc: 호 위의 점이 아님
        """
        self._require_domain()
        p = u.as_array()
        a = self._xy[:-1]
        d = self._xy[1:] - a
        dd = np.einsum("ij,ij->i", d, d)
        tau = np.clip(np.einsum("ij,ij->i", p - a, d) / dd, 0.0, 1.0)
        proj = a + tau[:, None] * d
        dist = np.hypot(*(proj - p).T)
        i = int(np.argmin(dist))

        delta = float(self._domain.signed_distance_many(proj[i][None, :])[0])
        scale = 8 * np.finfo(float).eps * (1.0 + float(np.abs(p).max()))
        if not (delta > 0.0 and dist[i] <= snap_tol * delta + scale):
            raise PointNotOnArc(f"점 {u}이 호 위에 있지 않습니다 (거리 {dist[i]:.3e}).")
        return float(self._cum_qh[i] + self._partial_qh(i, float(tau[i])))

    def equispaced_parameters(self, count: int) -> np.ndarray:
        """양 끝점을 포함하는 등간격 호장 count개"""
        if count < 2:
            raise InvalidArc("표본 수는 2 이상이어야 합니다.")
        return np.linspace(0.0, self.qh_length(), count)

    def sample_by_qh_pitch(self, pitch: float) -> np.ndarray:
        """준쌍곡 호장 간격 pitch 이하로 표본점 추출 (끝점 포함)"""
        count = int(np.ceil(self.qh_length() / pitch)) + 1
        return self.points_at_qh_lengths(self.equispaced_parameters(max(count, 2)))

    # ========== 부분호 ==========

    def subarc_t(self, t0: float, t1: float) -> "Arc":
        """
        호장 구간 [t0, t1]의 부분호

        t0 > t1 이면 역방향 호를 반환합니다.

        Raises:
            InvalidArc: 구간이 퇴화 (t0 == t1)
        """
        if t0 > t1:
            return self.subarc_t(t1, t0).reversed()
        i0, tau0 = self._locate_t(t0)
        i1, tau1 = self._locate_t(t1)
        p0 = self._xy_at(i0, tau0)
        p1 = self._xy_at(i1, tau1)

        # 부분호 꼭짓점: p0, 내부 꼭짓점 (i0+1 .. i1), p1
        inner_idx = np.arange(i0 + 1, i1 + 1)
        rows = [p0] + [self._xy[k] for k in inner_idx] + [p1]
        seg_qh = []
        for k in range(len(rows) - 1):
            if k == 0 or k == len(rows) - 2:
                seg_qh.append(np.nan)
            else:
                seg_qh.append(self._seg_qh[inner_idx[k - 1]])

        xy, keep_seg = self._dedupe(np.array(rows), np.array(seg_qh))
        if len(xy) < 2:
            raise InvalidArc(f"퇴화 부분호입니다: [{t0:.12g}, {t1:.12g}]")
        return Arc._trusted(xy, self._domain, keep_seg, self._rel_tol, self._max_intervals)

    @staticmethod
    def _dedupe(xy: np.ndarray, seg_qh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """연속 중복점 제거 (제거된 선분의 기존 길이는 재계산 대상으로 표시)"""
        keep_pts = [0]
        keep_seg: list[float] = []
        for k in range(1, len(xy)):
            if np.array_equal(xy[k], xy[keep_pts[-1]]):
                if keep_seg:
                    keep_seg[-1] = np.nan
                continue
            keep_seg.append(seg_qh[k - 1])
            keep_pts.append(k)
        return xy[keep_pts], np.array(keep_seg, dtype=float)

    def subarc(self, u: Point2, v: Point2, snap_tol: float = SNAP_TOL) -> "Arc":
        """
        호 위의 두 점 사이 닫힌 부분호 α|[u, v]

        Raises:
            PointNotOnArc: u 또는 v가 호 위에 있지 않음
            InvalidArc: u와 v가 같은 위치 (퇴화)
        """
        tu = self.qh_position(u, snap_tol)
        tv = self.qh_position(v, snap_tol)
        if abs(tu - tv) <= snap_tol:
            raise InvalidArc(f"퇴화 부분호입니다: {u} = {v}")
        return self.subarc_t(tu, tv)

    def reversed(self) -> "Arc":
        """반대 방향 호"""
        seg_qh = None if self._seg_qh is None else self._seg_qh[::-1].copy()
        return Arc._trusted(self._xy[::-1].copy(), self._domain, seg_qh, self._rel_tol, self._max_intervals)
