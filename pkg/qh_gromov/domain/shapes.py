"""
평면 영역 정의

모든 영역은 BaseDomain을 상속하고, 부호 거리 함수(내부 양수)를 구현합니다.
경계 거리 δ_X(x) = dist(x, ∂X)는 종류별 닫힌 형식으로 계산합니다.
"""

import json
import logging
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..errors import InvalidDomainSpec, PointOutsideDomain
from .geometry import Box, Point2


logger = logging.getLogger(__name__)

# 선분 판정 시 표본 상한 (초과하면 구 추적으로 판정)
_MAX_SEGMENT_SAMPLES = 200_000
# 구 추적에서 경계 접촉으로 보는 거리
_TRACE_FLOOR = 1e-13


class BaseDomain(ABC):
    """
    평면 열린 영역 X ⊂ R² 추상 기본 클래스

    - signed_distance_many: 내부 양수, 외부 음수인 부호 거리
    - 모든 연산은 순수 함수이며 생성 후 불변입니다.
    """

    kind: str = ""
    convex: bool = False

    def __init__(self, params: Optional[dict] = None):
        """
        Args:
            params: 영역 파라미터 (JSON 명세의 params)
        """
        self._params = dict(params or {})
        self._validate()

    def _validate(self):
        """파라미터 검증 (하위 클래스에서 재정의)"""

    @abstractmethod
    def signed_distance_many(self, pts: np.ndarray) -> np.ndarray:
        """
        부호 거리 계산

        Args:
            pts: (n, 2) 좌표 배열

        Returns:
            (n,) 배열 - 내부 점은 경계까지 거리, 외부 점은 음의 거리
        """

    @property
    def params(self) -> dict:
        return dict(self._params)

    def bounding_box(self) -> Optional[Box]:
        """유계 영역의 외접 사각형 (비유계면 None)"""
        return None

    def working_box(self, default_radius: float) -> Box:
        """
        계산 작업 영역

        비유계 영역은 outer_radius(또는 기본 작업 반경) 정사각형으로 제한합니다.
        """
        box = self.bounding_box()
        if box is not None:
            return box
        r = float(self._params.get("outer_radius", default_radius))
        return Box(-r, -r, r, r)

    # ========== 점 연산 ==========

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        return self.signed_distance_many(np.asarray(pts, dtype=float).reshape(-1, 2)) > 0.0

    def contains(self, p: Point2) -> bool:
        """p가 열린 영역 X에 속하는지 여부 (경계점은 제외)"""
        return bool(self.contains_many(p.as_array()[None, :])[0])

    def boundary_distance(self, p: Point2) -> float:
        """
        경계 거리 δ_X(p)

        Args:
            p: 내부 점

        Returns:
            양의 실수

        Raises:
            PointOutsideDomain: p가 영역 밖이거나 경계 위
        """
        d = float(self.signed_distance_many(p.as_array()[None, :])[0])
        if not d > 0.0:
            raise PointOutsideDomain(p, self.kind)
        return d

    def j_distance(self, p: Point2, q: Point2) -> float:
        """
        고전적 하한 j_X(p, q) = log(1 + |p - q| / min(δ(p), δ(q)))

        |log(δ(p)/δ(q))| 이상이며 준쌍곡 거리 이하입니다.
        """
        dp = self.boundary_distance(p)
        dq = self.boundary_distance(q)
        return math.log1p(p.distance(q) / min(dp, dq))

    # ========== 선분 연산 ==========

    def segment_in_domain(self, p: Point2, q: Point2) -> bool:
        """
        닫힌 선분 [p, q]가 X 안에 있는지 여부

        볼록 영역은 정확 판정, 그 외는 피치 min(δ(p), δ(q))/4 표본과
        1-립시츠 성질로 판정합니다.

        Raises:
            PointOutsideDomain: 끝점이 영역 밖
        """
        for point in (p, q):
            if not self.contains(point):
                raise PointOutsideDomain(point, self.kind)
        ok = self.segments_in_domain(p.as_array()[None, :], q.as_array()[None, :])
        return bool(ok[0])

    def segments_in_domain(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """
        여러 선분 [a_i, b_i]의 영역 포함 여부 (벡터화)

        끝점이 영역 밖인 선분은 False입니다.

        Args:
            a: (n, 2) 시작점
            b: (n, 2) 끝점

        Returns:
            (n,) bool 배열
        """
        a = np.asarray(a, dtype=float).reshape(-1, 2)
        b = np.asarray(b, dtype=float).reshape(-1, 2)
        da = self.signed_distance_many(a)
        db = self.signed_distance_many(b)
        ends_ok = (da > 0.0) & (db > 0.0)
        if self.convex:
            return ends_ok

        result = np.zeros(len(a), dtype=bool)
        lengths = np.linalg.norm(b - a, axis=1)
        # 선분 길이가 한 끝점의 경계 거리보다 짧으면 그 점 중심 원판 안에 있음
        inside_ball = ends_ok & (lengths < np.maximum(da, db))
        result[inside_ball] = True

        pending = np.flatnonzero(ends_ok & ~inside_ball)
        if pending.size == 0:
            return result

        pitch = np.minimum(da[pending], db[pending]) / 4.0
        counts = np.ceil(lengths[pending] / pitch).astype(int) + 1
        small = counts <= _MAX_SEGMENT_SAMPLES
        idx_small = pending[small]
        if idx_small.size:
            c = counts[small]
            seg = np.repeat(np.arange(idx_small.size), c)
            offsets = np.concatenate(([0], np.cumsum(c)[:-1]))
            k = np.arange(c.sum()) - np.repeat(offsets, c)
            s = k / np.repeat(c - 1, c)
            pts = a[idx_small][seg] + s[:, None] * (b[idx_small][seg] - a[idx_small][seg])
            sdf = self.signed_distance_many(pts)
            # 표본 간격 이하 피치에서 sdf > 피치/2 이면 구간 전체가 원판들로 덮임
            spacing = np.repeat(lengths[idx_small] / (c - 1), c)
            min_ratio = np.full(idx_small.size, np.inf)
            np.minimum.at(min_ratio, seg, sdf - spacing / 2.0)
            min_sdf = np.full(idx_small.size, np.inf)
            np.minimum.at(min_sdf, seg, sdf)
            certified = min_ratio > 0.0
            result[idx_small[certified]] = True
            undecided = idx_small[~certified & (min_sdf > 0.0)]
        else:
            undecided = np.array([], dtype=int)

        undecided = np.concatenate((undecided, pending[~small]))
        for i in undecided:
            result[i] = self._trace_segment(a[i], b[i])
        return result

    def _trace_segment(self, a: np.ndarray, b: np.ndarray) -> bool:
        """구 추적: 내부 점의 경계 거리만큼 전진하며 선분 포함 여부 판정"""
        length = float(np.linalg.norm(b - a))
        direction = (b - a) / length
        scale = 1.0 + float(np.abs(a).max() + np.abs(b).max())
        t = 0.0
        for _ in range(10_000_000):
            d = float(self.signed_distance_many((a + t * direction)[None, :])[0])
            if d <= _TRACE_FLOOR * scale:
                return False
            t += d
            if t >= length:
                return True
        logger.warning("선분 추적 단계 상한 도달 - 영역 밖으로 간주합니다.")
        return False

    # ========== 직렬화 ==========

    def to_spec(self) -> dict:
        """JSON 영역 명세"""
        return {"kind": self.kind, "params": self.params}

    def _key(self) -> str:
        return json.dumps(self.to_spec(), sort_keys=True)

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, BaseDomain) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params})"


class HalfPlane(BaseDomain):
    """상반평면 {y > 0}"""

    kind = "half_plane"
    convex = True

    def signed_distance_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return pts[:, 1].copy()


class PuncturedPlane(BaseDomain):
    """구멍 뚫린 평면 R² \\ {0}"""

    kind = "punctured_plane"

    def _validate(self):
        r = self._params.get("outer_radius")
        if r is not None and not float(r) > 0:
            raise InvalidDomainSpec("outer_radius는 양수여야 합니다.")

    def signed_distance_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return np.hypot(pts[:, 0], pts[:, 1])


class UnitDisk(BaseDomain):
    """단위 원판 {|p| < 1}"""

    kind = "unit_disk"
    convex = True

    def signed_distance_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return 1.0 - np.hypot(pts[:, 0], pts[:, 1])

    def bounding_box(self) -> Optional[Box]:
        return Box(-1.0, -1.0, 1.0, 1.0)


class Annulus(BaseDomain):
    """원환 {r_in < |p| < r_out}"""

    kind = "annulus"

    def _validate(self):
        try:
            self.r_in = float(self._params["r_in"])
            self.r_out = float(self._params["r_out"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidDomainSpec("annulus에는 r_in, r_out이 필요합니다.") from e
        if not (0.0 <= self.r_in < self.r_out):
            raise InvalidDomainSpec(f"0 <= r_in < r_out 이어야 합니다: {self.r_in}, {self.r_out}")

    def signed_distance_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        r = np.hypot(pts[:, 0], pts[:, 1])
        return np.minimum(r - self.r_in, self.r_out - r)

    def bounding_box(self) -> Optional[Box]:
        return Box(-self.r_out, -self.r_out, self.r_out, self.r_out)


class AxisRect(BaseDomain):
    """열린 직사각형 (x0, x1) x (y0, y1)"""

    kind = "axis_rect"
    convex = True

    def _validate(self):
        try:
            self.box = Box(*(float(self._params[k]) for k in ("x0", "y0", "x1", "y1")))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidDomainSpec("axis_rect에는 x0 < x1, y0 < y1 이 필요합니다.") from e

    def signed_distance_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        b = self.box
        center = np.array([(b.x0 + b.x1) / 2.0, (b.y0 + b.y1) / 2.0])
        half = np.array([b.width / 2.0, b.height / 2.0])
        q = np.abs(pts - center) - half
        outside = np.hypot(np.maximum(q[:, 0], 0.0), np.maximum(q[:, 1], 0.0))
        inside = np.minimum(np.maximum(q[:, 0], q[:, 1]), 0.0)
        return -(outside + inside)

    def bounding_box(self) -> Optional[Box]:
        return self.box


class PolygonComplement(BaseDomain):
    """단순 다각형 P의 여집합 R² \\ P (P는 닫힌 집합)"""

    kind = "polygon_complement"

    _CHUNK = 4096

    def _validate(self):
        try:
            verts = np.asarray(self._params["vertices"], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidDomainSpec("polygon_complement에는 vertices 목록이 필요합니다.") from e
        if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
            raise InvalidDomainSpec("다각형 꼭짓점은 3개 이상의 [x, y] 쌍이어야 합니다.")
        area = 0.5 * np.sum(verts[:, 0] * np.roll(verts[:, 1], -1) - np.roll(verts[:, 0], -1) * verts[:, 1])
        if abs(area) <= 1e-15:
            raise InvalidDomainSpec("다각형 넓이가 0입니다.")
        self._params["vertices"] = verts.tolist()
        self.vertices = verts
        self._a = verts
        self._b = np.roll(verts, -1, axis=0)

    def _edge_distance(self, pts: np.ndarray) -> np.ndarray:
        d = self._b - self._a
        dd = np.einsum("ij,ij->i", d, d)
        ap = pts[:, None, :] - self._a[None, :, :]
        t = np.clip(np.einsum("nmj,mj->nm", ap, d) / dd, 0.0, 1.0)
        proj = self._a[None, :, :] + t[:, :, None] * d[None, :, :]
        return np.linalg.norm(pts[:, None, :] - proj, axis=2).min(axis=1)

    def _inside_polygon(self, pts: np.ndarray) -> np.ndarray:
        x = pts[:, 0][:, None]
        y = pts[:, 1][:, None]
        xi, yi = self._a[:, 0][None, :], self._a[:, 1][None, :]
        xj, yj = self._b[:, 0][None, :], self._b[:, 1][None, :]
        crosses = (yi > y) != (yj > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
        hits = crosses & (x < x_cross)
        return (np.count_nonzero(hits, axis=1) % 2) == 1

    def signed_distance_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        out = np.empty(len(pts))
        for start in range(0, len(pts), self._CHUNK):
            chunk = pts[start:start + self._CHUNK]
            dist = self._edge_distance(chunk)
            sign = np.where(self._inside_polygon(chunk), -1.0, 1.0)
            out[start:start + self._CHUNK] = sign * dist
        return out


DOMAIN_KINDS: dict[str, type[BaseDomain]] = {
    cls.kind: cls
    for cls in (HalfPlane, PuncturedPlane, UnitDisk, Annulus, AxisRect, PolygonComplement)
}


def get_domain(spec: dict) -> BaseDomain:
    """
    JSON 영역 명세로 영역 생성

    Args:
        spec: {"kind": ..., "params": {...}}

    Returns:
        BaseDomain 하위 클래스 인스턴스
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidDomainSpec("영역 명세에는 kind가 필요합니다.")
    kind = spec["kind"]
    if kind not in DOMAIN_KINDS:
        raise InvalidDomainSpec(f"알 수 없는 영역 종류: {kind} (가능: {sorted(DOMAIN_KINDS)})")
    params = spec.get("params") or {}
    if not isinstance(params, dict):
        raise InvalidDomainSpec("params는 객체여야 합니다.")
    return DOMAIN_KINDS[kind](params)


def load_domain(ref: str | Path) -> BaseDomain:
    """
    영역 참조 로드

    Args:
        ref: JSON 파일 경로 또는 domains.yaml에 등록된 이름

    Returns:
        BaseDomain
    """
    from ..settings import load_named_domains

    named = load_named_domains()
    if isinstance(ref, str) and ref in named:
        return get_domain(named[ref])

    path = Path(ref)
    if not path.exists():
        raise InvalidDomainSpec(f"영역 파일이 없고 등록된 이름도 아닙니다: {ref} (이름: {sorted(named)})")
    try:
        with open(path, "r", encoding="utf-8") as f:
            spec = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidDomainSpec(f"영역 JSON 파싱 오류: {e}") from e
    return get_domain(spec)
