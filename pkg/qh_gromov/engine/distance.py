"""
준쌍곡 거리 엔진

해상도를 반씩 줄이며 그래프 최단 경로를 구하고 경로를 정밀화합니다.
연속 두 단계의 상한 변화가 tol 이하이면 수렴으로 봅니다.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from ..curve import Arc, fast_segment_qh_lengths, segment_qh_lengths
from ..domain import BaseDomain, Box, Point2
from ..errors import (
    DisconnectedGraph,
    GraphTooLarge,
    InvalidParameter,
    QhError,
    ShortnessNotCertified,
    ToleranceNotReached,
)
from ..settings import EngineSettings
from .graph import QhGraph, build_graph
from .refine import refine_xy


logger = logging.getLogger(__name__)

# 연결점 탐색 반경 (δ 배수, resolution 배수)
CONNECT_DELTA_RATIO = 0.95
CONNECT_RES_RATIO = 3.0
FALLBACK_NEIGHBORS = 8
# 가지치기로 끊긴 경우 상한 U와 관 폭을 두 배씩 늘리는 최대 횟수
MAX_PRUNE_RETRIES = 4
# 질의점에서 거리 r 인 곳은 δ >= min(resolution * cutoff_ratio, DEPTH_DIST_RATIO * r) 인 노드만 생성
DEPTH_DIST_RATIO = 0.25
# 두 번째 단계부터는 최선 경로 주변 관만 생성: 폭 min(TUBE_DELTA_RATIO * δ, TUBE_RES_RATIO * resolution)
TUBE_DELTA_RATIO = 1.0
TUBE_RES_RATIO = 8.0
MAX_TUBE_POINTS = 200_000
# 전체 격자가 상한을 넘을 때 첫 단계 해상도를 두 배로 늘리는 최대 횟수
MAX_COARSEN = 3
PAIRWISE_CHUNK = 2048
# 일괄 구적 상대 허용오차 (거리 허용오차보다 충분히 작음)
PAIRWISE_REL_TOL = 1e-6


class _PathTube:
    """경로 주변 관 (경로를 촘촘히 나눈 점들의 최근접 거리로 판정)"""

    def __init__(self, domain: BaseDomain, xy: np.ndarray, res: float):
        xy = np.asarray(xy, dtype=float)
        seg = np.diff(xy, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        ends = domain.signed_distance_many(xy)
        step = np.maximum(np.minimum(res / 2.0, np.minimum(ends[:-1], ends[1:]) / 8.0), 1e-12)
        counts = np.maximum(1, np.ceil(lengths / step)).astype(np.int64)
        if counts.sum() > MAX_TUBE_POINTS:
            counts = np.maximum(1, np.ceil(counts * (MAX_TUBE_POINTS / counts.sum()))).astype(np.int64)
        offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
        seg_idx = np.repeat(np.arange(len(seg)), counts)
        t = (np.arange(counts.sum()) - np.repeat(offsets, counts)) / counts[seg_idx]
        self.points = np.vstack((xy[seg_idx] + t[:, None] * seg[seg_idx], xy[-1:]))
        self.spacing = np.concatenate(((lengths / counts)[seg_idx], [0.0]))
        self.tree = cKDTree(self.points)
        self.res = res

    def contains(self, nodes: np.ndarray, reach: np.ndarray, slack: float, widen: float = 1.0) -> np.ndarray:
        gap, idx = self.tree.query(nodes)
        width = widen * np.minimum(TUBE_DELTA_RATIO * reach, TUBE_RES_RATIO * self.res)
        return gap - slack - self.spacing[idx] / 2.0 <= width


@dataclass(frozen=True, eq=False)
class DistanceEstimate:
    """
    준쌍곡 거리 추정

    - lower <= k_X(x, y) 근사 하한 (j 거리 및 수렴 근거)
    - upper = path의 준쌍곡 길이
    - path가 None이면 x == y
    """
    lower: float
    upper: float
    path: Optional[Arc]
    method: str = "graph"
    converged: bool = True
    resolutions: tuple = ()

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return (self.upper + self.lower) / 2.0

    def reversed(self) -> "DistanceEstimate":
        return DistanceEstimate(
            lower=self.lower,
            upper=self.upper,
            path=None if self.path is None else self.path.reversed(),
            method=self.method,
            converged=self.converged,
            resolutions=self.resolutions,
        )

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "width": self.width,
            "method": self.method,
            "converged": self.converged,
            "resolutions": list(self.resolutions),
            "path_vertices": 0 if self.path is None else len(self.path),
        }


@dataclass(frozen=True, eq=False)
class ShortArcCert:
    """
    h-short 호 인증서

    qh_length(arc) = k_lower + h_achieved, k_lower <= k_upper <= qh_length(arc)
    """
    arc: Arc
    h_achieved: float
    k_lower: float
    k_upper: float
    h_requested: Optional[float] = None

    @property
    def start(self) -> Point2:
        return self.arc.start

    @property
    def end(self) -> Point2:
        return self.arc.end

    @property
    def length(self) -> float:
        return self.arc.qh_length()

    @property
    def width(self) -> float:
        """거리 추정 폭 k_upper - k_lower"""
        return self.k_upper - self.k_lower

    @property
    def k_mid(self) -> float:
        return (self.k_upper + self.k_lower) / 2.0

    def reversed(self) -> "ShortArcCert":
        return ShortArcCert(
            arc=self.arc.reversed(),
            h_achieved=self.h_achieved,
            k_lower=self.k_lower,
            k_upper=self.k_upper,
            h_requested=self.h_requested,
        )

    def to_dict(self) -> dict:
        return {
            "start": self.start.to_list(),
            "end": self.end.to_list(),
            "length": self.length,
            "h_achieved": self.h_achieved,
            "h_requested": self.h_requested,
            "lower": self.k_lower,
            "upper": self.k_upper,
            "vertices": len(self.arc),
        }

    @classmethod
    def from_estimate(cls, estimate: DistanceEstimate, h_requested: Optional[float] = None) -> "ShortArcCert":
        arc = estimate.path
        length = arc.qh_length()
        upper = min(estimate.upper, length)
        return cls(
            arc=arc,
            h_achieved=max(0.0, length - estimate.lower),
            k_lower=estimate.lower,
            k_upper=upper,
            h_requested=h_requested,
        )


@dataclass
class EngineStats:
    """엔진 사용 통계 (보고서용)"""
    queries: int = 0
    cache_hits: int = 0
    segment_hits: int = 0
    graph_builds: int = 0
    max_nodes_seen: int = 0
    resolutions_used: set = field(default_factory=set)

    def to_dict(self) -> dict:
        return {
            "queries": self.queries,
            "cache_hits": self.cache_hits,
            "segment_hits": self.segment_hits,
            "graph_builds": self.graph_builds,
            "max_nodes_seen": self.max_nodes_seen,
            "resolutions_used": sorted(self.resolutions_used),
        }


class QhEngine:
    """
    준쌍곡 거리 엔진

    영역 하나에 대해 거리 질의를 처리하고 결과를 대칭으로 캐시합니다.
    """

    def __init__(
        self,
        domain: BaseDomain,
        settings: Optional[EngineSettings] = None,
        region: Optional[Box] = None,
    ):
        """
        Args:
            domain: 영역
            settings: 엔진 설정 (기본: defaults.yaml + 환경 변수)
            region: 고정 작업 영역 (None이면 질의마다 자동 결정)
        """
        self.domain = domain
        self.settings = settings or EngineSettings()
        self.region = region
        self.stats = EngineStats()
        self._cache: dict[tuple, DistanceEstimate] = {}

    # ========== 공용 연산 ==========

    def distance(self, x: Point2, y: Point2, tol: Optional[float] = None) -> DistanceEstimate:
        """
        준쌍곡 거리 추정 k_X(x, y)

        Args:
            x, y: 내부 점
            tol: 허용오차 (기본 settings.tol)

        Returns:
            DistanceEstimate

        Raises:
            PointOutsideDomain: 점이 영역 밖
            ToleranceNotReached: 반감 상한 안에서 수렴 실패 (best에 최선 추정)
        """
        tol = self.settings.tol if tol is None else tol
        if not (math.isfinite(tol) and tol > 0):
            raise InvalidParameter(f"tol은 양수여야 합니다: {tol}")
        self.stats.queries += 1

        key = (x.x, x.y, y.x, y.y, tol)
        if key in self._cache:
            self.stats.cache_hits += 1
            return self._cache[key]
        rkey = (y.x, y.y, x.x, x.y, tol)
        if rkey in self._cache:
            self.stats.cache_hits += 1
            return self._cache[rkey].reversed()

        estimate = self._compute(x, y, tol)
        self._cache[key] = estimate
        return estimate

    def short_arc(self, x: Point2, y: Point2, h: float) -> ShortArcCert:
        """
        h-short 호 인증

        tol = h/4로 거리를 구하고 h_achieved = qh_length - k_lower 를 확인합니다.

        Raises:
            InvalidParameter: h <= 0 또는 x == y
            ShortnessNotCertified: h_achieved > h (certificate에 최선 인증서)
        """
        if not (math.isfinite(h) and h > 0):
            raise InvalidParameter(f"h는 양수여야 합니다: {h}")
        if x == y:
            raise InvalidParameter(f"같은 두 점 사이에는 호가 없습니다: {x}")

        try:
            estimate = self.distance(x, y, h / 4.0)
        except ToleranceNotReached as e:
            if e.best is None or e.best.path is None:
                raise ShortnessNotCertified(f"h-short 호를 찾지 못했습니다: {x} -> {y}") from e
            estimate = e.best

        cert = ShortArcCert.from_estimate(estimate, h_requested=h)
        if cert.h_achieved > h:
            raise ShortnessNotCertified(
                f"h_achieved {cert.h_achieved:.6g} > h {h:.6g}: {x} -> {y}", certificate=cert
            )
        return cert

    def pairwise(self, points: Sequence[Point2], tol: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
        """
        점 집합의 모든 쌍 거리

        직선 경로로 인증되는 쌍(선분 길이 - j <= tol)은 한 번에 구적하고,
        나머지 쌍만 distance()로 질의합니다.

        Returns:
            (상한 행렬, 폭 행렬) - 대칭, 대각 0
        """
        tol = self.settings.tol if tol is None else tol
        if not (math.isfinite(tol) and tol > 0):
            raise InvalidParameter(f"tol은 양수여야 합니다: {tol}")
        n = len(points)
        values = np.zeros((n, n))
        widths = np.zeros((n, n))
        if n < 2:
            return values, widths

        delta = np.array([self.domain.boundary_distance(p) for p in points])
        xy = np.array([p.to_list() for p in points])
        ii, jj = np.triu_indices(n, k=1)
        a, b = xy[ii], xy[jj]
        same = np.all(a == b, axis=1)
        j = np.log1p(np.hypot(*(b - a).T) / np.minimum(delta[ii], delta[jj]))

        seg = np.full(len(ii), np.inf)
        candidates = np.flatnonzero(~same & self.domain.segments_in_domain(a, b))
        for start in range(0, candidates.size, PAIRWISE_CHUNK):
            part = candidates[start:start + PAIRWISE_CHUNK]
            try:
                seg[part] = segment_qh_lengths(
                    self.domain, a[part], b[part],
                    rel_tol=max(self.settings.quad_rel_tol, PAIRWISE_REL_TOL),
                    max_intervals=self.settings.quad_max_intervals,
                )
            except QhError as e:
                logger.warning(f"일괄 선분 구적 실패 - 해당 쌍은 개별 질의합니다: {e}")

        hit = seg - j <= tol
        upper = np.where(same, 0.0, seg)
        width = np.where(same, 0.0, np.maximum(seg - j, 0.0))
        self.stats.queries += int(hit.sum())
        self.stats.segment_hits += int(hit.sum())

        rest = np.flatnonzero(~hit & ~same)
        for t in rest:
            est = self.distance(points[ii[t]], points[jj[t]], tol)
            upper[t] = est.upper
            width[t] = est.width
        logger.debug(f"거리 쌍 {len(ii)}개: 직선 인증 {int(hit.sum())}, 개별 질의 {rest.size}")

        values[ii, jj] = values[jj, ii] = upper
        widths[ii, jj] = widths[jj, ii] = width
        return values, widths

    def boundary_distance(self, p: Point2) -> float:
        return self.domain.boundary_distance(p)

    # ========== 내부 ==========

    def _query_region(self, x: Point2, y: Point2) -> Box:
        if self.region is not None:
            return self.region
        gap = x.distance(y)
        auto = Box.around([x, y], self.settings.region_margin * gap)
        work = self.domain.working_box(self.settings.working_radius)
        region = auto.intersect(work)
        ends = np.array([x.to_list(), y.to_list()])
        if region is None or not region.contains_many(ends).all():
            logger.warning(f"질의점이 작업 영역 {work.to_list()} 밖에 있어 자동 영역을 그대로 사용합니다.")
            return auto
        return region

    def _segment_arc(self, x: Point2, y: Point2) -> Optional[Arc]:
        if not self.domain.segment_in_domain(x, y):
            return None
        return self._arc(np.array([x.to_list(), y.to_list()]))

    def _arc(self, xy: np.ndarray) -> Arc:
        return Arc(
            xy,
            self.domain,
            rel_tol=self.settings.quad_rel_tol,
            max_intervals=self.settings.quad_max_intervals,
        )

    def _compute(self, x: Point2, y: Point2, tol: float) -> DistanceEstimate:
        s = self.settings
        dx = self.domain.boundary_distance(x)
        dy = self.domain.boundary_distance(y)
        if x == y:
            return DistanceEstimate(lower=0.0, upper=0.0, path=None, method="identical")

        j = self.domain.j_distance(x, y)
        best = self._segment_arc(x, y)
        if best is not None and best.qh_length() - j <= tol:
            self.stats.segment_hits += 1
            logger.debug(f"직선 경로 인증: {x} -> {y}, j={j:.12g}, 길이={best.qh_length():.12g}")
            return DistanceEstimate(
                lower=j, upper=best.qh_length(), path=best, method="segment"
            )

        res = x.distance(y) / s.resolution_divisor
        region = self._query_region(x, y)
        bound = best.qh_length() if best is not None else 3.0 * j + math.pi
        prev: Optional[float] = None
        used: list[float] = []
        tube: Optional[_PathTube] = None
        coarsened = 0

        level = 0
        while level <= s.max_halvings:
            try:
                raw = self._graph_path(x, y, dx, dy, region, res, bound, tube)
            except GraphTooLarge as e:
                if tube is not None or coarsened >= MAX_COARSEN:
                    logger.warning(f"그래프 상한 도달 (레벨 {level}, resolution={res:.6g}): {e}")
                    break
                coarsened += 1
                res *= 2.0
                logger.warning(f"그래프 상한 도달 - 첫 단계 해상도를 {res:.6g}로 늘립니다: {e}")
                continue
            except DisconnectedGraph as e:
                if tube is None:
                    raise
                logger.warning(f"경로 주변 그래프가 끊겨 반감을 멈춥니다 (레벨 {level}): {e}")
                break
            used.append(res)
            self.stats.resolutions_used.add(float(f"{res:.12g}"))

            try:
                refined = self._arc(refine_xy(self.domain, raw, s))
            except QhError as e:
                logger.warning(f"정밀화 경로가 유효하지 않아 원 경로를 사용합니다: {e}")
                refined = self._arc(raw)
            if best is None or refined.qh_length() < best.qh_length():
                best = refined
            upper = best.qh_length()
            bound = upper
            logger.debug(f"레벨 {level}: resolution={res:.6g}, 상한={upper:.12g}")

            if upper - j <= tol:
                return DistanceEstimate(
                    lower=j, upper=upper, path=best, resolutions=tuple(used)
                )
            if prev is not None and prev - upper <= tol:
                lower = min(max(j, prev - tol), upper)
                return DistanceEstimate(
                    lower=lower, upper=upper, path=best, resolutions=tuple(used)
                )
            prev = upper
            level += 1
            res /= 2.0
            tube = _PathTube(self.domain, best.xy, res)

        fallback = None
        if best is not None:
            fallback = DistanceEstimate(
                lower=min(j, best.qh_length()),
                upper=best.qh_length(),
                path=best,
                converged=False,
                resolutions=tuple(used),
            )
        raise ToleranceNotReached(
            f"반감 {s.max_halvings}회 안에 허용오차 {tol:.3g}에 도달하지 못했습니다: {x} -> {y}",
            best=fallback,
        )

    def _graph_path(
        self,
        x: Point2,
        y: Point2,
        dx: float,
        dy: float,
        region: Box,
        res: float,
        bound: float,
        tube: Optional[_PathTube] = None,
    ) -> np.ndarray:
        """
        그래프 최단 경로 좌표 (x, 노드들..., y)

        노드 조건 (여유 slack 안의 점에 대한 보수적 판정):
        - j(x, p) + j(p, y) <= prune_factor * bound + prune_offset
        - 질의점에서 먼 곳은 δ >= min(resolution * cutoff_ratio, DEPTH_DIST_RATIO * 거리)
        - tube가 있으면 그 관 안
        """
        s = self.settings
        cutoff = min(res * s.boundary_cutoff_ratio, min(dx, dy) / 2.0)
        depth_cap = res * s.boundary_cutoff_ratio
        xa, ya = x.as_array(), y.as_array()

        for attempt in range(MAX_PRUNE_RETRIES + 1):
            limit = s.prune_factor * bound + s.prune_offset
            widen = 2.0 ** attempt

            def keep(nodes: np.ndarray, delta: np.ndarray, slack: float = 0.0) -> np.ndarray:
                rx = np.maximum(np.hypot(*(nodes - xa).T) - slack, 0.0)
                ry = np.maximum(np.hypot(*(nodes - ya).T) - slack, 0.0)
                reach = delta + slack
                jx = np.log1p(rx / np.minimum(reach, dx))
                jy = np.log1p(ry / np.minimum(reach, dy))
                mask = (jx + jy <= limit) & (reach >= np.minimum(depth_cap / widen, DEPTH_DIST_RATIO * np.minimum(rx, ry)))
                if tube is not None:
                    mask &= tube.contains(nodes, reach, slack, widen)
                return mask

            graph = build_graph(
                self.domain,
                region,
                res,
                cutoff=cutoff,
                node_filter=keep,
                max_nodes=s.max_nodes,
                require_connected=False,
            )
            self.stats.graph_builds += 1
            self.stats.max_nodes_seen = max(self.stats.max_nodes_seen, graph.node_count)
            try:
                return _shortest_path(graph, x, y, dx, dy, res)
            except DisconnectedGraph:
                if graph.pruned == 0 or attempt == MAX_PRUNE_RETRIES:
                    raise
                bound *= 2.0
                logger.debug(f"가지치기로 끊김 - 상한을 {bound:.6g}로 늘려 재시도")
        raise DisconnectedGraph("질의점이 연결되지 않았습니다.")


def _connectors(graph: QhGraph, tree: cKDTree, p: Point2, dp: float, res: float) -> tuple[np.ndarray, np.ndarray]:
    """질의점 p에서 노드로 가는 연결 간선 (노드 번호, 가중치)"""
    radius = min(CONNECT_DELTA_RATIO * dp, CONNECT_RES_RATIO * res)
    idx = np.array(sorted(tree.query_ball_point(p.to_list(), radius)), dtype=np.int64)
    if idx.size == 0:
        k = min(FALLBACK_NEIGHBORS, graph.node_count)
        _, near = tree.query(p.to_list(), k=k)
        near = np.atleast_1d(near)
        a = np.repeat(p.as_array()[None, :], len(near), axis=0)
        ok = graph.domain.segments_in_domain(a, graph.nodes[near])
        idx = np.sort(near[ok]).astype(np.int64)
    if idx.size == 0:
        return idx, np.zeros(0)
    a = np.repeat(p.as_array()[None, :], len(idx), axis=0)
    w = fast_segment_qh_lengths(graph.domain, a, graph.nodes[idx])
    good = np.isfinite(w) & (w > 0)
    return idx[good], w[good]


def _shortest_path(graph: QhGraph, x: Point2, y: Point2, dx: float, dy: float, res: float) -> np.ndarray:
    """연결 간선을 붙인 그래프에서 다익스트라 (x = n, y = n + 1)"""
    n = graph.node_count
    tree = cKDTree(graph.nodes)
    xi, xw = _connectors(graph, tree, x, dx, res)
    yi, yw = _connectors(graph, tree, y, dy, res)

    rows = [graph.edges[:, 0], np.full(len(xi), n), np.full(len(yi), n + 1)]
    cols = [graph.edges[:, 1], xi, yi]
    vals = [graph.weights, xw, yw]
    if x.distance(y) < max(dx, dy):
        direct = fast_segment_qh_lengths(graph.domain, x.as_array()[None, :], y.as_array()[None, :])
        rows.append(np.array([n]))
        cols.append(np.array([n + 1]))
        vals.append(direct)

    matrix = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n + 2, n + 2)
    )
    dist, pred = csgraph.dijkstra(matrix, directed=False, indices=n, return_predecessors=True)
    if not np.isfinite(dist[n + 1]):
        count, labels = csgraph.connected_components(matrix, directed=False)
        sizes = np.bincount(labels)
        raise DisconnectedGraph(
            f"질의점 {x}, {y}가 서로 다른 성분에 있습니다.",
            components=(int(sizes[labels[n]]), int(sizes[labels[n + 1]])),
        )

    order = [n + 1]
    while order[-1] != n:
        order.append(int(pred[order[-1]]))
    order.reverse()
    coords = [x.as_array()] + [graph.nodes[i] for i in order[1:-1]] + [y.as_array()]
    return np.array(coords)


# ========== 모듈 수준 연산 ==========

def qh_distance(
    domain: BaseDomain,
    x: Point2,
    y: Point2,
    tol: float,
    settings: Optional[EngineSettings] = None,
) -> DistanceEstimate:
    """준쌍곡 거리 추정 (일회용 엔진)"""
    return QhEngine(domain, settings).distance(x, y, tol)


def short_arc(
    domain: BaseDomain,
    x: Point2,
    y: Point2,
    h: float,
    settings: Optional[EngineSettings] = None,
) -> ShortArcCert:
    """h-short 호 인증 (일회용 엔진)"""
    return QhEngine(domain, settings).short_arc(x, y, h)
