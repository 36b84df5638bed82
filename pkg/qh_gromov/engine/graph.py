"""
준쌍곡 거리 근사용 적응 격자 그래프

레벨 k 격자 간격은 s_k = resolution / 2^k 입니다.
- 레벨 0: 작업 영역 전체 격자
- 레벨 k >= 1: 경계 근처 띠 (δ < 8 s_k) 만 생성
- 간선: 같은 레벨 16-이웃, 양 끝점 δ >= 2.5 s_k
  (간선 길이 <= √5 s_k < δ 이므로 선분 전체가 끝점 중심 원판 안에 있음)

노드는 최세밀 격자 정수 좌표 (I, J)의 키 I*M + J 로 정렬되어
(x, y) 사전식 순서를 따릅니다.

node_filter는 레벨마다 생성 직후 적용됩니다. 덮개점에는 자손까지의
거리 여유(slack)를 넘겨, 여유 안의 어떤 점도 통과할 수 없을 때만 버리게 합니다.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from ..curve import fast_segment_qh_lengths
from ..domain import BaseDomain, Box
from ..errors import DisconnectedGraph, EmptyRegion, GraphTooLarge, InvalidParameter


logger = logging.getLogger(__name__)

# 16-이웃 스텐실의 절반 (나머지는 부호 반대)
STENCIL_HALF = np.array(
    [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)],
    dtype=np.int64,
)
EDGE_DELTA_RATIO = 2.5
BAND_RATIO = 8.0
# 덮개점 판정 여유 (자손까지의 거리 상한 1.46 s_k 보다 큼)
COVER_MARGIN = 1.5
_CHILD_OFFSETS = np.array([(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)], dtype=np.int64)
_MAX_KEY = 2 ** 62

# (좌표, δ, 여유) -> 유지 마스크
NodeFilter = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True, eq=False)
class QhGraph:
    """적응 격자 그래프 (생성 후 불변)"""
    domain: BaseDomain
    region: Box
    resolution: float
    cutoff: float
    levels: int
    nodes: np.ndarray       # (n, 2) 좌표
    keys: np.ndarray        # (n,) 정렬된 격자 키
    delta: np.ndarray       # (n,) 경계 거리
    edges: np.ndarray       # (m, 2) 노드 번호 (i < j 아님, 중복 없음)
    weights: np.ndarray     # (m,) 준쌍곡 간선 길이
    pruned: int = 0
    _components: list = field(default_factory=list, repr=False)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self, extra: int = 0) -> sparse.csr_matrix:
        """
        대칭 가중치 인접 행렬

        Args:
            extra: 뒤에 덧붙일 빈 행/열 수 (질의점 연결용)
        """
        n = self.node_count + extra
        return sparse.csr_matrix(
            (self.weights, (self.edges[:, 0], self.edges[:, 1])), shape=(n, n)
        )

    def components(self) -> tuple[int, np.ndarray]:
        """연결 성분 (개수, 노드별 라벨)"""
        if not self._components:
            self._components.append(
                csgraph.connected_components(self.adjacency(), directed=False)
            )
        return self._components[0]

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        """노드 i의 (이웃 번호, 간선 가중치) 목록"""
        a = self.edges[:, 0] == i
        b = self.edges[:, 1] == i
        out = list(zip(self.edges[a, 1].tolist(), self.weights[a].tolist()))
        out += list(zip(self.edges[b, 0].tolist(), self.weights[b].tolist()))
        return sorted(out)

    def summary(self) -> dict:
        return {
            "nodes": self.node_count,
            "edges": self.edge_count,
            "resolution": self.resolution,
            "cutoff": self.cutoff,
            "levels": self.levels,
            "region": self.region.to_list(),
            "pruned": self.pruned,
        }


def _grid_points(origin: np.ndarray, i: np.ndarray, j: np.ndarray, pitch: float) -> np.ndarray:
    return origin + np.stack((i, j), axis=1) * pitch


def _apply_filter(
    node_filter: Optional[NodeFilter],
    pts: np.ndarray,
    sdf: np.ndarray,
    mask: np.ndarray,
    slack: float,
) -> np.ndarray:
    if node_filter is None:
        return mask
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return mask
    keep = np.asarray(node_filter(pts[idx], sdf[idx], slack), dtype=bool)
    out = mask.copy()
    out[idx[~keep]] = False
    return out


def build_graph(
    domain: BaseDomain,
    region: Box,
    resolution: float,
    *,
    cutoff: Optional[float] = None,
    cutoff_ratio: float = 0.125,
    node_filter: Optional[NodeFilter] = None,
    max_nodes: int = 400_000,
    require_connected: bool = True,
) -> QhGraph:
    """
    적응 격자 그래프 생성

    Args:
        domain: 영역
        region: 작업 영역 사각형
        resolution: 기본 격자 간격 (레벨 0)
        cutoff: 이 값보다 δ가 작은 노드 제외 (기본 resolution * cutoff_ratio)
        node_filter: (좌표, δ, 여유) -> 유지 마스크 (j-거리 가지치기 등).
            여유 반경 안의 점 중 하나라도 유지될 수 있으면 True를 돌려야 합니다.
        max_nodes: 노드 수 상한
        require_connected: 연결성 검증 여부

    Returns:
        QhGraph

    Raises:
        InvalidParameter: resolution <= 0
        EmptyRegion: 작업 영역과 영역의 교집합이 비어 있음
        GraphTooLarge: 노드 수 상한 초과
        DisconnectedGraph: require_connected 이고 연결 성분이 둘 이상
    """
    if not (math.isfinite(resolution) and resolution > 0):
        raise InvalidParameter(f"resolution은 양수여야 합니다: {resolution}")
    if cutoff is None:
        cutoff = resolution * cutoff_ratio
    if not (math.isfinite(cutoff) and cutoff > 0):
        raise InvalidParameter(f"cutoff는 양수여야 합니다: {cutoff}")

    box = region.intersect(domain.bounding_box())
    if box is None:
        raise EmptyRegion(f"작업 영역 {region.to_list()}이 영역과 겹치지 않습니다.")

    levels = max(0, math.ceil(math.log2(EDGE_DELTA_RATIO * resolution / cutoff)))
    scale = 2 ** levels
    nx0 = max(1, math.ceil(box.width / resolution))
    ny0 = max(1, math.ceil(box.height / resolution))
    if (nx0 + 1) * (ny0 + 1) > 4 * max_nodes:
        raise GraphTooLarge(f"레벨 0 격자 {(nx0 + 1) * (ny0 + 1)}점이 상한 {4 * max_nodes}을 넘습니다.")
    M = ny0 * scale + 1
    if (nx0 * scale + 1) * M >= _MAX_KEY:
        raise GraphTooLarge(f"격자 레벨 {levels}이 너무 깊습니다 (resolution/cutoff = {resolution / cutoff:.3g}).")

    origin = np.array([box.x0, box.y0])
    fine = resolution / scale

    # 레벨 0
    ii, jj = np.meshgrid(np.arange(nx0 + 1, dtype=np.int64), np.arange(ny0 + 1, dtype=np.int64), indexing="ij")
    ci, cj = ii.ravel(), jj.ravel()
    pts = _grid_points(origin, ci, cj, resolution)
    sdf = domain.signed_distance_many(pts)
    base = sdf >= cutoff
    take = _apply_filter(node_filter, pts, sdf, base, 0.0)
    pruned = int(base.sum() - take.sum())
    node_keys = [ci[take] * scale * M + cj[take] * scale]
    total = int(take.sum())
    cover = (sdf > cutoff - COVER_MARGIN * resolution) & (sdf < (BAND_RATIO + COVER_MARGIN) * resolution)
    cover = _apply_filter(node_filter, pts, sdf, cover, COVER_MARGIN * resolution)
    ci, cj = ci[cover], cj[cover]

    for k in range(1, levels + 1):
        if ci.size == 0:
            break
        pitch = resolution / 2 ** k
        step = 2 ** (levels - k)
        ki = (2 * ci[:, None] + _CHILD_OFFSETS[None, :, 0]).ravel()
        kj = (2 * cj[:, None] + _CHILD_OFFSETS[None, :, 1]).ravel()
        inside = (ki >= 0) & (kj >= 0) & (ki <= nx0 * 2 ** k) & (kj <= ny0 * 2 ** k)
        local = np.unique(ki[inside] * (ny0 * 2 ** k + 1) + kj[inside])
        if len(local) > 8 * max_nodes:
            raise GraphTooLarge(f"레벨 {k} 후보점 {len(local)}개가 상한을 넘습니다.")
        ci, cj = np.divmod(local, ny0 * 2 ** k + 1)
        pts = _grid_points(origin, ci, cj, pitch)
        sdf = domain.signed_distance_many(pts)
        base = (sdf >= cutoff) & (sdf < BAND_RATIO * pitch)
        band = _apply_filter(node_filter, pts, sdf, base, 0.0)
        pruned += int(base.sum() - band.sum())
        node_keys.append(ci[band] * step * M + cj[band] * step)
        total += int(band.sum())
        if total > 2 * max_nodes:
            raise GraphTooLarge(f"노드 수가 상한 {max_nodes}을 넘습니다 (레벨 {k}).")
        cover = (sdf > cutoff - COVER_MARGIN * pitch) & (sdf < (BAND_RATIO + COVER_MARGIN) * pitch)
        cover = _apply_filter(node_filter, pts, sdf, cover, COVER_MARGIN * pitch)
        ci, cj = ci[cover], cj[cover]

    keys = np.unique(np.concatenate(node_keys))
    I, J = np.divmod(keys, M)
    nodes = _grid_points(origin, I, J, fine)
    delta = domain.signed_distance_many(nodes)

    if len(keys) == 0:
        raise EmptyRegion("조건을 만족하는 그래프 노드가 없습니다.")
    if len(keys) > max_nodes:
        raise GraphTooLarge(f"노드 수 {len(keys)}개가 상한 {max_nodes}을 넘습니다.")

    edges = _lattice_edges(keys, I, J, delta, M, resolution, levels)
    nodes.flags.writeable = False
    weights = fast_segment_qh_lengths(domain, nodes[edges[:, 0]], nodes[edges[:, 1]])
    if not np.isfinite(weights).all():
        # 원판 조건으로 보장되므로 도달하지 않아야 함
        raise DisconnectedGraph("간선 표본이 영역 밖에 있습니다.")

    graph = QhGraph(
        domain=domain,
        region=box,
        resolution=resolution,
        cutoff=cutoff,
        levels=levels,
        nodes=nodes,
        keys=keys,
        delta=delta,
        edges=edges,
        weights=weights,
        pruned=pruned,
    )
    logger.debug(
        f"그래프 생성: 노드 {graph.node_count}, 간선 {graph.edge_count}, "
        f"resolution={resolution:.6g}, cutoff={cutoff:.6g}, 레벨 {levels}, 가지치기 {pruned}"
    )

    if require_connected:
        count, labels = graph.components()
        if count > 1:
            sizes = np.sort(np.bincount(labels))[::-1]
            raise DisconnectedGraph(
                f"그래프가 {count}개 성분으로 나뉘었습니다 (크기 {sizes[:2].tolist()}).",
                components=tuple(int(s) for s in sizes[:2]),
            )
    return graph


def _lattice_edges(
    keys: np.ndarray,
    I: np.ndarray,
    J: np.ndarray,
    delta: np.ndarray,
    M: int,
    resolution: float,
    levels: int,
) -> np.ndarray:
    """레벨별 16-이웃 간선 (양 끝점이 그 레벨 격자점이고 δ >= 2.5 s_k)"""
    found_edges = []
    for k in range(levels + 1):
        pitch = resolution / 2 ** k
        step = 2 ** (levels - k)
        eligible = np.flatnonzero((I % step == 0) & (J % step == 0) & (delta >= EDGE_DELTA_RATIO * pitch))
        if eligible.size < 2:
            continue
        ek = keys[eligible]
        ej = J[eligible]
        for di, dj in STENCIL_HALF:
            nj = ej + dj * step
            target = ek + di * step * M + dj * step
            pos = np.searchsorted(ek, target)
            pos_c = np.minimum(pos, len(ek) - 1)
            hit = (pos < len(ek)) & (ek[pos_c] == target) & (nj >= 0) & (nj < M)
            if hit.any():
                found_edges.append(np.stack((eligible[hit], eligible[pos_c[hit]]), axis=1))
    if not found_edges:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(found_edges)
