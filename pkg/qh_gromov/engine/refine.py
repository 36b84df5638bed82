"""
경로 정밀화

1. 국소 지름길: 부분 폴리라인을 직선으로 대체 (영역 안이고 길이가 줄 때)
2. 중점 삽입: 선분 길이 > ratio * min δ 인 선분을 반분
3. 좌표 하강: 홀짝 꼭짓점을 번갈아 8방향으로 이동 (보폭 <= δ/4)

판정은 가우스 근사 길이로 하고, 최종 채택은 적응 구적 길이로 확인합니다.
"""

import logging
from typing import Optional

import numpy as np

from ..curve import Arc, fast_segment_qh_lengths
from ..domain import BaseDomain
from ..errors import QhError
from ..settings import EngineSettings


logger = logging.getLogger(__name__)

SHORTCUT_SPANS = (16, 8, 4, 2)
_DIRECTIONS = np.array([(np.cos(a), np.sin(a)) for a in np.arange(8) * np.pi / 4])
_GAUSS_NODES = 6
# 적응 구적 잡음보다 큰 감소만 채택
_ACCEPT_RTOL = 1e-9


def _fast(domain: BaseDomain, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return fast_segment_qh_lengths(domain, a, b, nodes=_GAUSS_NODES)


def shortcut(domain: BaseDomain, xy: np.ndarray, spans=SHORTCUT_SPANS) -> np.ndarray:
    """
    국소 지름길 반복

    span 꼭짓점 간격의 후보 중 겹치지 않는 것을 이득 순으로 채택하고,
    더 이상 줄지 않을 때까지 반복합니다.
    """
    xy = np.array(xy, dtype=float)
    for span in spans:
        while len(xy) - 1 >= span:
            seg = _fast(domain, xy[:-1], xy[1:])
            cum = np.concatenate(([0.0], np.cumsum(seg)))
            starts = np.arange(0, len(xy) - span)
            a, b = xy[starts], xy[starts + span]
            gain = (cum[starts + span] - cum[starts]) - _fast(domain, a, b)
            cand = np.flatnonzero(gain > 1e-12 * cum[-1])
            if cand.size:
                cand = cand[domain.segments_in_domain(a[cand], b[cand])]
            if not cand.size:
                break

            used = np.zeros(len(xy) - 1, dtype=bool)
            keep = np.ones(len(xy), dtype=bool)
            for s in cand[np.argsort(-gain[cand], kind="stable")]:
                if used[s:s + span].any():
                    continue
                used[s:s + span] = True
                keep[s + 1:s + span] = False
            xy = xy[keep]
    return xy


def insert_midpoints(domain: BaseDomain, xy: np.ndarray, ratio: float, max_vertices: int) -> np.ndarray:
    """선분 길이가 ratio * min(δ 양 끝) 이하가 될 때까지 중점 삽입"""
    xy = np.array(xy, dtype=float)
    for _ in range(64):
        delta = domain.signed_distance_many(xy)
        lengths = np.hypot(*np.diff(xy, axis=0).T)
        excess = lengths / (ratio * np.minimum(delta[:-1], delta[1:]))
        need = excess > 1.0
        if not need.any():
            break
        budget = max_vertices - len(xy)
        if budget <= 0:
            logger.debug(f"꼭짓점 상한 {max_vertices} 도달 - 중점 삽입 중단")
            break
        idx = np.flatnonzero(need)
        if idx.size > budget:
            idx = np.sort(idx[np.argsort(-excess[idx], kind="stable")[:budget]])
        mids = (xy[idx] + xy[idx + 1]) / 2.0
        xy = np.insert(xy, idx + 1, mids, axis=0)
    return xy


def coordinate_descent(domain: BaseDomain, xy: np.ndarray, sweeps: int) -> np.ndarray:
    """
    내부 꼭짓점 좌표 하강

    보폭은 δ/8에서 시작해 개선이 없으면 반으로 줄이며, 항상 δ/4 이하입니다.
    """
    xy = np.array(xy, dtype=float)
    n = len(xy)
    if n < 3:
        return xy
    delta = domain.signed_distance_many(xy)
    step = delta / 8.0

    for _ in range(sweeps):
        for parity in (1, 2):
            idx = np.arange(parity, n - 1, 2)
            if not idx.size:
                continue
            prev, cur, nxt = xy[idx - 1], xy[idx], xy[idx + 1]
            base = _fast(domain, prev, cur) + _fast(domain, cur, nxt)

            cand = cur[:, None, :] + step[idx][:, None, None] * _DIRECTIONS[None, :, :]
            flat = cand.reshape(-1, 2)
            pr = np.repeat(prev, len(_DIRECTIONS), axis=0)
            nx = np.repeat(nxt, len(_DIRECTIONS), axis=0)
            cost = (_fast(domain, pr, flat) + _fast(domain, flat, nx)).reshape(len(idx), -1)
            best = np.argmin(cost, axis=1)
            best_cost = cost[np.arange(len(idx)), best]
            improve = np.flatnonzero(np.isfinite(best_cost) & (best_cost < base * (1.0 - 1e-13)))

            moved = np.zeros(len(idx), dtype=bool)
            if improve.size:
                new_pts = cand[improve, best[improve]]
                ok = (
                    (domain.signed_distance_many(new_pts) > 0.0)
                    & domain.segments_in_domain(prev[improve], new_pts)
                    & domain.segments_in_domain(new_pts, nxt[improve])
                )
                xy[idx[improve[ok]]] = new_pts[ok]
                moved[improve[ok]] = True
            step[idx[~moved]] /= 2.0

        delta = domain.signed_distance_many(xy)
        step = np.minimum(step, delta / 4.0)
        if np.all(step[1:-1] < 1e-10 * delta[1:-1]):
            break
    return xy


def refine_xy(domain: BaseDomain, xy: np.ndarray, settings: EngineSettings) -> np.ndarray:
    """정밀화 단계 조합 (끝점 고정)"""
    xy = shortcut(domain, xy)
    for _ in range(settings.refine_rounds):
        xy = insert_midpoints(domain, xy, settings.refine_segment_ratio, settings.max_path_vertices)
        xy = coordinate_descent(domain, xy, settings.refine_sweeps)
    return xy


def refine_path(domain: BaseDomain, arc: Arc, settings: Optional[EngineSettings] = None) -> Arc:
    """
    경로 정밀화

    Args:
        domain: 영역
        arc: 영역 안의 호

    Returns:
        같은 끝점, qh_length <= 입력 길이인 호
    """
    settings = settings or EngineSettings()
    if arc.domain != domain:
        arc = arc.with_domain(domain)
    xy = refine_xy(domain, arc.xy, settings)
    try:
        refined = Arc(xy, domain, rel_tol=settings.quad_rel_tol, max_intervals=settings.quad_max_intervals)
    except QhError as e:
        logger.warning(f"정밀화 결과를 호로 만들 수 없어 입력을 유지합니다: {e}")
        return arc

    before, after = arc.qh_length(), refined.qh_length()
    if after < before * (1.0 - _ACCEPT_RTOL):
        logger.debug(f"경로 정밀화: {before:.12g} -> {after:.12g} (꼭짓점 {len(arc)} -> {len(refined)})")
        return refined
    return arc
