"""
준쌍곡 선분 길이 구적

선분 [a, b] 위에서 ∫ ds / δ_X 를 계산합니다.

- segment_qh_lengths: 구간 반분 적응 심프슨 (여러 선분을 한 번에 처리)
- fast_segment_qh_lengths: 고정 가우스-르장드르 패널 (그래프 간선 가중치용)
"""

import logging

import numpy as np
from scipy import special

from ..errors import ArcLeavesDomain, QuadratureError


logger = logging.getLogger(__name__)

QUAD_REL_TOL = 1e-10
QUAD_MAX_INTERVALS = 2 ** 20
INITIAL_INTERVALS = 16

# 이보다 좁은 구간은 더 나누지 않고 채택
_MIN_WIDTH = 1e-15
_FAST_CHUNK = 100_000


def _density(domain, a: np.ndarray, d: np.ndarray, lengths: np.ndarray, seg: np.ndarray, s: np.ndarray) -> np.ndarray:
    pts = a[seg] + s[:, None] * d[seg]
    delta = domain.signed_distance_many(pts)
    if np.any(delta <= 0.0):
        bad = pts[np.argmax(delta <= 0.0)]
        raise ArcLeavesDomain(f"구적 중 영역 밖 점을 만났습니다: ({bad[0]:.12g}, {bad[1]:.12g})")
    return lengths[seg] / delta


def segment_qh_lengths(
    domain,
    a: np.ndarray,
    b: np.ndarray,
    rel_tol: float = QUAD_REL_TOL,
    max_intervals: int = QUAD_MAX_INTERVALS,
) -> np.ndarray:
    """
    선분별 준쌍곡 길이 (적응 심프슨)

    각 선분을 16구간으로 시작해 반분 전후 추정값이 맞을 때까지 나눕니다.
    구간 허용오차는 선분 추정값에 구간 폭 비율을 곱한 값입니다.

    Args:
        domain: BaseDomain
        a: (n, 2) 시작점
        b: (n, 2) 끝점
        rel_tol: 선분별 상대 허용오차
        max_intervals: 선분당 구간 수 상한

    Returns:
        (n,) 준쌍곡 길이

    Raises:
        ArcLeavesDomain: 표본점이 영역 밖
        QuadratureError: 구간 수 상한 초과
    """
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    n = len(a)
    if n == 0:
        return np.zeros(0)

    d = b - a
    lengths = np.hypot(d[:, 0], d[:, 1])
    m = INITIAL_INTERVALS

    seg = np.repeat(np.arange(n), m)
    lo = np.tile(np.arange(m) / m, n)
    hi = lo + 1.0 / m
    fa = _density(domain, a, d, lengths, seg, lo)
    fb = _density(domain, a, d, lengths, seg, hi)
    fm = _density(domain, a, d, lengths, seg, (lo + hi) / 2.0)
    whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)

    estimate = np.bincount(seg, weights=whole, minlength=n)
    tol = rel_tol * np.maximum(estimate[seg], np.finfo(float).tiny) * (hi - lo)

    total = np.zeros(n)
    counts = np.full(n, m)
    while seg.size:
        mid = (lo + hi) / 2.0
        flm = _density(domain, a, d, lengths, seg, (lo + mid) / 2.0)
        frm = _density(domain, a, d, lengths, seg, (mid + hi) / 2.0)
        width = hi - lo
        left = width / 12.0 * (fa + 4.0 * flm + fm)
        right = width / 12.0 * (fm + 4.0 * frm + fb)
        err = left + right - whole

        done = (np.abs(err) <= 15.0 * tol) | (width < _MIN_WIDTH)
        total += np.bincount(seg[done], weights=(left + right + err / 15.0)[done], minlength=n)

        keep = ~done
        if not keep.any():
            break
        counts += np.bincount(seg[keep], minlength=n)
        if counts.max() > max_intervals:
            worst = int(np.argmax(counts))
            raise QuadratureError(
                f"구적 구간 상한 {max_intervals} 초과: "
                f"선분 ({a[worst, 0]:.12g}, {a[worst, 1]:.12g}) -> ({b[worst, 0]:.12g}, {b[worst, 1]:.12g})"
            )

        seg_k, lo_k, mid_k, hi_k = seg[keep], lo[keep], mid[keep], hi[keep]
        seg = np.concatenate((seg_k, seg_k))
        lo = np.concatenate((lo_k, mid_k))
        hi = np.concatenate((mid_k, hi_k))
        fa, fm, fb = (
            np.concatenate((fa[keep], fm[keep])),
            np.concatenate((flm[keep], frm[keep])),
            np.concatenate((fm[keep], fb[keep])),
        )
        whole = np.concatenate((left[keep], right[keep]))
        tol = np.concatenate((tol[keep], tol[keep])) / 2.0

    return total


def fast_segment_qh_lengths(
    domain,
    a: np.ndarray,
    b: np.ndarray,
    nodes: int = 4,
    panel_ratio: float = 2.0,
    max_panels: int = 256,
) -> np.ndarray:
    """
    선분별 준쌍곡 길이 근사 (가우스-르장드르 패널)

    패널 수는 ceil(panel_ratio * 길이 / 최소 δ) 이며, δ 최소값은 선분 위 9점에서 구합니다.
    영역 밖 표본이 있는 선분은 inf를 반환합니다.

    Args:
        domain: BaseDomain
        a: (n, 2) 시작점
        b: (n, 2) 끝점
        nodes: 패널당 가우스 노드 수
        panel_ratio: 패널 밀도
        max_panels: 선분당 패널 상한

    Returns:
        (n,) 근사 길이
    """
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    out = np.empty(len(a))
    for start in range(0, len(a), _FAST_CHUNK):
        stop = start + _FAST_CHUNK
        out[start:stop] = _fast_chunk(domain, a[start:stop], b[start:stop], nodes, panel_ratio, max_panels)
    return out


def _fast_chunk(domain, a, b, nodes, panel_ratio, max_panels) -> np.ndarray:
    n = len(a)
    if n == 0:
        return np.zeros(0)
    d = b - a
    lengths = np.hypot(d[:, 0], d[:, 1])

    ts = np.linspace(0.0, 1.0, 9)
    sample_pts = a[:, None, :] + ts[None, :, None] * d[:, None, :]
    delta_min = domain.signed_distance_many(sample_pts.reshape(-1, 2)).reshape(n, 9).min(axis=1)
    valid = delta_min > 0.0

    panels = np.ones(n, dtype=int)
    panels[valid] = np.clip(np.ceil(panel_ratio * lengths[valid] / delta_min[valid]), 1, max_panels).astype(int)

    x, w = special.roots_legendre(nodes)
    seg = np.repeat(np.arange(n), panels)
    offsets = np.concatenate(([0], np.cumsum(panels)[:-1]))
    k = np.arange(panels.sum()) - np.repeat(offsets, panels)
    width = 1.0 / panels[seg]
    s = (k * width)[:, None] + (x[None, :] + 1.0) / 2.0 * width[:, None]

    pts = a[seg][:, None, :] + s[:, :, None] * d[seg][:, None, :]
    delta = domain.signed_distance_many(pts.reshape(-1, 2)).reshape(len(seg), nodes)
    bad = np.bincount(seg, weights=(delta <= 0.0).any(axis=1).astype(float), minlength=n) > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = (w[None, :] / delta).sum(axis=1) * width / 2.0 * lengths[seg]
    vals[~np.isfinite(vals)] = 0.0
    out = np.bincount(seg, weights=vals, minlength=n)
    out[bad | ~valid] = np.inf
    return out
