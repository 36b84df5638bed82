"""
서로 다른 두 그로모프 수열 사이의 h-short 호 수열 구성

기준점 z와 prefix {x_i}, {y_i}에서
1. 교차 곱 (x_i|y_i)_z 가 자라면 SequencesEquivalent
2. |(x_i|y_i)_z - (x_j|y_j)_z| <= h, l(β_{i+1}) >= l(β_i) + 3h 가 되도록 인덱스 선택
3. 변 β_i: z -> x_i, γ_i: z -> y_i, α_i: x_i -> y_i 인증과 삼각형 분할
4. f_ij: α_i -> α_j, f_ij(w_i) = w_j 길이 사상
5. 짧음, 발산, 합성, 변위 <= 12 (δ̂ + h) 검사
보조 사상 h_ij, g_ij, φ_i, ψ_i의 변위는 4 δ̂ + 2h와 비교해 따로 보고합니다.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..curve import SNAP_TOL
from ..domain import BaseDomain, Point2
from ..engine import QhEngine, ShortArcCert
from ..errors import InvalidParameter, NormalizationFailed, SequencesEquivalent
from ..gromov import (
    DeltaEstimate,
    DistanceMatrix,
    EquivalenceDiagnostics,
    SequenceDiagnostics,
    SequencePrefix,
    as_engine,
    equivalence_diagnostics,
    sequence_diagnostics,
)
from ..settings import HarnessSettings
from ..shortarc import LengthMap, TriangleSubdivision, is_h_short, make_length_map, subdivide_triangle
from .checks import (
    SLACK_FLOOR,
    ArcSampling,
    CompositionReport,
    DisplacementRow,
    composition_check,
    displacement_report,
    displacement_rows,
    run_point_delta,
)


logger = logging.getLogger(__name__)


@dataclass
class DivergenceTable:
    """k(x_i, s_1), k(y_i, s_1) 증가 표"""
    s1: Point2
    k_x: list[float]
    k_y: list[float]
    slack: float
    required_step: float

    @property
    def min_step(self) -> float:
        steps = [b - a for seq in (self.k_x, self.k_y) for a, b in zip(seq, seq[1:])]
        return min(steps) if steps else float("inf")

    @property
    def passed(self) -> bool:
        return self.min_step >= self.required_step

    def to_dict(self) -> dict:
        return {
            "s1": self.s1.to_list(),
            "k_x": list(self.k_x),
            "k_y": list(self.k_y),
            "min_step": self.min_step,
            "required_step": self.required_step,
            "slack": self.slack,
            "passed": self.passed,
        }


@dataclass
class AuxiliaryMaps:
    """보조 사상 변위 (h_ij, g_ij, φ_i, ψ_i)"""
    bound: float
    rows: dict[str, list[DisplacementRow]]
    phi_anchor_errors: list[float]
    slack: float

    @property
    def passed(self) -> bool:
        rows_ok = all(r.passed for table in self.rows.values() for r in table)
        return rows_ok and all(e <= self.slack for e in self.phi_anchor_errors)

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "slack": self.slack,
            "phi_anchor_errors": list(self.phi_anchor_errors),
            "tables": {name: [r.to_dict() for r in table] for name, table in self.rows.items()},
            "passed": self.passed,
        }


@dataclass
class Theorem13Run:
    """두 수열 구성 실행 결과"""
    basepoint: Point2
    prefix_a: list[Point2]
    prefix_b: list[Point2]
    h: float
    i_max: int
    equivalence: EquivalenceDiagnostics
    diagnostics_a: SequenceDiagnostics
    diagnostics_b: SequenceDiagnostics
    selected: list[int]
    betas: list[ShortArcCert]
    gammas: list[ShortArcCert]
    alphas: list[ShortArcCert]
    triangles: list[TriangleSubdivision]
    maps: dict[tuple[int, int], LengthMap]
    divergence: DivergenceTable
    delta: DeltaEstimate
    delta_point_count: int
    bound: float
    bound_slack: float
    distance_tol: float
    engine: QhEngine = field(repr=False)
    settings: HarnessSettings = field(repr=False)
    auxiliary: Optional[AuxiliaryMaps] = None
    displacements: Optional[list[DisplacementRow]] = None
    composition: Optional[CompositionReport] = None

    @property
    def delta_hat(self) -> float:
        return self.delta.delta_hat

    @property
    def cross_products(self) -> list[float]:
        return [self.equivalence.diagonal[i] for i in self.selected]

    @property
    def w(self) -> list[Point2]:
        return [t.alpha.w for t in self.triangles]

    @property
    def p(self) -> list[Point2]:
        return [t.alpha.p for t in self.triangles]

    @property
    def q(self) -> list[Point2]:
        return [t.gamma.p for t in self.triangles]

    def normalization_holds(self) -> bool:
        c = self.cross_products
        spread = max(c) - min(c)
        steps = [
            later.length - earlier.length
            for side in (self.betas, self.gammas)
            for earlier, later in zip(side, side[1:])
        ]
        return spread <= self.h and all(s >= 3.0 * self.h for s in steps)

    @property
    def checks(self) -> dict[str, bool]:
        rows = displacement_report(self)
        anchored = []
        for (i, j), f in self.maps.items():
            w_j = self.triangles[j - 1].alpha.w
            snap = SNAP_TOL * self.engine.boundary_distance(w_j)
            anchored.append(f.apply_t(f.src_anchor_t).distance(w_j) <= snap)
        sides = self.betas + self.gammas + self.alphas
        return {
            "sides_h_short": all(is_h_short(cert, self.h) for cert in sides),
            "normalization": self.normalization_holds(),
            "subdivision": all(t.passed for t in self.triangles),
            "divergence": self.divergence.passed,
            "anchored_at_w": all(anchored),
            "composition": composition_check(self).passed,
            "displacement_within_bound": all(r.passed for r in rows),
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        rows = displacement_report(self)
        c_all = self.equivalence.diagonal
        return {
            "basepoint": self.basepoint.to_list(),
            "prefix_a": [p.to_list() for p in self.prefix_a],
            "prefix_b": [p.to_list() for p in self.prefix_b],
            "h": self.h,
            "i_max": self.i_max,
            "equivalence": self.equivalence.to_dict(),
            "cross_product_range": max(c_all) - min(c_all),
            "prefix_a_growth": self.diagnostics_a.to_dict(),
            "prefix_b_growth": self.diagnostics_b.to_dict(),
            "selected": list(self.selected),
            "cross_products": self.cross_products,
            "sides": [
                {
                    "i": i,
                    "x": beta.end.to_list(),
                    "y": gamma.end.to_list(),
                    "beta": {"length": beta.length, "h_achieved": beta.h_achieved, "width": beta.width},
                    "gamma": {"length": gamma.length, "h_achieved": gamma.h_achieved, "width": gamma.width},
                    "alpha": {"length": alpha.length, "h_achieved": alpha.h_achieved, "width": alpha.width},
                }
                for i, (beta, gamma, alpha) in enumerate(zip(self.betas, self.gammas, self.alphas), start=1)
            ],
            "subdivisions": [t.to_dict() for t in self.triangles],
            "w": [p.to_list() for p in self.w],
            "p": [p.to_list() for p in self.p],
            "q": [p.to_list() for p in self.q],
            "divergence": self.divergence.to_dict(),
            "delta": self.delta.to_dict(),
            "delta_point_count": self.delta_point_count,
            "bound": self.bound,
            "bound_slack": self.bound_slack,
            "distance_tol": self.distance_tol,
            "displacements": [r.to_dict() for r in rows],
            "composition": composition_check(self).to_dict(),
            "auxiliary": self.auxiliary.to_dict() if self.auxiliary is not None else None,
            "checks": self.checks,
            "passed": self.passed,
        }


def _normalize(
    engine: QhEngine,
    z: Point2,
    prefix_a: Sequence[Point2],
    prefix_b: Sequence[Point2],
    cross: Sequence[float],
    h: float,
    i_max: int,
) -> tuple[list[int], list[ShortArcCert], list[ShortArcCert]]:
    """교차 곱 차 <= h, 변 길이 증가 >= 3h 인 인덱스를 앞에서부터 탐욕적으로 선택"""
    n = min(len(prefix_a), len(prefix_b))
    kept: list[int] = []
    betas: list[ShortArcCert] = []
    gammas: list[ShortArcCert] = []
    for j in range(n):
        if any(abs(cross[j] - cross[k]) > h for k in kept):
            continue
        beta = engine.short_arc(z, prefix_a[j], h)
        gamma = engine.short_arc(z, prefix_b[j], h)
        if betas and (beta.length < betas[-1].length + 3.0 * h or gamma.length < gammas[-1].length + 3.0 * h):
            continue
        kept.append(j)
        betas.append(beta)
        gammas.append(gamma)
        if len(kept) == i_max:
            return kept, betas, gammas
    raise NormalizationFailed(
        f"정규화 조건을 만족하는 인덱스가 {len(kept)}개뿐입니다 (필요 {i_max}개, prefix {n}개)"
    )


def _auxiliary_maps(
    engine: QhEngine,
    z: Point2,
    betas: list[ShortArcCert],
    gammas: list[ShortArcCert],
    triangles: list[TriangleSubdivision],
    bound: float,
    bound_slack: float,
    settings: HarnessSettings,
    tol: float,
) -> AuxiliaryMaps:
    """h_ij, g_ij (z 고정), φ_i: α_i'' -> γ_i'', ψ_i: α_i' -> β_i'' 변위"""
    count = len(betas)
    h_maps, g_maps, phi_maps, psi_maps = {}, {}, {}, {}
    phi_errors = []
    slack = max(t.slack for t in triangles)
    for i in range(1, count + 1):
        for j in range(i, count + 1):
            h_maps[(i, j)] = make_length_map(betas[i - 1].arc, betas[j - 1].arc, z, z, overflow_tol=slack)
            g_maps[(i, j)] = make_length_map(gammas[i - 1].arc, gammas[j - 1].arc, z, z, overflow_tol=slack)

        tri = triangles[i - 1]
        a2, g2 = tri.alpha.doubleprime, tri.gamma.doubleprime
        if a2 is not None and g2 is not None:
            phi = LengthMap(a2, g2, a2.qh_length(), g2.qh_length(), 1, overflow_tol=tri.slack)
            phi_maps[(i, i)] = phi
            # φ_i(p_i) = q_i
            phi_errors.append(abs(phi.raw_image_t(0.0)))
        a1, b2 = tri.alpha.prime, tri.beta.doubleprime
        if a1 is not None and b2 is not None:
            psi_maps[(i, i)] = LengthMap(a1, b2, 0.0, b2.qh_length(), -1, overflow_tol=tri.slack)

    rows = {
        name: displacement_rows(engine, maps, bound, bound_slack, settings, tol, samples=settings.aux_samples)
        for name, maps in (("h", h_maps), ("g", g_maps), ("phi", phi_maps), ("psi", psi_maps))
    }
    return AuxiliaryMaps(bound=bound, rows=rows, phi_anchor_errors=phi_errors, slack=slack)


def theorem13_construct(
    engine: QhEngine | BaseDomain,
    z: Point2,
    prefix_a: Sequence[Point2],
    prefix_b: Sequence[Point2],
    h: float,
    i_max: int,
    settings: Optional[HarnessSettings] = None,
    auxiliary: bool = True,
) -> Theorem13Run:
    """
    h-short 삼각형 수열과 길이 사상 f_ij 구성

    Args:
        engine: 거리 엔진
        z: 기준점
        prefix_a: x_1, ..., x_n
        prefix_b: y_1, ..., y_n
        h: 짧음 매개변수 (> 0)
        i_max: 선택할 인덱스 수 (>= 2)
        settings: 실행 설정
        auxiliary: 보조 사상 변위 계산 여부

    Returns:
        Theorem13Run

    Raises:
        InvalidParameter: h <= 0, i_max < 2
        SequencesEquivalent: 교차 곱이 처음 값보다 equivalence_margin * h 넘게 커짐
        NormalizationFailed: 정규화 조건을 만족하는 인덱스 부족
    """
    engine = as_engine(engine)
    settings = settings or HarnessSettings()
    if not h > 0:
        raise InvalidParameter(f"h는 양수여야 합니다: {h}")
    if i_max < 2:
        raise InvalidParameter(f"i_max는 2 이상이어야 합니다: {i_max}")
    na, nb = len(prefix_a), len(prefix_b)
    if min(na, nb) < i_max:
        raise NormalizationFailed(f"prefix 길이 {na}, {nb}가 i_max {i_max}보다 짧습니다.")

    distance_tol = min(engine.settings.tol, h / 4.0)
    product_tol = 3.0 * distance_tol
    logger.info(f"두 수열 구성 시작: z={z}, prefix {na}/{nb}개, h={h}, i_max={i_max}")

    matrix = DistanceMatrix.compute(engine, list(prefix_a) + list(prefix_b) + [z], distance_tol)
    base = na + nb
    equivalence = equivalence_diagnostics(engine, prefix_a, prefix_b, z, product_tol, matrix=matrix)
    diag_a = sequence_diagnostics(SequencePrefix.from_matrix(matrix, base, range(na), product_tol), tail=1)
    diag_b = sequence_diagnostics(SequencePrefix.from_matrix(matrix, base, range(na, na + nb), product_tol), tail=1)

    cross = equivalence.diagonal
    growth = max(cross) - cross[0]
    if growth > settings.equivalence_margin * h:
        raise SequencesEquivalent(
            f"교차 곱 (x_i|y_i)_z 가 처음 값보다 {growth:.6g} 커졌습니다 "
            f"(> {settings.equivalence_margin} h = {settings.equivalence_margin * h:.6g})"
        )

    selected, betas, gammas = _normalize(engine, z, prefix_a, prefix_b, cross, h, i_max)
    logger.info(f"정규화 인덱스: {selected}")

    alphas = [engine.short_arc(prefix_a[k], prefix_b[k], h) for k in selected]
    triangles = [subdivide_triangle(b, g, a, h) for b, g, a in zip(betas, gammas, alphas)]

    maps: dict[tuple[int, int], LengthMap] = {}
    for i in range(1, i_max + 1):
        for j in range(i, i_max + 1):
            ti, tj = triangles[i - 1], triangles[j - 1]
            maps[(i, j)] = LengthMap(
                ti.alpha.side,
                tj.alpha.side,
                ti.alpha.t_w,
                tj.alpha.t_w,
                1,
                overflow_tol=max(ti.slack, tj.slack),
            )

    alpha_1 = alphas[0].arc
    s1 = alpha_1.point_at_qh_length(alpha_1.qh_length() / 2.0)
    k_x = [engine.distance(betas[i].end, s1, distance_tol) for i in range(i_max)]
    k_y = [engine.distance(gammas[i].end, s1, distance_tol) for i in range(i_max)]
    div_slack = max(e.width for e in k_x + k_y) + SLACK_FLOOR
    divergence = DivergenceTable(
        s1=s1,
        k_x=[e.upper for e in k_x],
        k_y=[e.upper for e in k_y],
        slack=div_slack,
        required_step=3.0 * h - 2.0 * div_slack,
    )

    sampling = ArcSampling()
    for cert in betas + gammas + alphas:
        sampling.add_arc(cert.arc, h)
    marks = [pt for t in triangles for pt in (t.alpha.w, t.alpha.p, t.gamma.p)] + [s1]
    required = [z] + sampling.endpoints
    delta, full_count = run_point_delta(engine, required, marks + sampling.interior, settings, distance_tol)

    run = Theorem13Run(
        basepoint=z,
        prefix_a=list(prefix_a),
        prefix_b=list(prefix_b),
        h=h,
        i_max=i_max,
        equivalence=equivalence,
        diagnostics_a=diag_a,
        diagnostics_b=diag_b,
        selected=selected,
        betas=betas,
        gammas=gammas,
        alphas=alphas,
        triangles=triangles,
        maps=maps,
        divergence=divergence,
        delta=delta,
        delta_point_count=full_count,
        bound=12.0 * (delta.delta_hat + h),
        bound_slack=12.0 * delta.slack,
        distance_tol=distance_tol,
        engine=engine,
        settings=settings,
    )
    if auxiliary:
        run.auxiliary = _auxiliary_maps(
            engine, z, betas, gammas, triangles,
            4.0 * delta.delta_hat + 2.0 * h, 4.0 * delta.slack, settings, distance_tol,
        )
    displacement_report(run)
    composition_check(run)
    logger.info(f"두 수열 구성 완료: δ̂={run.delta_hat:.6g}, 상한={run.bound:.6g}, 통과={run.passed}")
    return run
