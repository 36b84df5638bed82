"""
FastAPI 라우터

거리, h-short 호, 그로모프 곱, 4점 δ API 엔드포인트
"""

import logging
from typing import Any, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from ..domain import BaseDomain, Point2, get_domain
from ..engine import QhEngine
from ..errors import InvalidDomainSpec, QhError
from ..gromov import DistanceMatrix, four_point_delta, gromov_product
from ..report import normalize
from ..settings import EngineSettings, HarnessSettings, load_named_domains
from ..shortarc import is_h_short


logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/qh", tags=["qh-gromov"])


def resolve_domain(ref: str | dict) -> BaseDomain:
    """등록된 이름 또는 JSON 명세로 영역 생성"""
    if isinstance(ref, dict):
        return get_domain(ref)
    named = load_named_domains()
    if ref not in named:
        raise InvalidDomainSpec(f"등록되지 않은 영역 이름: {ref} (이름: {sorted(named)})")
    return get_domain(named[ref])


def _error(e: QhError) -> HTTPException:
    status = 400 if isinstance(e, InvalidDomainSpec) else 422
    logger.info(f"요청 오류 {status}: {type(e).__name__}: {e}")
    return HTTPException(status_code=status, detail=f"{type(e).__name__}: {e}")


# ========== Request/Response Models ==========

class DistanceRequest(BaseModel):
    domain: str | dict[str, Any]
    x: tuple[float, float]
    y: tuple[float, float]
    tol: Optional[float] = Field(default=None, gt=0)


class DistanceResponse(BaseModel):
    lower: float
    upper: float
    width: float
    method: str
    converged: bool
    resolutions: list[float] = []
    path: list[list[float]] = []


class ArcRequest(BaseModel):
    domain: str | dict[str, Any]
    x: tuple[float, float]
    y: tuple[float, float]
    h: float = Field(default=0.1, gt=0)


class ArcResponse(BaseModel):
    length: float
    h_achieved: float
    lower: float
    upper: float
    h_short: bool
    vertices: list[list[float]] = []


class ProductRequest(BaseModel):
    domain: str | dict[str, Any]
    x: tuple[float, float]
    y: tuple[float, float]
    w: tuple[float, float]
    tol: float = Field(default=1e-2, gt=0)


class ProductResponse(BaseModel):
    value: float
    distance_slack: float
    k_xw: float
    k_yw: float
    k_xy: float
    within_bounds: bool


class DeltaRequest(BaseModel):
    domain: str | dict[str, Any]
    points: list[tuple[float, float]] = Field(min_length=1)
    tol: float = Field(default=1e-2, gt=0)
    seed: int = 0


class DeltaResponse(BaseModel):
    delta_hat: float
    witness: Optional[list[int]] = None
    quadruples_checked: int
    exhaustive: bool
    slack: float
    point_count: int


# ========== Endpoints ==========

@router.get("/domains")
async def list_domains():
    """등록된 예제 영역 목록"""
    domains = [{"name": name, **spec} for name, spec in sorted(load_named_domains().items())]
    return {"domains": domains, "total": len(domains)}


@router.post("/distance", response_model=DistanceResponse)
def distance(request: DistanceRequest):
    """
    준쌍곡 거리 추정

    - domain: 등록된 이름 또는 {"kind", "params"} 명세
    - x, y: 내부 점
    - tol: 허용오차 (기본: defaults.yaml)
    """
    try:
        engine = QhEngine(resolve_domain(request.domain), EngineSettings())
        est = engine.distance(Point2(*request.x), Point2(*request.y), request.tol)
    except QhError as e:
        raise _error(e)
    return DistanceResponse(
        lower=est.lower,
        upper=est.upper,
        width=est.width,
        method=est.method,
        converged=est.converged,
        resolutions=list(est.resolutions),
        path=[] if est.path is None else est.path.xy.tolist(),
    )


@router.post("/arc", response_model=ArcResponse)
def arc(request: ArcRequest):
    """h-short 호 인증"""
    try:
        engine = QhEngine(resolve_domain(request.domain), EngineSettings())
        cert = engine.short_arc(Point2(*request.x), Point2(*request.y), request.h)
    except QhError as e:
        raise _error(e)
    return ArcResponse(
        length=cert.length,
        h_achieved=cert.h_achieved,
        lower=cert.k_lower,
        upper=cert.k_upper,
        h_short=is_h_short(cert, request.h),
        vertices=cert.arc.xy.tolist(),
    )


@router.post("/product", response_model=ProductResponse)
def product(request: ProductRequest):
    """그로모프 곱 (x|y)_w"""
    try:
        engine = QhEngine(resolve_domain(request.domain), EngineSettings())
        record = gromov_product(engine, Point2(*request.x), Point2(*request.y), Point2(*request.w), request.tol)
    except QhError as e:
        raise _error(e)
    return ProductResponse(
        value=record.value,
        distance_slack=record.distance_slack,
        k_xw=record.k_xw,
        k_yw=record.k_yw,
        k_xy=record.k_xy,
        within_bounds=record.within_bounds(),
    )


@router.post("/delta", response_model=DeltaResponse)
def delta(request: DeltaRequest):
    """점 집합의 경험적 4점 δ"""
    harness = HarnessSettings()
    try:
        engine = QhEngine(resolve_domain(request.domain), EngineSettings())
        points = [Point2(*p) for p in request.points]
        matrix = DistanceMatrix.compute(engine, points, request.tol)
        estimate = four_point_delta(
            matrix,
            exhaustive_max=harness.delta_exhaustive_max,
            samples=harness.delta_sampled_quadruples,
            seed=request.seed,
        )
    except QhError as e:
        raise _error(e)
    payload = normalize(estimate.to_dict())
    return DeltaResponse(**{k: payload[k] for k in DeltaResponse.model_fields})
