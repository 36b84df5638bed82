"""
보고서 모델

모든 보고서는 해석된 실행 설정(RunConfig)을 그대로 포함합니다.
"""

from typing import Any, Optional

from pydantic import BaseModel, Field, field_validator


class RunConfig(BaseModel):
    """한 번의 CLI 실행 설정"""
    command: str
    domain: dict[str, Any]
    domain_ref: str
    params: dict[str, Any] = Field(default_factory=dict)
    tol: float = 1e-2
    h: float = 0.1
    seed: int = 0
    out: Optional[str] = None
    engine: dict[str, Any] = Field(default_factory=dict)
    harness: dict[str, Any] = Field(default_factory=dict)

    @field_validator("tol", "h")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError(f"허용오차는 양수여야 합니다: {value}")
        return value


class EngineSummary(BaseModel):
    """엔진 사용 기록"""
    queries: int = 0
    cache_hits: int = 0
    segment_hits: int = 0
    graph_builds: int = 0
    max_nodes_seen: int = 0
    resolutions_used: list[float] = Field(default_factory=list)


class Report(BaseModel):
    """JSON 보고서"""
    command: str
    config: RunConfig
    result: dict[str, Any] = Field(default_factory=dict)
    checks: dict[str, bool] = Field(default_factory=dict)
    passed: bool = True
    engine: EngineSummary = Field(default_factory=EngineSummary)
    error: Optional[str] = None
    artifacts: list[str] = Field(default_factory=list)
