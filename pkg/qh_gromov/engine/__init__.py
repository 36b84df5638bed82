"""
QH Gromov - 거리 엔진 모듈

적응 격자 그래프 최단 경로와 경로 정밀화로 준쌍곡 거리를 근사하고
h-short 호를 인증합니다.
"""

from .distance import (
    DistanceEstimate,
    EngineStats,
    QhEngine,
    ShortArcCert,
    qh_distance,
    short_arc,
)
from .graph import QhGraph, build_graph
from .refine import refine_path

__all__ = [
    "QhGraph",
    "build_graph",
    "DistanceEstimate",
    "ShortArcCert",
    "EngineStats",
    "QhEngine",
    "qh_distance",
    "refine_path",
    "short_arc",
]
