"""
QH Gromov - 영역 모듈

평면 열린 영역과 경계 거리 δ_X를 제공합니다.
"""

from .geometry import Box, Point2
from .shapes import (
    DOMAIN_KINDS,
    Annulus,
    AxisRect,
    BaseDomain,
    HalfPlane,
    PolygonComplement,
    PuncturedPlane,
    UnitDisk,
    get_domain,
    load_domain,
)

__all__ = [
    "Point2",
    "Box",
    "BaseDomain",
    "HalfPlane",
    "PuncturedPlane",
    "UnitDisk",
    "Annulus",
    "AxisRect",
    "PolygonComplement",
    "DOMAIN_KINDS",
    "get_domain",
    "load_domain",
]
