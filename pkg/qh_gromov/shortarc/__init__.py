"""
QH Gromov - 짧은 호 모듈

h-short 판정, 곱 샌드위치, 부분호 재인증, 길이 사상, 삼각형 분할을 제공합니다.
"""

from .certify import (
    SandwichReport,
    SandwichSample,
    is_h_short,
    subarc_is_short,
    verify_product_sandwich,
)
from .length_map import LengthMap, apply_length_map, make_length_map
from .subdivision import Subdivision, TriangleSubdivision, subdivide_side, subdivide_triangle

__all__ = [
    "is_h_short",
    "verify_product_sandwich",
    "subarc_is_short",
    "SandwichReport",
    "SandwichSample",
    "LengthMap",
    "make_length_map",
    "apply_length_map",
    "Subdivision",
    "TriangleSubdivision",
    "subdivide_side",
    "subdivide_triangle",
]
