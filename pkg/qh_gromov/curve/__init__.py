"""
QH Gromov - 곡선 모듈

폴리라인 호의 유클리드/준쌍곡 길이, 호장 매개화, 부분호를 다룹니다.
"""

from .arc import SNAP_TOL, Arc
from .io import read_arc_csv, read_points_csv, write_arc_csv, write_points_csv
from .quadrature import fast_segment_qh_lengths, segment_qh_lengths

__all__ = [
    "Arc",
    "SNAP_TOL",
    "segment_qh_lengths",
    "fast_segment_qh_lengths",
    "read_points_csv",
    "read_arc_csv",
    "write_points_csv",
    "write_arc_csv",
]
