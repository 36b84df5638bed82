"""
QH Gromov - 보고서 모듈

JSON 보고서 모델과 결정적 직렬화, 호 CSV 출력을 제공합니다.
"""

from .models import EngineSummary, Report, RunConfig
from .writer import engine_summary, normalize, render_report, write_arcs, write_report

__all__ = [
    "RunConfig",
    "Report",
    "EngineSummary",
    "engine_summary",
    "normalize",
    "render_report",
    "write_report",
    "write_arcs",
]
