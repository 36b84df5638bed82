"""
QH Gromov - 실행 하네스 모듈

그로모프 수열 prefix에서 h-short 호 수열과 길이 사상을 만들고
변위 상한, 합성, 발산을 수치로 검사합니다.
"""

from .checks import (
    CompositionReport,
    DisplacementRow,
    SupSample,
    composition_check,
    displacement_report,
    run_point_delta,
    sampled_supremum,
)
from .lemma import Lemma31Run, lemma31_construct
from .theorem import AuxiliaryMaps, DivergenceTable, Theorem13Run, theorem13_construct

__all__ = [
    "Lemma31Run",
    "lemma31_construct",
    "Theorem13Run",
    "theorem13_construct",
    "DivergenceTable",
    "AuxiliaryMaps",
    "DisplacementRow",
    "CompositionReport",
    "SupSample",
    "displacement_report",
    "composition_check",
    "sampled_supremum",
    "run_point_delta",
]
