"""
QH Gromov - 그로모프 모듈

그로모프 곱, 4점 δ, 유한 prefix 수열 진단을 제공합니다.
"""

from .delta import DeltaEstimate, four_point_delta
from .products import DistanceMatrix, ProductRecord, as_engine, gromov_product
from .sequences import (
    EquivalenceDiagnostics,
    SequenceDiagnostics,
    SequencePrefix,
    equivalence_diagnostics,
    sequence_diagnostics,
    tail_minima,
)

__all__ = [
    "ProductRecord",
    "gromov_product",
    "DistanceMatrix",
    "as_engine",
    "DeltaEstimate",
    "four_point_delta",
    "SequencePrefix",
    "SequenceDiagnostics",
    "sequence_diagnostics",
    "EquivalenceDiagnostics",
    "equivalence_diagnostics",
    "tail_minima",
]
