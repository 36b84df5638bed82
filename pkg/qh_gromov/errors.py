"""
예외 계층

모든 모듈의 예외는 QhError를 상속합니다.
부분 결과가 있는 예외는 속성으로 함께 전달합니다.
"""

from typing import Any, Optional


class QhError(Exception):
    """QH Gromov 기본 예외"""


class InvalidParameter(QhError, ValueError):
    """수치 파라미터 전제조건 위반 (h <= 0, tol <= 0, resolution <= 0 등)"""


# ========== domain ==========

class DomainError(QhError):
    """영역 관련 예외"""


class PointOutsideDomain(DomainError):
    """점이 열린 영역 내부에 있지 않음"""

    def __init__(self, point: Any, kind: str = ""):
        self.point = point
        self.kind = kind
        super().__init__(f"점이 영역 밖에 있습니다: {point} ({kind})")


class InvalidDomainSpec(DomainError):
    """영역 JSON 명세 오류"""


# ========== curve ==========

class CurveError(QhError):
    """곡선(호) 관련 예외"""


class InvalidArc(CurveError):
    """호 구성 조건 위반 (점 2개 미만, 연속 중복점 등)"""


class ArcLeavesDomain(CurveError):
    """호의 꼭짓점 또는 선분이 영역을 벗어남"""


class ParameterOutOfRange(CurveError):
    """준쌍곡 호장 파라미터가 [0, 길이] 범위를 벗어남"""


class PointNotOnArc(CurveError):
    """점이 호 위에 있지 않음 (스냅 허용오차 초과)"""


class QuadratureError(CurveError):
    """적응 구적이 구간 상한 안에서 수렴하지 않음"""


# ========== engine ==========

class EngineError(QhError):
    """거리 엔진 관련 예외"""


class EmptyRegion(EngineError):
    """작업 영역과 영역의 교집합이 비어 있음"""


class DisconnectedGraph(EngineError):
    """그래프가 연결되어 있지 않음"""

    def __init__(self, message: str, components: Optional[tuple] = None):
        self.components = components
        super().__init__(message)


class GraphTooLarge(EngineError):
    """그래프 노드 수가 설정 상한을 초과"""


class ToleranceNotReached(EngineError):
    """정밀화 상한 안에서 허용오차에 도달하지 못함"""

    def __init__(self, message: str, best: Any = None):
        self.best = best
        super().__init__(message)


class ShortnessNotCertified(EngineError):
    """h-short 인증 실패"""

    def __init__(self, message: str, certificate: Any = None):
        self.certificate = certificate
        super().__init__(message)


# ========== gromov ==========

class GromovError(QhError):
    """그로모프 곱/δ 관련 예외"""


class MatrixInconsistent(GromovError):
    """거리 행렬이 대칭/영대각/삼각부등식 조건을 위반"""


# ========== shortarc ==========

class ShortArcError(QhError):
    """짧은 호/길이 사상/분할 관련 예외"""


class RangeOverflow(ShortArcError):
    """길이 사상의 상이 대상 호를 넘어섬"""


class NotATriangle(ShortArcError):
    """세 호가 꼭짓점을 공유하는 삼각형을 이루지 않음"""


class CutOverflow(ShortArcError):
    """절단 길이(그로모프 곱)가 변의 길이를 허용오차 이상 초과"""


# ========== harness ==========

class HarnessError(QhError):
    """수열 구성 실행 관련 예외"""


class PrefixTooShort(HarnessError):
    """필요한 곱 수준을 만족하는 인덱스가 prefix 안에 없음"""


class NormalizationFailed(HarnessError):
    """교차 곱 편차와 변 길이 증가 조건을 prefix 안에서 만족할 수 없음"""


class SequencesEquivalent(HarnessError):
    """교차 곱이 증가함 - 두 수열이 동치로 보임"""
