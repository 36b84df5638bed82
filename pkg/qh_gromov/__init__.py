"""
QH Gromov - 평면 영역의 준쌍곡 거리 계산 및 그로모프 쌍곡성 검증 도구

평면 영역에서 준쌍곡 거리(quasihyperbolic metric)를 근사하고,
h-short 호를 인증하며, 그로모프 곱/4점 δ/삼각형 분할/길이 사상을
구성하여 변위 상한(4δ+2h, 12(δ+h))을 수치적으로 검증합니다.
"""

__version__ = "0.1.0"
