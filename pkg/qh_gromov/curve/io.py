"""
호 CSV 입출력

형식: 헤더 `x,y`, 한 줄에 꼭짓점 하나
"""

import csv
import logging
from pathlib import Path
from typing import Iterable

import numpy as np

from ..domain import Point2
from ..errors import InvalidArc, InvalidParameter
from .arc import Arc


logger = logging.getLogger(__name__)

CSV_HEADER = ["x", "y"]


def read_points_csv(path: str | Path) -> list[Point2]:
    """
    점 목록 CSV 읽기 (prefix 파일, 점 집합 파일)

    Args:
        path: CSV 경로

    Returns:
        Point2 목록
    """
    path = Path(path)
    if not path.exists():
        raise InvalidParameter(f"CSV 파일이 없습니다: {path}")

    points = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != CSV_HEADER:
            raise InvalidParameter(f"CSV 헤더는 'x,y' 여야 합니다: {path}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise InvalidParameter(f"{path}:{lineno} 열 개수가 2가 아닙니다.")
            try:
                points.append(Point2(float(row[0]), float(row[1])))
            except ValueError as e:
                raise InvalidParameter(f"{path}:{lineno} 좌표 파싱 오류: {row}") from e

    logger.debug(f"{path}에서 점 {len(points)}개 로드")
    return points


def read_arc_csv(path: str | Path, domain=None) -> Arc:
    """CSV 꼭짓점으로 호 생성"""
    points = read_points_csv(path)
    if len(points) < 2:
        raise InvalidArc(f"호 CSV에는 점이 2개 이상 필요합니다: {path}")
    return Arc(points, domain)


def write_points_csv(points: Iterable[Point2] | np.ndarray, path: str | Path) -> Path:
    """점 목록을 CSV로 저장 (좌표는 유효숫자 17자리)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(points, np.ndarray):
        rows = points.reshape(-1, 2).tolist()
    else:
        rows = [p.to_list() for p in points]

    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for x, y in rows:
            writer.writerow([f"{x:.17g}", f"{y:.17g}"])
    return path


def write_arc_csv(arc: Arc, path: str | Path) -> Path:
    """호 꼭짓점을 CSV로 저장"""
    return write_points_csv(arc.xy, path)
