"""
보고서 직렬화

부동소수점은 유효숫자 12자리로 고정하고 키를 정렬해
같은 설정과 시드면 바이트 단위로 같은 JSON을 만듭니다.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..curve import Arc, write_arc_csv
from ..engine import EngineStats
from .models import EngineSummary, Report


logger = logging.getLogger(__name__)

FLOAT_DIGITS = 12


def normalize(value: Any, digits: int = FLOAT_DIGITS) -> Any:
    """
    JSON 직렬화 가능한 값으로 변환

    - float: 유효숫자 digits 자리, 무한대/NaN은 문자열
    - numpy 스칼라/배열: 파이썬 값/리스트
    - tuple, set: 리스트 (set은 정렬)
    """
    if isinstance(value, dict):
        return {str(k): normalize(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v, digits) for v in value]
    if isinstance(value, set):
        return [normalize(v, digits) for v in sorted(value)]
    if isinstance(value, np.ndarray):
        return normalize(value.tolist(), digits)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        rounded = float(f"{value:.{digits}g}")
        return 0.0 if rounded == 0.0 else rounded
    return value


def engine_summary(stats: Optional[EngineStats]) -> EngineSummary:
    if stats is None:
        return EngineSummary()
    return EngineSummary(**stats.to_dict())


def render_report(report: Report) -> str:
    """보고서 JSON 문자열"""
    payload = normalize(report.model_dump(mode="python"))
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(report: Report, path: str | Path) -> Path:
    """
    보고서 저장

    Args:
        report: Report
        path: JSON 경로

    Returns:
        저장한 경로
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(render_report(report))
    logger.info(f"보고서 저장: {path}")
    return path


def write_arcs(arcs: dict[str, Optional[Arc]], report_path: str | Path) -> list[str]:
    """
    호들을 보고서 옆 CSV로 저장

    파일 이름은 `<보고서 이름>.<키>.csv` 입니다. None인 호(빈 조각)는 건너뜁니다.

    Returns:
        저장한 파일 경로 목록
    """
    report_path = Path(report_path)
    written = []
    for key, arc in arcs.items():
        if arc is None:
            continue
        path = report_path.with_name(f"{report_path.stem}.{key}.csv")
        write_arc_csv(arc, path)
        written.append(str(path))
    return written
