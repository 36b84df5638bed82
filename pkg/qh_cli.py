# -*- coding: utf-8 -*-
"""
QH Gromov - 명령줄 실행

실행 방법:
    python qh_cli.py distance --domain half_plane --from 0,1 --to 0,2.71828 --tol 0.01
    python qh_cli.py theorem13 --domain half_plane --basepoint 0,1 \\
        --prefix-a a.csv --prefix-b b.csv --h 0.1 --imax 6 --out run.json

환경 변수:
    QH_TOL, QH_MAX_HALVINGS, QH_MAX_NODES 등: 엔진 설정 (defaults.yaml 보다 우선)
    QH_H, QH_SEED, QH_SAMPLES 등: 실행 설정
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

# 환경 변수 로드
env_path = Path(__file__).parent / ".env"
if env_path.exists():
    load_dotenv(env_path)

from qh_gromov.cli import dispatch


if __name__ == "__main__":
    sys.exit(dispatch())
