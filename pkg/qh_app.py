# -*- coding: utf-8 -*-
"""
QH Gromov - FastAPI 앱

평면 영역의 준쌍곡 거리, h-short 호, 그로모프 곱, 4점 δ API 서버

실행 방법:
    uvicorn qh_app:app --reload --host 0.0.0.0 --port 8000

API 문서:
    http://localhost:8000/docs (Swagger UI)
    http://localhost:8000/redoc (ReDoc)
"""

from pathlib import Path
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from dotenv import load_dotenv

# 환경 변수 로드
env_path = Path(__file__).parent / ".env"
if env_path.exists():
    load_dotenv(env_path)

from qh_gromov import __version__
from qh_gromov.api import router as qh_router
from qh_gromov.settings import EngineSettings, load_named_domains


@asynccontextmanager
async def lifespan(app: FastAPI):
    """앱 시작/종료 이벤트 핸들러"""
    settings = EngineSettings()
    print("=" * 60)
    print("QH Gromov API 서버 시작")
    print("=" * 60)
    print(f"기본 tol: {settings.tol:g}, 최대 반감: {settings.max_halvings}, 노드 상한: {settings.max_nodes}")
    print(f"등록된 영역: {', '.join(sorted(load_named_domains()))}")
    print()

    yield

    print("\nQH Gromov API 서버 종료")


app = FastAPI(
    title="QH Gromov API",
    description="""
## 평면 영역의 준쌍곡 거리와 그로모프 구성

### 주요 기능

- **거리**: 준쌍곡 거리 k_X(x, y) 상하한 추정
- **호**: h-short 호 인증
- **곱**: 그로모프 곱 (x|y)_w
- **δ**: 점 집합의 경험적 4점 δ

영역은 등록된 이름(`GET /api/qh/domains`) 또는 `{"kind", "params"}` 명세로 지정합니다.
    """,
    version=__version__,
    lifespan=lifespan
)

# CORS 설정
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# 라우터 등록
app.include_router(qh_router)


@app.get("/")
async def root():
    """헬스 체크"""
    return {
        "service": "QH Gromov API",
        "version": __version__,
        "status": "running",
        "docs": "/docs"
    }


@app.get("/health")
async def health_check():
    """상세 헬스 체크 (설정과 영역 목록 로드)"""
    checks = {}
    try:
        EngineSettings()
        checks["settings"] = "loaded"
    except Exception as e:
        checks["settings"] = f"error: {e}"
    try:
        checks["domains"] = len(load_named_domains())
    except Exception as e:
        checks["domains"] = f"error: {e}"

    healthy = checks["settings"] == "loaded" and isinstance(checks["domains"], int)
    return {"status": "healthy" if healthy else "degraded", "checks": checks}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000, reload=True)
