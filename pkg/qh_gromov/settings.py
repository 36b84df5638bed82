"""
설정 로드

defaults.yaml을 기본값으로, QH_ 접두사 환경 변수를 그 위에 적용합니다.
"""

from functools import lru_cache
from pathlib import Path
from typing import Any, ClassVar

import yaml
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)


CONFIG_DIR = Path(__file__).parent / "config"
DEFAULTS_PATH = CONFIG_DIR / "defaults.yaml"
DOMAINS_PATH = CONFIG_DIR / "domains.yaml"


@lru_cache(maxsize=None)
def load_defaults() -> dict:
    """defaults.yaml 로드"""
    with open(DEFAULTS_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


@lru_cache(maxsize=None)
def load_named_domains() -> dict:
    """domains.yaml의 예제 영역 목록 로드"""
    with open(DOMAINS_PATH, "r", encoding="utf-8") as f:
        config = yaml.safe_load(f) or {}
    return config.get("domains", {})


class _YamlSectionSource(PydanticBaseSettingsSource):
    """defaults.yaml의 한 섹션을 설정 소스로 제공"""

    def __init__(self, settings_cls: type[BaseSettings], section: str):
        super().__init__(settings_cls)
        self.section = section

    def get_field_value(self, field: Any, field_name: str) -> tuple[Any, str, bool]:
        section = load_defaults().get(self.section, {})
        return section.get(field_name), field_name, False

    def __call__(self) -> dict[str, Any]:
        section = load_defaults().get(self.section, {}) or {}
        return {k: v for k, v in section.items() if k in self.settings_cls.model_fields}


class _SectionSettings(BaseSettings):
    """섹션 기반 설정 공통 클래스"""

    yaml_section: ClassVar[str] = ""

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        section = cls.yaml_section
        return (
            init_settings,
            env_settings,
            _YamlSectionSource(settings_cls, section),
        )


class EngineSettings(_SectionSettings):
    """준쌍곡 거리 엔진 설정"""

    model_config = SettingsConfigDict(env_prefix="QH_", frozen=True)
    yaml_section: ClassVar[str] = "engine"

    tol: float = 1e-2
    max_halvings: int = 6
    resolution_divisor: float = 12.0
    region_margin: float = 1.0
    boundary_cutoff_ratio: float = 0.125
    quad_rel_tol: float = 1e-10
    quad_max_intervals: int = 2 ** 20
    snap_tol: float = 1e-9
    prune_factor: float = 1.1
    prune_offset: float = 0.5
    max_nodes: int = 400_000
    refine_rounds: int = 3
    refine_sweeps: int = 30
    refine_segment_ratio: float = 0.125
    max_path_vertices: int = 4000
    working_radius: float = 100.0


class HarnessSettings(_SectionSettings):
    """수열 구성 실행 설정"""

    model_config = SettingsConfigDict(env_prefix="QH_", frozen=True)
    yaml_section: ClassVar[str] = "harness"

    h: float = 0.1
    seed: int = 0
    samples: int = 32
    max_samples: int = 256
    sup_change_tol: float = 1e-3
    aux_samples: int = 8
    delta_exhaustive_max: int = 60
    delta_sampled_quadruples: int = 200_000
    equivalence_margin: float = 10.0
