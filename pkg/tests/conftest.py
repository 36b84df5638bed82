"""
공용 fixture

영역은 domains.yaml 의 등록된 이름으로 만들고, 엔진은 테스트마다 새로 만듭니다.
"""

import pytest

from qh_gromov.domain import load_domain
from qh_gromov.engine import QhEngine
from qh_gromov.settings import EngineSettings, HarnessSettings


@pytest.fixture
def half_plane():
    return load_domain("half_plane")


@pytest.fixture
def punctured_plane():
    return load_domain("punctured_plane")


@pytest.fixture
def unit_disk():
    return load_domain("unit_disk")


@pytest.fixture
def annulus():
    return load_domain("annulus")


@pytest.fixture
def square_hole():
    return load_domain("square_hole")


@pytest.fixture
def engine_settings():
    return EngineSettings()


@pytest.fixture
def harness_settings():
    return HarnessSettings()


@pytest.fixture
def half_engine(half_plane, engine_settings):
    return QhEngine(half_plane, engine_settings)


@pytest.fixture
def punctured_engine(punctured_plane, engine_settings):
    return QhEngine(punctured_plane, engine_settings)


@pytest.fixture
def disk_engine(unit_disk, engine_settings):
    return QhEngine(unit_disk, engine_settings)
