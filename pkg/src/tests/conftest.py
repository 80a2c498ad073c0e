"""Shared fixtures and hypothesis profiles."""

import os

import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from src.services import galois
from src.services.quadarith import ImagQuadField, parse_ideal

hypothesis_settings.register_profile("default", max_examples=50, deadline=None)
hypothesis_settings.register_profile(
    "ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

PREC = 192


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-size numerical runs")


@pytest.fixture
def prec() -> int:
    return PREC


@pytest.fixture
def qi() -> ImagQuadField:
    return ImagQuadField(1)


@pytest.fixture
def q3() -> ImagQuadField:
    return ImagQuadField(3)


@pytest.fixture
def f8(qi):
    """The modulus (1+i)^3 of Q(i)."""
    return parse_ideal(qi, "(1+i)^3")


@pytest.fixture
def zeta5() -> galois.CMSetting:
    return galois.setting_zeta5()


@pytest.fixture(params=["C2", "C4", "C2xC2", "S3"])
def any_setting(request) -> galois.CMSetting:
    return galois.BUILTIN_SETTINGS[request.param]()
