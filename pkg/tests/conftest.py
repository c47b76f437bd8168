import math

import pytest
from hypothesis import HealthCheck, settings

from thzvsar.geometry import FrameGeometry, RadarParams

settings.register_profile(
    "thzvsar", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("thzvsar")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ref_radar():
    return RadarParams(220e9, 1.2e9, 13e6, 80e-6, 6000.0, c=3e8)


@pytest.fixture(scope="session")
def ref_geom(ref_radar):
    return FrameGeometry.circular(ref_radar, 2500.0, math.radians(45), 100.0, 0.0, 600)


def small_radar(n_fast=64):
    """reference waveform with bandwidth and sampling reduced to ``n_fast`` samples per pulse."""
    return RadarParams(220e9, 1.2e9 * n_fast / 1040, 13e6 * n_fast / 1040, 80e-6, 6000.0, c=3e8)


def small_geom(p, n_pulses=64, theta_k=0.0):
    return FrameGeometry.circular(p, 2500.0, math.radians(45), 100.0, theta_k, n_pulses)
