import functools

import pytest

from qslcv.spectral import SpectralParams
from qslcv.dynamics import solve_amplitude

ALPHA = 10.0
HORIZON = 400.0


@functools.lru_cache(maxsize=None)
def long_run(eta: float, s: float = 1.0, omega_c: float = 10.0, tau: float = HORIZON, h="auto"):
    """Solver output reused across test modules (trajectories are immutable)."""
    return solve_amplitude(SpectralParams(eta, s, omega_c), tau, h)


@pytest.fixture(scope="session")
def run():
    return long_run


_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store the outcome of an acceptance criterion; returns ``ok`` for chaining."""

    def _record(number: int, ok: bool, detail: str) -> bool:
        _CRITERIA[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
