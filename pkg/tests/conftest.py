import numpy as np
import pytest

from periodrecon import make_chirp_like, sine

ACCEPTANCE_LINES: list[str] = []

# Acceptance setup: tau = 0.39 T, d = 3, sigma = 0.5% of the 4 V peak-to-peak,
# R = 5 sigma.
TAU_RATIO = 0.39
SIGMA = 0.02
RADIUS = 5 * SIGMA


@pytest.fixture(scope="session")
def chirp():
    return make_chirp_like(1.0)


@pytest.fixture(scope="session")
def unit_sine():
    return sine(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20210606)


def record_acceptance(number: int, title: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number:2d}: {title} -- {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
