import pytest

from nltachyon.diagnostics import energy_and_pressure
from nltachyon.grid import Grid
from nltachyon.model import ModelParams
from nltachyon.solver import solve_kink

KINK_C2 = 13 / 6
DIVERGENT_C2 = 4 / 3

# Acceptance outcomes, filled in by tests/test_acceptance.py.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def default_grid():
    return Grid.from_range(-50.0, 50.0, 0.05)


@pytest.fixture(scope="session")
def kink(default_grid):
    sol, report = solve_kink(ModelParams(KINK_C2), default_grid)
    return sol, report


@pytest.fixture(scope="session")
def kink_diagnostics(kink):
    return energy_and_pressure(kink[0])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
