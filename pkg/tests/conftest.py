import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pauli_annulus import AnnulusGeometry, RadialField, solve_scalar_potential  # noqa: E402


@pytest.fixture(scope="session")
def geom0():
    return AnnulusGeometry(1.0, 2.0)


@pytest.fixture(scope="session")
def unit_field():
    return RadialField.constant(1.0)


@pytest.fixture(scope="session")
def pot0(geom0, unit_field):
    return solve_scalar_potential(geom0, unit_field, 4096)


@pytest.fixture(scope="session")
def pot0_small(geom0, unit_field):
    return solve_scalar_potential(geom0, unit_field, 512)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line(results[key])
