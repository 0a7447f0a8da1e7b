import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from neelgen import build_lattice, build_psi_m  # noqa: E402

# Filled by tests/test_acceptance.py; printed at the end of every run.
ACCEPTANCE_REPORT: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_REPORT:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_REPORT:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def chain():
    cache = {}

    def get(N):
        if N not in cache:
            cache[N] = build_lattice("chain", [N])
        return cache[N]

    return get


@pytest.fixture(scope="session")
def psi_family(chain):
    cache = {}

    def get(N):
        if N not in cache:
            cache[N] = [build_psi_m(chain(N), M) for M in range(N + 1)]
        return cache[N]

    return get
