import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bvsquares.sieve import build_prime_table  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table_small():
    return build_prime_table(10**5)


@pytest.fixture(scope="session")
def table_1e6():
    return build_prime_table(10**6)


@pytest.fixture(scope="session")
def table_1e7():
    return build_prime_table(10**7)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
