import functools

import pytest

from cpilab.config import parse_config, shipped_config

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def shipped(name: str):
    return parse_config(shipped_config(name))


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
