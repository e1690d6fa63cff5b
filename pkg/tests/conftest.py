import json
from pathlib import Path

import pytest

from edgewave import acceptance

ORACLES = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


@pytest.fixture(scope="session")
def hm():
    return acceptance.hm_profile()


@pytest.fixture(scope="session")
def pi2():
    return acceptance.pi2_profile()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
