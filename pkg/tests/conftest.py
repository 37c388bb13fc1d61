import random
from pathlib import Path

import pytest

from fairdiv import fixtures as fx

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def sec_profile():
    return fx.completion_example()


@pytest.fixture
def contested():
    return fx.single_item_contested()


@pytest.fixture
def one_wanter():
    return fx.single_item_one_wanter()


@pytest.fixture
def rng():
    return random.Random(12345)


# criterion lines recorded by test_acceptance, echoed after the run even when output is captured
CRITERIA = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
