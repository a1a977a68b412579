import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from roughgran.table import load_table  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


def read_table(name, decision="d"):
    with open(DATA / name, encoding="utf-8") as fh:
        return load_table(fh, decision=decision)


@pytest.fixture
def eight():
    return read_table("eight.csv")


@pytest.fixture
def nine():
    return read_table("nine.csv")


@pytest.fixture
def six():
    return read_table("six.csv")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
