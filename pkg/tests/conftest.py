import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

from limodel.stieltjes import eta_from_powerseries  # noqa: E402
from limodel.zeros import load_or_compute  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("zero-cache")


@pytest.fixture(scope="session")
def zeros2000(cache_dir):
    return load_or_compute(2000.0, cache_dir)


@pytest.fixture(scope="session")
def zeros1000(zeros2000):
    return zeros2000.truncated(1000.0)


@pytest.fixture(scope="session")
def zeros100(zeros2000):
    return zeros2000.truncated(100.0)


@pytest.fixture(scope="session")
def eta20():
    return eta_from_powerseries(20)


@pytest.fixture
def record_acceptance():
    def record(number: int, ok: bool, detail: str):
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
