import pytest

from _oracles import SAMPLE_CENTER, SAMPLE_N, SAMPLE_PAIRS
from starembed.core import RequestSequence


@pytest.fixture
def sample():
    return RequestSequence.of(SAMPLE_N, SAMPLE_CENTER, SAMPLE_PAIRS)


# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split("(")[0].split("-")[0]), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
