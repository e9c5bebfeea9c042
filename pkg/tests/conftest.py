import pytest

from vlcsecrecy.cli import REF_ALICE, REF_BOB, REF_PD
from vlcsecrecy.scenario import channel_gain

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ref_h_b():
    return channel_gain(REF_ALICE, REF_BOB, REF_PD)


@pytest.fixture
def acceptance_log():
    """Callable ``log(label, ok, detail)``; lines are echoed and repeated in the summary."""

    def log(label: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
