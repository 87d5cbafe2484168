import pytest

from wordmachines import builtin

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(number: int, title: str, passed: bool, tolerance: str, detail: str = "") -> None:
        mark = "PASS" if passed else "FAIL"
        line = f"{mark} criterion {number:>2}: {title} [tolerance: {tolerance}]"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(params=["T0", "T1", "T2"])
def tape_machine(request):
    return builtin(request.param)
