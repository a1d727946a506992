import pytest

from sbpquad.operators import OperatorFamily

DIAGONAL = [OperatorFamily.DIAG12, OperatorFamily.DIAG24, OperatorFamily.DIAG36]
ALL_FAMILIES = DIAGONAL + [OperatorFamily.FULL34]


@pytest.fixture(params=DIAGONAL, ids=lambda f: f.label)
def diag_family(request):
    return request.param


@pytest.fixture(params=ALL_FAMILIES, ids=lambda f: f.label)
def any_family(request):
    return request.param


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
