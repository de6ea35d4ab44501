import pytest

from nonlocal_fronts.kernels import KernelSpec
from nonlocal_fronts.model import ModelParams

ACCEPTANCE_LINES: list[str] = []


def record(number: int, passed: bool, detail: str) -> str:
    line = f"ACCEPTANCE {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[-1])):
            terminalreporter.write_line(line)


@pytest.fixture
def tophat():
    return KernelSpec.tophat()


@pytest.fixture
def model16():
    return ModelParams(0.16, 0.2)
