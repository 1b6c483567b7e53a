import pytest

from confeig import ConformalMap, assemble_dtensor

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one PASS/FAIL line for the terminal summary."""

    def report(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ellipse02_tensor():
    return assemble_dtensor(ConformalMap.ellipse(0.2), 20, 20)


@pytest.fixture(scope="session")
def disk10_tensor():
    return assemble_dtensor(ConformalMap.disk(), 10, 10)
