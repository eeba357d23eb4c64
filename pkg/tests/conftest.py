from __future__ import annotations

import pytest

_RESULTS: dict[int, tuple[str, bool, str]] = {}
_NAMES: dict[int, str] = {}


class AcceptanceRecorder:
    def declare(self, number: int, name: str) -> None:
        _NAMES[number] = name

    def record(self, number: int, name: str, passed: bool, detail: str = "") -> bool:
        _NAMES[number] = name
        # a criterion checked by several tests passes only if all of them do
        previous = _RESULTS.get(number)
        if previous is not None:
            passed = passed and previous[1]
            detail = f"{previous[2]}; {detail}" if detail else previous[2]
        _RESULTS[number] = (name, passed, detail)
        return passed


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _NAMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_NAMES):
        if number in _RESULTS:
            name, passed, detail = _RESULTS[number]
            status = "PASS" if passed else "FAIL"
        else:
            name, status, detail = _NAMES[number], "NOT RUN", ""
        line = f"[{status}] {number:2d}. {name}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
