import pytest

CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    def record(number: int, title: str, ok: bool, detail: str) -> None:
        CRITERIA[number] = ("PASS" if ok else "FAIL", f"{title}: {detail}")
        print(f"criterion {number} {CRITERIA[number][0]} {CRITERIA[number][1]}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        status, text = CRITERIA[number]
        terminalreporter.write_line(f"[{status}] {number}. {text}")
