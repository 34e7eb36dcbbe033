import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one pass/fail line for an acceptance criterion."""

    def _record(number: int, ok: bool, detail: str):
        ACCEPTANCE[number] = (ok, detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
