import pytest

_CRITERIA: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    """``criterion(n, passed, detail)`` records and prints one result line."""

    def record(n: int, passed: bool, detail: str = "") -> bool:
        _CRITERIA.setdefault(n, []).append((bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} criterion {n}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        results = _CRITERIA[n]
        ok = all(passed for passed, _ in results)
        details = "; ".join(d for _, d in results if d)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {details}")
