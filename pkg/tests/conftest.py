import pytest

_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Collects one ``(criterion, passed, detail)`` line per acceptance check."""
    lines = request.config.stash[_KEY]

    def record(criterion: str, passed: bool, detail: str) -> bool:
        lines.append((criterion, bool(passed), detail))
        print(f"{criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(lines, key=lambda r: int(r[0].split("-")[1])):
        terminalreporter.write_line(f"{criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
