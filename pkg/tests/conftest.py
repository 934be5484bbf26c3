import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    log = request.config.stash[ACCEPTANCE]

    def emit(num: int, title: str, passed: bool, detail: str = "") -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  [{num:>2}] {title}" + (f"  ({detail})" if detail else "")
        log.append((num, line))
        print(line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE, [])
    if log:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(log):
            terminalreporter.write_line(line)
