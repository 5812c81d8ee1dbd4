import pytest

_ROWS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ROWS] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, title, passed, detail)``."""
    rows = request.config.stash[_ROWS]

    def record(number, title, passed, detail=""):
        rows.append((number, title, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})")
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash[_ROWS]
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(rows, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}: {detail}")
    n_ok = sum(r[2] for r in rows)
    terminalreporter.write_line(f"{n_ok}/{len(rows)} acceptance criteria passed")
