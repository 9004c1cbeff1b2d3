import pytest

_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.stash[_VERDICTS] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    details = "; ".join(v for k, v in item.user_properties if k == "detail")
    verdict = "PASS" if report.passed else "FAIL"
    line = f"criterion {number} {verdict}: {title}" + (f" ({details})" if details else "")
    item.config.stash[_VERDICTS].append((number, line))


def pytest_terminal_summary(terminalreporter, config):
    verdicts = config.stash.get(_VERDICTS, [])
    if verdicts:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(verdicts):
            terminalreporter.write_line(line)


@pytest.fixture
def detail(record_property):
    """Attach a measured value to the criterion's pass/fail line."""
    return lambda text: record_property("detail", text)
