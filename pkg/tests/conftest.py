from pathlib import Path

import pytest

from jrcc import presets

DATA = Path(__file__).resolve().parents[1] / "src" / "jrcc" / "data"


@pytest.fixture
def thick():
    return presets.thick_band()


@pytest.fixture
def thin():
    return presets.thin_band()


@pytest.fixture
def data_dir():
    return DATA


# Acceptance tests carry @pytest.mark.criterion(n); a one-line verdict per criterion
# is printed at the end of the run.

_VERDICTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config.stash[_VERDICTS] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    verdicts = item.config.stash[_VERDICTS].setdefault(marker.args[0], [])
    if report.failed:
        msg = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else "error"
        verdicts.append((item.name, False, msg.splitlines()[0]))
    elif report.when == "call":
        verdicts.append((item.name, True, ""))


def pytest_terminal_summary(terminalreporter, config):
    verdicts = config.stash.get(_VERDICTS, {})
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(verdicts):
        checks = verdicts[n]
        failed = [f"{name}: {msg}" for name, ok, msg in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n:>2}: {status} ({len(checks) - len(failed)}/{len(checks)} checks)"
        if failed:
            line += ": " + "; ".join(failed)
        terminalreporter.write_line(line)
