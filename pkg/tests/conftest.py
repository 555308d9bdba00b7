from datetime import date, timedelta

import numpy as np
import pytest


def write_prices(path, dates, prices):
    lines = ["date,price"] + [f"{d.isoformat()},{p!r}" for d, p in zip(dates, prices)]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def synthetic_csv(tmp_path):
    """A 400-day geometric random-walk price file with a 3-day gap."""
    rng = np.random.default_rng(12345)
    n = 400
    start = date(2015, 1, 1)
    prices = 250.0 * np.exp(np.cumsum(rng.normal(0.002, 0.03, n)))
    dates = [start + timedelta(days=i) for i in range(n)]
    keep = [i for i in range(n) if i not in (5, 6, 7)]
    return write_prices(tmp_path / "prices.csv",
                        [dates[i] for i in keep], [float(prices[i]) for i in keep])


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    results = item.config._criteria
    if report.when == "call" or (report.when == "setup" and report.skipped):
        status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        previous = results.get(number, (title, "PASS", 0.0))
        # a criterion with several parametrized cases fails if any case fails
        rank = {"PASS": 0, "SKIP": 1, "FAIL": 2}
        worst = max(previous[1], status, key=rank.get)
        results[number] = (title, worst, previous[2] + report.duration)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criteria", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, status, seconds = results[number]
        terminalreporter.write_line(f"criterion {number}: {status:4s} {title} ({seconds:.1f} s)")
