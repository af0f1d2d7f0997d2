from __future__ import annotations

import pytest

from qnnsim.data import DataError

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.fixture(scope="session")
def benchmark_csvs(tmp_path_factory):
    """Paths of the three prepared benchmark CSVs, built once per session."""
    from qnnsim.datasets import prepare_all

    try:
        return prepare_all(tmp_path_factory.mktemp("benchmarks"))
    except (DataError, ImportError, OSError) as exc:
        pytest.skip(f"benchmark sources unavailable: {exc}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, {"title": title, "status": "PASS", "notes": []})
    if rep.skipped and rep.when in ("setup", "call") and entry["status"] == "PASS":
        entry["status"] = "SKIP"
    elif rep.failed:
        entry["status"] = "FAIL"
        entry["notes"].append(item.name)
    if rep.when == "call":
        for key, value in rep.user_properties:
            if key == "detail":
                entry["notes"].append(value)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        extra = f"  [{'; '.join(e['notes'])}]" if e["notes"] else ""
        terminalreporter.write_line(f"criterion {n}: {e['status']}  {e['title']}{extra}")
