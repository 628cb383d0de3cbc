from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from quatspec.quat_core import Axis, Quaternion

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
quaternions = st.builds(Quaternion, finite, finite, finite, finite)


@st.composite
def axes(draw) -> Axis:
    v = draw(st.tuples(finite, finite, finite).filter(lambda t: sum(c * c for c in t) > 1e-3))
    return Axis(*v)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_axis(rng: np.random.Generator) -> Axis:
    return Axis(*rng.standard_normal(3))


# -- acceptance summary --------------------------------------------------------

_CRITERIA: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "ran": False, "notes": []})
    if report.when == "call" or report.failed:
        entry["ran"] = entry["ran"] or report.when == "call"
        entry["passed"] = entry["passed"] and report.passed
    if report.when == "call":
        entry["notes"].extend(f"{k}={v}" for k, v in item.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["passed"] and entry["ran"] else "FAIL"
        notes = ", ".join(entry["notes"])
        terminalreporter.write_line(f"{status}  criterion {number:>2}: {entry['title']}  [{notes}]")
