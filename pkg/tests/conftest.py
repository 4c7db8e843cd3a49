import pytest

from rdds_score.road_model import RoadScenario, VehicleFootprint

_criteria = {}
_outcomes = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _criteria[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.when == "call" or report.failed:
        num, _ = _criteria[report.nodeid]
        ok = _outcomes.get(num, True)
        _outcomes[num] = ok and not report.failed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    titles = {num: title for num, title in _criteria.values()}
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        status = "PASS" if _outcomes[num] else "FAIL"
        terminalreporter.write_line(f"AC{num} {status}  {titles[num]}")


@pytest.fixture
def sedan():
    return VehicleFootprint.from_dimensions(
        track_width=1.8, wheelbase=2.7, body_width=2.0, front_overhang=0.9, rear_overhang=1.0
    )


@pytest.fixture(params=[("flat", "right"), ("flat", "left"), ("vertical", "right"), ("vertical", "left")],
                ids=lambda p: "-".join(p))
def any_scenario(request):
    kind, side = request.param
    return RoadScenario(kind, side, 0.0, f"{kind}_{side}")
