import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rdds_score.errors import ConfigError, InvalidFootprint, InvalidVerticalPenetration
from rdds_score.event_extraction import TestRun
from rdds_score.road_model import (
    DepartureSide,
    EdgeKind,
    RoadScenario,
    VehicleFootprint,
    from_canonical,
    mirror_run,
    to_per_side,
    to_canonical,
)

finite = st.floats(-50, 50, allow_nan=False)


@pytest.mark.parametrize(
    "raw, kind, side, offset, expected",
    [
        (-0.5, "flat", "right", 0.0, -0.5),
        (0.5, "flat", "left", 0.0, -0.5),
        (0.3, "flat", "right", 0.1, 0.2),
    ],
)
def test_to_canonical_examples(raw, kind, side, offset, expected):
    assert to_canonical(raw, RoadScenario(kind, side, offset)) == pytest.approx(expected, abs=1e-15)


def test_vertical_penetration_rejected():
    sc = RoadScenario("vertical", "right", 0.0)
    assert to_canonical(0.0009, sc) == pytest.approx(0.0009)
    with pytest.raises(InvalidVerticalPenetration):
        to_canonical(0.002, sc)
    with pytest.raises(InvalidVerticalPenetration):
        to_canonical(-0.002, RoadScenario("vertical", "left", 0.0))


@given(offset=finite, side=st.sampled_from(["left", "right"]))
def test_edge_maps_to_zero(offset, side):
    assert to_canonical(offset, RoadScenario("flat", side, offset)) == 0.0


@given(a=finite, b=finite, offset=finite, side=st.sampled_from(["left", "right"]))
def test_canonical_is_isometric(a, b, offset, side):
    sc = RoadScenario("flat", side, offset)
    slope = 1.0 if side == "right" else -1.0
    ca, cb = to_canonical(a, sc), to_canonical(b, sc)
    assert abs(ca - cb) == pytest.approx(abs(a - b), abs=1e-12)
    if ca != cb:
        assert math.copysign(1.0, (ca - cb) / (a - b)) == slope


@given(c=finite, offset=finite, side=st.sampled_from(["left", "right"]))
def test_from_canonical_roundtrip(c, offset, side):
    sc = RoadScenario("flat", side, offset)
    assert to_canonical(from_canonical(c, sc), sc) == pytest.approx(c, abs=1e-12)


def test_per_side_signs():
    assert to_per_side(-0.3, DepartureSide.RIGHT) == -0.3
    assert to_per_side(-0.3, DepartureSide.LEFT) == 0.3
    assert math.copysign(1.0, to_per_side(0.0, DepartureSide.LEFT)) == 1.0


def test_rectangle_footprint_layout():
    fp = VehicleFootprint.from_dimensions(1.6, 2.8, 1.9, 0.9, 1.1, cg_to_front_axle=1.2)
    expected = ((-1.6, -0.8), (1.2, -0.8), (1.2, 0.8), (-1.6, 0.8))
    for got, want in zip(fp.tire_polygon, expected):
        assert got == pytest.approx(want, abs=1e-15)
    assert fp.body_polygon[0] == pytest.approx((-2.7, -0.95))
    assert fp.body_polygon[2] == pytest.approx((2.1, 0.95))


@pytest.mark.parametrize(
    "tire, body, msg",
    [
        ([(0, 0), (1, 0), (1, 1)], [(1, 1), (1, 0), (0, 0)], "counter-clockwise"),
        ([(0, 0), (1, 0), (2, 0)], [(0, 0), (1, 0), (2, 0)], "degenerate"),
        ([(0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)], [(0, 0), (2, 0), (2, 2), (0, 2)], "not convex"),
        ([(-1, -1), (1, -1), (1, 1), (-1, 1)], [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)], "inside"),
        ([(0, 0), (1, 0)], [(0, 0), (1, 0), (1, 1)], "at least 3"),
    ],
)
def test_invalid_footprints(tire, body, msg):
    with pytest.raises(InvalidFootprint, match=msg):
        VehicleFootprint(tire, body)


def test_pentagram_rejected():
    star = [(math.cos(a), math.sin(a)) for a in (math.radians(90 + 144 * k) for k in range(5))]
    with pytest.raises(InvalidFootprint):
        VehicleFootprint(star, star)


def test_dimension_validation():
    with pytest.raises(InvalidFootprint, match="body_width"):
        VehicleFootprint.from_dimensions(1.8, 2.7, 1.7, 0.9, 1.0)
    with pytest.raises(InvalidFootprint):
        VehicleFootprint.from_dimensions(1.8, -2.7, 2.0, 0.9, 1.0)


def test_scenario_validation():
    with pytest.raises(ValueError):
        RoadScenario("gravel", "right")
    with pytest.raises(ConfigError):
        RoadScenario("flat", "right", math.inf)
    with pytest.raises(ConfigError):
        RoadScenario("flat", "right", 0.0, weight=1.5)
    sc = RoadScenario("flat", "right", 0.7, "a")
    assert sc.edge_kind is EdgeKind.FLAT
    assert sc.mirrored() == RoadScenario("flat", "left", -0.7, "a")


def test_footprint_mirror_is_involution():
    tire = [(-1.3, -0.9), (1.4, -0.9), (1.4, 0.9), (-1.3, 0.9)]
    body = [(-2.3, -1.0), (2.3, -1.0), (2.3, 1.3), (0.0, 1.5), (-2.3, 1.3)]
    fp = VehicleFootprint(tire, body)
    assert fp.mirrored().mirrored() == fp
    assert fp.mirrored() != fp


def _run():
    return TestRun(
        t=[0.0, 0.1, 0.2],
        x=[0.0, 1.0, 2.0],
        y=[-2.0, -1.9, -1.7],
        yaw=[0.1, 0.1, 0.2],
        warning_active=[False, True, True],
        rka_active=[False, False, True],
        run_id="r",
        scenario_ref="s",
    )


def test_mirror_run_involution():
    run = _run()
    sc = RoadScenario("flat", "right", 0.3, "s")
    once, sc1 = mirror_run(run, sc)
    assert sc1.side is DepartureSide.LEFT
    assert list(once.y) == [2.0, 1.9, 1.7]
    twice, sc2 = mirror_run(once, sc1)
    assert twice == run and sc2 == sc
    assert twice.y.tobytes() == run.y.tobytes()


def test_mirror_sign_reversal_rule():
    # a right-departure position of +0.15 reads as -0.15 in the left convention
    sc = RoadScenario("flat", "right", 0.0, "s")
    _, left = mirror_run(_run(), sc)
    assert to_canonical(-0.15, left) == 0.15 == to_canonical(0.15, sc)


def test_plain_strings_accepted_for_enums(sedan):
    assert np.array_equal(sedan.polygon_for("flat"), sedan.polygon_for(EdgeKind.FLAT))
    assert np.array_equal(sedan.polygon_for("vertical"), sedan.polygon_for(EdgeKind.VERTICAL))
    assert to_per_side(0.3, "left") == -0.3
