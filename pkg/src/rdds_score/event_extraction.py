"""Test-run containers and extraction of warning/assist trigger positions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import (
    InvariantError,
    MonotonicityViolation,
    SampleGapViolation,
    ScenarioMismatch,
    StartsOffRoad,
)
from .geometry_metrics import Pose, normalize_yaw_array, outermost_lateral_series
from .road_model import RoadScenario, VehicleFootprint

# 10 Hz minimum logging rate; slack absorbs decimal timestamps like 0.1 * k.
MAX_SAMPLE_GAP = 0.1
_GAP_SLACK = 1e-9


@dataclass(frozen=True)
class TrajectorySample:
    pose: Pose
    warning_active: bool
    rka_active: bool


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TestRun:
    """One recorded or synthesised test run, stored column-wise.

    Columns are read-only numpy arrays; ``samples`` rebuilds per-sample objects
    on demand.
    """

    __test__ = False  # not a pytest class

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    yaw: np.ndarray
    warning_active: np.ndarray
    rka_active: np.ndarray
    run_id: str = "run"
    scenario_ref: str = "scenario"
    speed: Optional[float] = None
    departure_angle: Optional[float] = None

    def __post_init__(self):
        cols = {name: _frozen(getattr(self, name), float) for name in ("t", "x", "y")}
        cols["yaw"] = _frozen(normalize_yaw_array(np.asarray(self.yaw, dtype=float).reshape(-1)), float)
        cols["warning_active"] = _frozen(self.warning_active, bool)
        cols["rka_active"] = _frozen(self.rka_active, bool)
        n = cols["t"].size
        for name, arr in cols.items():
            if arr.size != n:
                raise InvariantError(f"column {name!r} has {arr.size} values, expected {n}")
            object.__setattr__(self, name, arr)
        if n < 2:
            raise InvariantError(f"run {self.run_id!r}: need at least 2 samples, got {n}")
        for name in ("t", "x", "y", "yaw"):
            bad = np.flatnonzero(~np.isfinite(cols[name]))
            if bad.size:
                raise InvariantError(f"run {self.run_id!r}: non-finite {name} at sample {bad[0] + 1}")
        if self.t[0] < 0.0:
            raise InvariantError(f"run {self.run_id!r}: negative start time {self.t[0]!r}")
        dt = np.diff(self.t)
        bad = np.flatnonzero(dt <= 0.0)
        if bad.size:
            row = int(bad[0]) + 2
            raise MonotonicityViolation(
                f"run {self.run_id!r}: timestamp at sample {row} does not increase", row=row
            )
        bad = np.flatnonzero(dt > MAX_SAMPLE_GAP + _GAP_SLACK)
        if bad.size:
            i = int(bad[0])
            raise SampleGapViolation(
                f"run {self.run_id!r}: {dt[i]:.4f} s gap after sample {i + 1} exceeds {MAX_SAMPLE_GAP} s"
            )

    @classmethod
    def from_samples(cls, samples: Iterable[TrajectorySample], **meta) -> "TestRun":
        samples = list(samples)
        return cls(
            t=[s.pose.t for s in samples],
            x=[s.pose.x for s in samples],
            y=[s.pose.y for s in samples],
            yaw=[s.pose.yaw for s in samples],
            warning_active=[s.warning_active for s in samples],
            rka_active=[s.rka_active for s in samples],
            **meta,
        )

    @property
    def samples(self) -> tuple[TrajectorySample, ...]:
        return tuple(
            TrajectorySample(Pose(t, x, y, yaw), bool(w), bool(r))
            for t, x, y, yaw, w, r in zip(
                self.t.tolist(), self.x.tolist(), self.y.tolist(), self.yaw.tolist(),
                self.warning_active.tolist(), self.rka_active.tolist(),
            )
        )

    def __len__(self) -> int:
        return int(self.t.size)

    def __eq__(self, other):
        if not isinstance(other, TestRun):
            return NotImplemented
        return (
            (self.run_id, self.scenario_ref, self.speed, self.departure_angle)
            == (other.run_id, other.scenario_ref, other.speed, other.departure_angle)
            and all(
                np.array_equal(getattr(self, c), getattr(other, c))
                for c in ("t", "x", "y", "yaw", "warning_active", "rka_active")
            )
        )

    __hash__ = None


@dataclass(frozen=True)
class TriggerReport:
    """Scoring inputs for one run, canonical metres (edge at 0, departure positive).

    ``None`` marks an absent trigger or an edge that was never reached.
    """

    run_id: str
    scenario_id: str
    d_rdw: Optional[float]
    d_rka: Optional[float]
    d_max_lateral: float
    edge_cross_time: Optional[float]
    t_rdw: Optional[float] = None
    t_rka: Optional[float] = None


def lateral_profile(run: TestRun, footprint: VehicleFootprint, scenario: RoadScenario) -> np.ndarray:
    """Canonical outermost lateral position at every sample."""
    return outermost_lateral_series(run.y, run.yaw, footprint, scenario)


def _onset(channel: np.ndarray) -> Optional[int]:
    if not channel.any():
        return None
    return int(np.argmax(channel))


def _first_crossing(t: np.ndarray, lateral: np.ndarray) -> Optional[float]:
    hits = np.flatnonzero(lateral >= 0.0)
    if not hits.size:
        return None
    k = int(hits[0])
    if k == 0:
        return float(t[0])
    l0, l1 = float(lateral[k - 1]), float(lateral[k])
    t0, t1 = float(t[k - 1]), float(t[k])
    return t0 + (t1 - t0) * (-l0) / (l1 - l0)


def extract(run: TestRun, footprint: VehicleFootprint, scenario: RoadScenario) -> TriggerReport:
    """Read d_RDW, d_RKA, the maximum excursion and the edge-crossing time off a run.

    A trigger is placed at the first sample whose channel is true, using that
    sample's pose; later pulses are ignored.
    """
    if run.scenario_ref != scenario.scenario_id:
        raise ScenarioMismatch(
            f"run {run.run_id!r} references scenario {run.scenario_ref!r}, "
            f"evaluated against {scenario.scenario_id!r}"
        )
    lateral = lateral_profile(run, footprint, scenario)
    if lateral[0] >= 0.0:
        raise StartsOffRoad(
            f"run {run.run_id!r}: first sample is {lateral[0]:.4f} m from the edge; "
            "the vehicle must start on the road"
        )
    i_w = _onset(run.warning_active)
    i_s = _onset(run.rka_active)
    return TriggerReport(
        run_id=run.run_id,
        scenario_id=scenario.scenario_id,
        d_rdw=None if i_w is None else float(lateral[i_w]),
        d_rka=None if i_s is None else float(lateral[i_s]),
        d_max_lateral=float(lateral.max()),
        edge_cross_time=_first_crossing(run.t, lateral),
        t_rdw=None if i_w is None else float(run.t[i_w]),
        t_rka=None if i_s is None else float(run.t[i_s]),
    )
