"""Synthetic straight-line departure runs with scripted triggers.

The vehicle keeps a constant heading equal to the departure angle and moves
toward the edge at ``speed * sin(angle)``. An optional constant lateral
deceleration starts at the assist trigger and brings the lateral velocity down
to the mirror of its initial value, after which it is held. Positions are
closed-form, so trigger positions, crossing times and the peak excursion are
known exactly and written to a sidecar record rather than into the run.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from .errors import SpecInfeasible
from .event_extraction import TestRun
from .geometry_metrics import _sincos
from .road_model import DepartureSide, EdgeKind, RoadScenario, VehicleFootprint, from_canonical
from .scoring import Thresholds, _before, fail_line

MIN_INITIAL_DTRE = 0.5
MIN_SAMPLE_RATE = 10.0


@dataclass(frozen=True)
class ConstantLateralDecel:
    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0.0):
            raise SpecInfeasible(f"correction rate must be positive, got {self.rate!r}")


@dataclass(frozen=True)
class SynthSpec:
    speed: float
    departure_angle: float
    edge_kind: EdgeKind
    side: DepartureSide
    trigger_rdw_at: Optional[float] = None
    trigger_rka_at: Optional[float] = None
    correction: Optional[ConstantLateralDecel] = None
    sample_rate: float = 100.0
    duration: float = 10.0
    initial_dtre: float = MIN_INITIAL_DTRE
    run_id: str = "synth"

    def __post_init__(self):
        object.__setattr__(self, "edge_kind", EdgeKind(self.edge_kind))
        object.__setattr__(self, "side", DepartureSide(self.side))
        if not self.speed > 0.0:
            raise SpecInfeasible(f"speed must be positive, got {self.speed!r}")
        if not 0.0 < self.departure_angle < 0.5 * math.pi:
            raise SpecInfeasible(f"departure_angle must lie in (0, pi/2), got {self.departure_angle!r}")
        if not self.sample_rate >= MIN_SAMPLE_RATE:
            raise SpecInfeasible(f"sample_rate must be at least {MIN_SAMPLE_RATE} Hz")
        if not (math.isfinite(self.duration) and self.duration > 0.0):
            raise SpecInfeasible("duration must be positive")
        if not self.initial_dtre >= MIN_INITIAL_DTRE:
            raise SpecInfeasible(f"initial_dtre must be at least {MIN_INITIAL_DTRE} m")
        if self.correction is not None and self.trigger_rka_at is None:
            raise SpecInfeasible("a correction needs trigger_rka_at to start from")

    @property
    def lateral_speed(self) -> float:
        return self.speed * math.sin(self.departure_angle)

    def flipped(self) -> "SynthSpec":
        return replace(self, side=self.side.flipped())


@dataclass(frozen=True)
class GroundTruth:
    """Exact continuous-time quantities behind a synthetic run (canonical metres)."""

    run_id: str
    scenario_id: str
    lateral_speed: float
    initial_lateral: float
    trigger_rdw_at: Optional[float]
    trigger_rdw_time: Optional[float]
    trigger_rka_at: Optional[float]
    trigger_rka_time: Optional[float]
    edge_cross_time: Optional[float]
    d_max_lateral: float
    sample_interval: float
    expected: dict

    def to_dict(self) -> dict:
        return asdict(self)


class _Motion:
    """Piecewise closed-form lateral motion of the critical point."""

    def __init__(self, spec: SynthSpec):
        self.l0 = -spec.initial_dtre
        self.v = spec.lateral_speed
        self.a = spec.correction.rate if spec.correction else None
        self.trig = spec.trigger_rka_at if spec.correction else None
        self.t_k = None if self.trig is None else (self.trig - self.l0) / self.v

    def peak(self, horizon: float) -> float:
        if self.a is None:
            return self.position(horizon)
        if self.t_k >= horizon:
            return self.position(horizon)
        return self.position(min(horizon, self.t_k + self.v / self.a))

    def position(self, t):
        t = np.asarray(t, dtype=float)
        free = self.l0 + self.v * t
        if self.a is None:
            return free
        tau = t - self.t_k
        tau_r = 2.0 * self.v / self.a
        braking = self.trig + self.v * tau - 0.5 * self.a * tau * tau
        returning = self.trig - self.v * (tau - tau_r)
        return np.where(tau <= 0.0, free, np.where(tau <= tau_r, braking, returning))

    def first_reach(self, level: float) -> Optional[float]:
        """Earliest time the critical point reaches ``level`` (no horizon applied)."""
        if level <= self.l0:
            return 0.0
        if self.a is None or level <= self.trig:
            return (level - self.l0) / self.v
        disc = self.v * self.v - 2.0 * self.a * (level - self.trig)
        if disc < 0.0:
            return None
        return self.t_k + (self.v - math.sqrt(disc)) / self.a


def _outermost_offset(footprint: VehicleFootprint, scenario: RoadScenario, yaw: float) -> float:
    verts = footprint.polygon_for(scenario.edge_kind)
    s, c = _sincos(np.array([yaw]))
    off = verts[:, 0] * s[0] + verts[:, 1] * c[0]
    return float(np.max(scenario.side.sign * off))


def _reach_or_fail(motion: _Motion, level: float, horizon: float, what: str) -> float:
    t = motion.first_reach(level)
    if t is None or t > horizon:
        raise SpecInfeasible(f"{what} at {level!r} m is never reached within the run")
    return t


def expected_scores(truth_rdw, truth_rka, d_max, edge_kind: EdgeKind, thresholds: Thresholds = Thresholds()) -> dict:
    """Closed-form pass/fail prediction from continuous trigger positions."""
    out = {}
    for strict in (False, True):
        s_w = 0.0
        s_s = 0.0
        rdw_line = fail_line(edge_kind, thresholds.dtre_rdw)
        rka_line = fail_line(edge_kind, thresholds.dtre_rka)
        if truth_rdw is not None and _before(truth_rdw, rdw_line, thresholds):
            if not strict or _before(d_max, rdw_line, thresholds):
                s_w = thresholds.max_points_rdw
        if truth_rka is not None and _before(truth_rka, rka_line, thresholds):
            if not strict or _before(d_max, rka_line, thresholds):
                s_s = thresholds.max_points_rka
        key = "strict" if strict else "default"
        out[key] = {"s_w": s_w, "s_s": s_s, "total": s_w + s_s}
    return out


def synthesize_with_truth(spec: SynthSpec, footprint: VehicleFootprint, scenario: RoadScenario) -> tuple[TestRun, GroundTruth]:
    if (spec.edge_kind, spec.side) != (scenario.edge_kind, scenario.side):
        raise SpecInfeasible(
            f"spec is {spec.edge_kind.value}/{spec.side.value} but scenario "
            f"{scenario.scenario_id!r} is {scenario.edge_kind.value}/{scenario.side.value}"
        )
    motion = _Motion(spec)
    vertical = spec.edge_kind is EdgeKind.VERTICAL
    horizon = spec.duration
    contact = motion.first_reach(0.0) if vertical else None
    if contact is not None and contact <= horizon:
        horizon = contact

    t_rdw = t_rka = None
    for name, level in (("trigger_rdw_at", spec.trigger_rdw_at), ("trigger_rka_at", spec.trigger_rka_at)):
        if level is None:
            continue
        if level <= motion.l0:
            raise SpecInfeasible(f"{name} {level!r} m lies behind the start position {motion.l0!r} m")
        if vertical and level >= 0.0:
            raise SpecInfeasible(f"{name} {level!r} m is at or past a vertical edge")
        t = _reach_or_fail(motion, level, horizon, name)
        if name == "trigger_rdw_at":
            t_rdw = t
        else:
            t_rka = t

    dt = 1.0 / spec.sample_rate
    n = int(math.floor(horizon * spec.sample_rate + 1e-9))
    times = np.arange(n + 1, dtype=float) * dt
    if contact is not None and contact <= spec.duration:
        times = times[times < contact - 1e-12]
        times = np.append(times, contact)
    lateral = motion.position(times)
    if contact is not None and contact <= spec.duration:
        lateral[-1] = 0.0

    yaw = spec.departure_angle * spec.side.sign
    centre = lateral - _outermost_offset(footprint, scenario, yaw)
    ys = from_canonical(centre, scenario)
    xs = spec.speed * math.cos(spec.departure_angle) * times

    def latch(level):
        if level is None:
            return np.zeros(times.size, dtype=bool)
        return np.maximum.accumulate(lateral >= level)

    run = TestRun(
        t=times,
        x=xs,
        y=ys,
        yaw=np.full(times.size, yaw),
        warning_active=latch(spec.trigger_rdw_at),
        rka_active=latch(spec.trigger_rka_at),
        run_id=spec.run_id,
        scenario_ref=scenario.scenario_id,
        speed=spec.speed,
        departure_angle=spec.departure_angle,
    )

    cross = motion.first_reach(0.0)
    if cross is not None and cross > horizon:
        cross = None
    d_max = 0.0 if contact is not None and contact <= spec.duration else float(motion.peak(horizon))
    truth = GroundTruth(
        run_id=spec.run_id,
        scenario_id=scenario.scenario_id,
        lateral_speed=motion.v,
        initial_lateral=motion.l0,
        trigger_rdw_at=spec.trigger_rdw_at,
        trigger_rdw_time=t_rdw,
        trigger_rka_at=spec.trigger_rka_at,
        trigger_rka_time=t_rka,
        edge_cross_time=cross,
        d_max_lateral=d_max,
        sample_interval=dt,
        expected=expected_scores(spec.trigger_rdw_at, spec.trigger_rka_at, d_max, spec.edge_kind),
    )
    return run, truth


def synthesize(spec: SynthSpec, footprint: VehicleFootprint, scenario: RoadScenario) -> TestRun:
    return synthesize_with_truth(spec, footprint, scenario)[0]
