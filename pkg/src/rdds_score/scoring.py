"""Pass/fail scoring of warning and assist triggers, and score aggregation.

Working in the canonical frame, every (edge kind, side) case reduces to one
rule: a trigger passes when it happens before the vehicle's critical point
reaches the fail line. Fail lines sit past the edge for flat edges and short
of it for vertical edges.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (
    ConfigError,
    EmptyRunSet,
    LengthMismatch,
    ScenarioMismatch,
    WeightSumViolation,
)
from .event_extraction import TriggerReport
from .road_model import EdgeKind, RoadScenario

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Thresholds:
    dtre_rdw: float = 0.2
    dtre_rka: float = 0.1
    max_points_rdw: float = 0.25
    max_points_rka: float = 0.25
    # equality with a fail line fails unless this is set
    boundary_passes: bool = False

    def __post_init__(self):
        for name in ("dtre_rdw", "dtre_rka", "max_points_rdw", "max_points_rka"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0.0):
                raise ConfigError(f"thresholds.{name} must be positive, got {val!r}")
        if not self.dtre_rka < self.dtre_rdw:
            raise ConfigError("thresholds.dtre_rka must be smaller than thresholds.dtre_rdw")

    @property
    def full_score(self) -> float:
        return self.max_points_rdw + self.max_points_rka


@dataclass(frozen=True)
class Weights:
    w_warning: float = 1.0
    w_steering: float = 1.0

    def __post_init__(self):
        for name in ("w_warning", "w_steering"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val >= 0.0):
                raise ConfigError(f"weights.{name} must be non-negative, got {val!r}")


class RunFlag(str, enum.Enum):
    NO_WARNING = "NoWarning"
    NO_STEERING = "NoSteering"
    NO_DEPARTURE = "NoDeparture"
    STRICT_EXCURSION_FAIL = "StrictExcursionFail"


@dataclass(frozen=True)
class RunScore:
    run_id: str
    scenario_id: str
    s_w: float
    s_s: float
    total: float
    flags: frozenset = field(default_factory=frozenset)
    presence_case: int = 4


@dataclass(frozen=True)
class ScenarioScore:
    scenario_id: str
    mean: float
    run_count: int
    per_run: tuple


@dataclass(frozen=True)
class ComprehensiveScore:
    value: float
    scenario_weights: tuple


def fail_line(edge_kind: EdgeKind, distance: float) -> float:
    """Canonical lateral coordinate of a fail line ``distance`` metres from the edge."""
    return distance if edge_kind is EdgeKind.FLAT else -distance


def _before(position: float, line: float, thresholds: Thresholds) -> bool:
    return position < line or (thresholds.boundary_passes and position == line)


def _check_scenario(report: TriggerReport, scenario: RoadScenario) -> None:
    if report.scenario_id != scenario.scenario_id:
        raise ScenarioMismatch(
            f"report for scenario {report.scenario_id!r} scored against {scenario.scenario_id!r}"
        )


def _criterion(position: Optional[float], line: float, points: float, thresholds: Thresholds) -> float:
    if position is None or not _before(position, line, thresholds):
        return 0.0
    return points


def score_rdw(report: TriggerReport, scenario: RoadScenario, thresholds: Thresholds = Thresholds()) -> float:
    _check_scenario(report, scenario)
    line = fail_line(scenario.edge_kind, thresholds.dtre_rdw)
    return _criterion(report.d_rdw, line, thresholds.max_points_rdw, thresholds)


def score_rka(report: TriggerReport, scenario: RoadScenario, thresholds: Thresholds = Thresholds()) -> float:
    _check_scenario(report, scenario)
    line = fail_line(scenario.edge_kind, thresholds.dtre_rka)
    return _criterion(report.d_rka, line, thresholds.max_points_rka, thresholds)


def presence_case(report: TriggerReport) -> int:
    """1: warning+steering, 2: steering only, 3: warning only, 4: neither."""
    warned = report.d_rdw is not None
    steered = report.d_rka is not None
    if warned and steered:
        return 1
    if steered:
        return 2
    if warned:
        return 3
    return 4


def score_run(
    report: TriggerReport,
    scenario: RoadScenario,
    thresholds: Thresholds = Thresholds(),
    weights: Weights = Weights(),
    strict: bool = False,
) -> RunScore:
    """Weighted warning + steering score for one run.

    With ``strict`` a sub-score is only kept if the run's maximum excursion
    also stays short of that criterion's fail line.
    """
    s_w = score_rdw(report, scenario, thresholds)
    s_s = score_rka(report, scenario, thresholds)
    flags = set()
    if report.d_rdw is None:
        flags.add(RunFlag.NO_WARNING)
    if report.d_rka is None:
        flags.add(RunFlag.NO_STEERING)
    if scenario.edge_kind is EdgeKind.FLAT and report.d_max_lateral < 0.0:
        flags.add(RunFlag.NO_DEPARTURE)
    if strict:
        if s_w and not _before(report.d_max_lateral, fail_line(scenario.edge_kind, thresholds.dtre_rdw), thresholds):
            s_w = 0.0
            flags.add(RunFlag.STRICT_EXCURSION_FAIL)
        if s_s and not _before(report.d_max_lateral, fail_line(scenario.edge_kind, thresholds.dtre_rka), thresholds):
            s_s = 0.0
            flags.add(RunFlag.STRICT_EXCURSION_FAIL)
    return RunScore(
        run_id=report.run_id,
        scenario_id=scenario.scenario_id,
        s_w=s_w,
        s_s=s_s,
        total=weights.w_warning * s_w + weights.w_steering * s_s,
        flags=frozenset(flags),
        presence_case=presence_case(report),
    )


def score_scenario(runs: Sequence[RunScore], scenario_id: str) -> ScenarioScore:
    """Mean run total for one scenario (exactly rounded sum, so order-independent)."""
    runs = tuple(runs)
    if not runs:
        raise EmptyRunSet(f"scenario {scenario_id!r} has no runs")
    for r in runs:
        if r.scenario_id != scenario_id:
            raise ScenarioMismatch(f"run {r.run_id!r} belongs to {r.scenario_id!r}, not {scenario_id!r}")
    mean = math.fsum(r.total for r in runs) / len(runs)
    return ScenarioScore(scenario_id=scenario_id, mean=mean, run_count=len(runs), per_run=runs)


def equal_weights(n: int) -> list[float]:
    if n <= 0:
        raise EmptyRunSet("no scenarios to aggregate")
    return [1.0 / n] * n


def score_comprehensive(scenarios: Sequence[ScenarioScore], weights: Optional[Sequence[float]] = None) -> ComprehensiveScore:
    """Weighted sum of scenario means. Weights must already sum to 1; nothing is renormalised."""
    scenarios = tuple(scenarios)
    if weights is None:
        weights = equal_weights(len(scenarios))
    weights = [float(w) for w in weights]
    if len(weights) != len(scenarios):
        raise LengthMismatch(f"{len(weights)} weights for {len(scenarios)} scenarios")
    for sc, w in zip(scenarios, weights):
        if not (math.isfinite(w) and w >= 0.0):
            raise WeightSumViolation(f"scenario {sc.scenario_id!r}: weight must be non-negative, got {w!r}")
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise WeightSumViolation(f"scenario weights sum to {total!r}, expected 1")
    value = math.fsum(w * sc.mean for sc, w in zip(scenarios, weights))
    return ComprehensiveScore(
        value=value,
        scenario_weights=tuple((sc.scenario_id, w) for sc, w in zip(scenarios, weights)),
    )
