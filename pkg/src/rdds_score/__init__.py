"""Scoring of road departure warning and road keeping assist test runs."""

__version__ = "0.1.0"

from .errors import RddsError  # noqa: E402
from .event_extraction import TestRun, TrajectorySample, TriggerReport, extract  # noqa: E402
from .geometry_metrics import Pose, dtre, outermost_lateral, ttlc  # noqa: E402
from .road_model import (  # noqa: E402
    DepartureSide,
    EdgeKind,
    RoadScenario,
    VehicleFootprint,
    mirror_run,
    to_canonical,
)
from .scenario_synth import ConstantLateralDecel, SynthSpec, synthesize  # noqa: E402
from .scoring import (  # noqa: E402
    RunScore,
    Thresholds,
    Weights,
    score_comprehensive,
    score_rdw,
    score_rka,
    score_run,
    score_scenario,
)
