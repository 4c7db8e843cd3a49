"""Evaluation config loading and validation (JSON or YAML)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from .errors import ConfigError, ParseError, RddsError
from .road_model import DepartureSide, EdgeKind, RoadScenario, VehicleFootprint
from .scenario_synth import ConstantLateralDecel, SynthSpec
from .scoring import Thresholds, Weights

TOP_LEVEL_KEYS = {
    "footprint", "scenarios", "thresholds", "weights", "strict",
    "scenario_weights", "run_scenarios", "synth",
}
RECTANGLE_KEYS = {"track_width", "wheelbase", "body_width", "front_overhang", "rear_overhang", "cg_to_front_axle"}
SCENARIO_KEYS = {"id", "edge_kind", "side", "edge_offset", "weight"}
THRESHOLD_KEYS = {"dtre_rdw", "dtre_rka", "max_points_rdw", "max_points_rka", "boundary"}
SYNTH_KEYS = {
    "scenario", "run_id", "speed", "departure_angle", "departure_angle_deg",
    "trigger_rdw_at", "trigger_rka_at", "correction_rate", "sample_rate",
    "duration", "initial_dtre",
}


@dataclass(frozen=True)
class EvaluationConfig:
    footprint: VehicleFootprint
    scenarios: tuple
    thresholds: Thresholds = Thresholds()
    weights: Weights = Weights()
    strict: bool = False
    scenario_weights: str = "equal"
    run_scenarios: Mapping[str, str] = field(default_factory=dict)
    synth: tuple = ()

    def scenario(self, scenario_id: str) -> Optional[RoadScenario]:
        for sc in self.scenarios:
            if sc.scenario_id == scenario_id:
                return sc
        return None


def _reject_unknown(obj: Mapping, allowed: set, where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(extra)}")


def _mapping(obj: Any, where: str) -> Mapping:
    if not isinstance(obj, Mapping):
        raise ConfigError(f"{where}: expected a mapping, got {type(obj).__name__}")
    return obj


def _number(obj: Mapping, key: str, where: str, default=None) -> Optional[float]:
    if key not in obj or obj[key] is None:
        if default is ...:
            raise ConfigError(f"{where}.{key}: required")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{where}.{key}: expected a finite number, got {val!r}")
    return float(val)


def _wrap(where: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except RddsError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _footprint(obj: Any) -> VehicleFootprint:
    fp = _mapping(obj, "footprint")
    if "rectangle" in fp:
        _reject_unknown(fp, {"rectangle"}, "footprint")
        rect = _mapping(fp["rectangle"], "footprint.rectangle")
        _reject_unknown(rect, RECTANGLE_KEYS, "footprint.rectangle")
        kwargs = {k: _number(rect, k, "footprint.rectangle", ...) for k in sorted(RECTANGLE_KEYS - {"cg_to_front_axle"})}
        kwargs["cg_to_front_axle"] = _number(rect, "cg_to_front_axle", "footprint.rectangle")
        return _wrap("footprint.rectangle", VehicleFootprint.from_dimensions, **kwargs)
    _reject_unknown(fp, {"tire_polygon", "body_polygon"}, "footprint")
    for key in ("tire_polygon", "body_polygon"):
        if key not in fp:
            raise ConfigError(f"footprint.{key}: required (or give footprint.rectangle)")
    return _wrap("footprint", VehicleFootprint, fp["tire_polygon"], fp["body_polygon"])


def _enum(obj: Mapping, key: str, enum_cls, where: str):
    try:
        return enum_cls(obj[key])
    except KeyError:
        raise ConfigError(f"{where}.{key}: required") from None
    except ValueError:
        choices = "|".join(m.value for m in enum_cls)
        raise ConfigError(f"{where}.{key}: expected {choices}, got {obj[key]!r}") from None


def _scenarios(obj: Any) -> tuple:
    if not isinstance(obj, list) or not obj:
        raise ConfigError("scenarios: expected a non-empty list")
    out = []
    seen = set()
    for i, raw in enumerate(obj):
        where = f"scenarios[{i}]"
        sc = _mapping(raw, where)
        _reject_unknown(sc, SCENARIO_KEYS, where)
        if "id" not in sc:
            raise ConfigError(f"{where}.id: required")
        sid = str(sc["id"])
        if sid in seen:
            raise ConfigError(f"{where}.id: duplicate scenario id {sid!r}")
        seen.add(sid)
        if "edge_offset" not in sc:
            raise ConfigError(f"{where}.edge_offset: required (lateral position of the edge line in the log frame)")
        out.append(_wrap(
            where,
            RoadScenario,
            edge_kind=_enum(sc, "edge_kind", EdgeKind, where),
            side=_enum(sc, "side", DepartureSide, where),
            edge_offset=_number(sc, "edge_offset", where, ...),
            scenario_id=sid,
            weight=_number(sc, "weight", where),
        ))
    return tuple(out)


def _thresholds(obj: Any) -> Thresholds:
    if obj is None:
        return Thresholds()
    th = _mapping(obj, "thresholds")
    _reject_unknown(th, THRESHOLD_KEYS, "thresholds")
    defaults = Thresholds()
    boundary = th.get("boundary", "fail")
    if boundary not in ("fail", "pass"):
        raise ConfigError(f"thresholds.boundary: expected fail|pass, got {boundary!r}")
    kwargs = {
        k: _number(th, k, "thresholds", getattr(defaults, k))
        for k in ("dtre_rdw", "dtre_rka", "max_points_rdw", "max_points_rka")
    }
    return _wrap("thresholds", Thresholds, boundary_passes=boundary == "pass", **kwargs)


def _weights(obj: Any) -> Weights:
    if obj is None:
        return Weights()
    w = _mapping(obj, "weights")
    _reject_unknown(w, {"w_warning", "w_steering"}, "weights")
    return _wrap(
        "weights",
        Weights,
        w_warning=_number(w, "w_warning", "weights", 1.0),
        w_steering=_number(w, "w_steering", "weights", 1.0),
    )


def _synth_entry(raw: Any, i: int, scenarios: tuple) -> tuple[str, SynthSpec]:
    where = f"synth[{i}]"
    entry = _mapping(raw, where)
    _reject_unknown(entry, SYNTH_KEYS, where)
    sid = str(entry.get("scenario", ""))
    scenario = next((s for s in scenarios if s.scenario_id == sid), None)
    if scenario is None:
        raise ConfigError(f"{where}.scenario: unknown scenario {sid!r}")
    if ("departure_angle" in entry) == ("departure_angle_deg" in entry):
        raise ConfigError(f"{where}: give exactly one of departure_angle, departure_angle_deg")
    if "departure_angle" in entry:
        angle = _number(entry, "departure_angle", where, ...)
    else:
        angle = math.radians(_number(entry, "departure_angle_deg", where, ...))
    rate = _number(entry, "correction_rate", where)
    spec = _wrap(
        where,
        SynthSpec,
        speed=_number(entry, "speed", where, ...),
        departure_angle=angle,
        edge_kind=scenario.edge_kind,
        side=scenario.side,
        trigger_rdw_at=_number(entry, "trigger_rdw_at", where),
        trigger_rka_at=_number(entry, "trigger_rka_at", where),
        correction=None if rate is None else _wrap(where, ConstantLateralDecel, rate),
        sample_rate=_number(entry, "sample_rate", where, 100.0),
        duration=_number(entry, "duration", where, 10.0),
        initial_dtre=_number(entry, "initial_dtre", where, 0.5),
        run_id=str(entry.get("run_id", f"run{i:03d}")),
    )
    return sid, spec


def parse_config(data: Any) -> EvaluationConfig:
    cfg = _mapping(data, "config")
    _reject_unknown(cfg, TOP_LEVEL_KEYS, "config")
    if "footprint" not in cfg:
        raise ConfigError("footprint: required")
    if "scenarios" not in cfg:
        raise ConfigError("scenarios: required")
    footprint = _footprint(cfg["footprint"])
    scenarios = _scenarios(cfg["scenarios"])

    has_weight = [s.weight is not None for s in scenarios]
    mode = cfg.get("scenario_weights")
    if mode is None:
        if all(has_weight):
            mode = "explicit"
        elif not any(has_weight):
            mode = "equal"
        else:
            raise ConfigError("scenarios: either every scenario has a weight or none does")
    if mode not in ("equal", "explicit"):
        raise ConfigError(f"scenario_weights: expected equal|explicit, got {mode!r}")
    if mode == "explicit" and not all(has_weight):
        missing = [s.scenario_id for s in scenarios if s.weight is None]
        raise ConfigError(f"scenario_weights: explicit weighting but no weight for {', '.join(missing)}")

    strict = cfg.get("strict", False)
    if not isinstance(strict, bool):
        raise ConfigError(f"strict: expected true/false, got {strict!r}")

    run_scenarios = cfg.get("run_scenarios") or {}
    run_scenarios = {str(k): str(v) for k, v in _mapping(run_scenarios, "run_scenarios").items()}
    known = {s.scenario_id for s in scenarios}
    for run_id, sid in run_scenarios.items():
        if sid not in known:
            raise ConfigError(f"run_scenarios.{run_id}: unknown scenario {sid!r}")

    synth_raw = cfg.get("synth") or []
    if not isinstance(synth_raw, list):
        raise ConfigError("synth: expected a list")
    synth = tuple(_synth_entry(raw, i, scenarios) for i, raw in enumerate(synth_raw))

    return EvaluationConfig(
        footprint=footprint,
        scenarios=scenarios,
        thresholds=_thresholds(cfg.get("thresholds")),
        weights=_weights(cfg.get("weights")),
        strict=strict,
        scenario_weights=mode,
        run_scenarios=run_scenarios,
        synth=synth,
    )


def load_config(path) -> EvaluationConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    if path.suffix.lower() in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ParseError(
                str(getattr(exc, "problem", exc)),
                path=path,
                line=None if mark is None else mark.line + 1,
                column=None if mark is None else mark.column + 1,
            ) from exc
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from exc
    return parse_config(data)
