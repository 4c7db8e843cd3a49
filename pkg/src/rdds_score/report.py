"""Batch evaluation and report rendering."""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import EvaluationConfig
from .errors import ConfigError, EmptyRunSet, NegativeDtre, UnknownScenario
from .event_extraction import TestRun, TriggerReport, extract, lateral_profile
from .geometry_metrics import Pose, lateral_velocity_series, ttlc
from .road_model import RoadScenario, to_per_side
from .scoring import RunScore, fail_line, score_comprehensive, score_run, score_scenario

SIG_DIGITS = 9
CASE_LABELS = {
    1: "warning+steering",
    2: "steering only",
    3: "warning only",
    4: "neither",
}


def _round(value):
    if isinstance(value, float):
        return float(f"{value:.{SIG_DIGITS}g}") + 0.0
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    return value


def _ttlc_at(run: TestRun, index: Optional[int], velocity, footprint, scenario) -> Optional[float]:
    if index is None:
        return None
    pose = Pose(run.t[index], run.x[index], run.y[index], run.yaw[index])
    try:
        value = ttlc(pose, float(velocity[index]), footprint, scenario)
    except NegativeDtre:
        return None
    return value if value != float("inf") else None


def _index_of(run: TestRun, t: Optional[float]) -> Optional[int]:
    if t is None:
        return None
    return int(run.t.searchsorted(t))


def _evaluate_one(job) -> tuple[TriggerReport, RunScore, dict]:
    run, footprint, scenario, thresholds, weights, strict = job
    report = extract(run, footprint, scenario)
    score = score_run(report, scenario, thresholds, weights, strict)
    velocity = lateral_velocity_series(run.t, lateral_profile(run, footprint, scenario))
    extra = {
        "ttlc_at_rdw": _ttlc_at(run, _index_of(run, report.t_rdw), velocity, footprint, scenario),
        "ttlc_at_rka": _ttlc_at(run, _index_of(run, report.t_rka), velocity, footprint, scenario),
    }
    return report, score, extra


def assign_scenarios(config: EvaluationConfig, runs: Sequence[TestRun]) -> list[tuple[TestRun, RoadScenario]]:
    pairs = []
    seen = set()
    for run in runs:
        ref = config.run_scenarios.get(run.run_id, run.scenario_ref)
        scenario = config.scenario(ref)
        if scenario is None:
            raise UnknownScenario(f"run {run.run_id!r} references unknown scenario {ref!r}")
        if ref != run.scenario_ref:
            run = replace(run, scenario_ref=ref)
        key = (ref, run.run_id)
        if key in seen:
            raise ConfigError(f"duplicate run {run.run_id!r} in scenario {ref!r}")
        seen.add(key)
        pairs.append((run, scenario))
    pairs.sort(key=lambda p: (p[1].scenario_id, p[0].run_id))
    return pairs


def _literal(value: Optional[float], scenario: RoadScenario) -> Optional[float]:
    return None if value is None else to_per_side(value, scenario.side)


def _run_entry(run: TestRun, scenario: RoadScenario, report: TriggerReport, score: RunScore, extra: dict, config) -> dict:
    th = config.thresholds
    return {
        "run_id": run.run_id,
        "scenario_id": scenario.scenario_id,
        "edge_kind": scenario.edge_kind.value,
        "side": scenario.side.value,
        "samples": len(run),
        "trigger": {
            "canonical": {
                "d_rdw": report.d_rdw,
                "d_rka": report.d_rka,
                "d_max_lateral": report.d_max_lateral,
                "rdw_fail_line": fail_line(scenario.edge_kind, th.dtre_rdw),
                "rka_fail_line": fail_line(scenario.edge_kind, th.dtre_rka),
            },
            "per_side": {
                "d_rdw": _literal(report.d_rdw, scenario),
                "d_rka": _literal(report.d_rka, scenario),
                "d_max_lateral": _literal(report.d_max_lateral, scenario),
                "rdw_fail_line": _literal(fail_line(scenario.edge_kind, th.dtre_rdw), scenario),
                "rka_fail_line": _literal(fail_line(scenario.edge_kind, th.dtre_rka), scenario),
            },
            "t_rdw": report.t_rdw,
            "t_rka": report.t_rka,
            "edge_cross_time": report.edge_cross_time,
            "ttlc_at_rdw": extra["ttlc_at_rdw"],
            "ttlc_at_rka": extra["ttlc_at_rka"],
        },
        "score": {
            "s_w": score.s_w,
            "s_s": score.s_s,
            "total": score.total,
            "presence_case": score.presence_case,
            "flags": sorted(f.value for f in score.flags),
        },
    }


def evaluate(config: EvaluationConfig, runs: Sequence[TestRun], strict: Optional[bool] = None, jobs: int = 1) -> dict:
    """Extract, score and aggregate every run; returns the report as a plain dict."""
    strict = config.strict if strict is None else strict
    pairs = assign_scenarios(config, runs)
    jobs_in = [(run, config.footprint, sc, config.thresholds, config.weights, strict) for run, sc in pairs]
    if jobs > 1 and len(jobs_in) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_one, jobs_in))
    else:
        results = [_evaluate_one(job) for job in jobs_in]

    run_entries = []
    by_scenario = defaultdict(list)
    for (run, sc), (report, score, extra) in zip(pairs, results):
        run_entries.append(_run_entry(run, sc, report, score, extra, config))
        by_scenario[sc.scenario_id].append(score)

    ordered = sorted(config.scenarios, key=lambda s: s.scenario_id)
    scored = [s for s in ordered if s.scenario_id in by_scenario]
    unscored = [s for s in ordered if s.scenario_id not in by_scenario]
    if config.scenario_weights == "explicit":
        missing = [s.scenario_id for s in unscored if s.weight]
        if missing:
            raise EmptyRunSet(f"no runs for weighted scenario(s) {', '.join(missing)}")
        weights = [s.weight for s in scored]
    else:
        weights = None
    if not scored:
        raise EmptyRunSet("no runs to evaluate")
    scenario_scores = [score_scenario(by_scenario[s.scenario_id], s.scenario_id) for s in scored]
    comprehensive = score_comprehensive(scenario_scores, weights)

    th = config.thresholds
    report = {
        "tool": {"name": "rdds-score", "version": __version__},
        "thresholds": {
            "dtre_rdw": th.dtre_rdw,
            "dtre_rka": th.dtre_rka,
            "max_points_rdw": th.max_points_rdw,
            "max_points_rka": th.max_points_rka,
            "boundary": "pass" if th.boundary_passes else "fail",
        },
        "weights": {"w_warning": config.weights.w_warning, "w_steering": config.weights.w_steering},
        "strict": strict,
        "scenario_weighting": config.scenario_weights,
        "runs": run_entries,
        "scenarios": [
            {
                "scenario_id": s.scenario_id,
                "edge_kind": s.edge_kind.value,
                "side": s.side.value,
                "edge_offset": s.edge_offset,
                "run_count": ss.run_count,
                "mean": ss.mean,
                "run_totals": [r.total for r in ss.per_run],
            }
            for s, ss in zip(scored, scenario_scores)
        ],
        "unscored_scenarios": [s.scenario_id for s in unscored],
        "comprehensive": {
            "value": comprehensive.value,
            "scenario_weights": [{"scenario_id": sid, "weight": w} for sid, w in comprehensive.scenario_weights],
        },
    }
    return _round(report)


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def _fmt(value, width=8) -> str:
    if value is None:
        return "-".rjust(width)
    if isinstance(value, float):
        return f"{value:+.3f}".rjust(width)
    return str(value).rjust(width)


def render_table(report: dict) -> str:
    """Plain-text per-run table; positions are per-side metres."""
    header = (
        f"{'scenario':<16} {'run':<12} {'case':<18} {'d_rdw':>8} {'d_rka':>8} "
        f"{'d_max':>8} {'s_w':>6} {'s_s':>6} {'total':>6}  flags"
    )
    lines = [header, "-" * len(header)]
    for r in report["runs"]:
        lit = r["trigger"]["per_side"]
        sc = r["score"]
        case = f"{sc['presence_case']} {CASE_LABELS[sc['presence_case']]}"
        lines.append(
            f"{r['scenario_id']:<16} {r['run_id']:<12} {case:<18} {_fmt(lit['d_rdw'])} {_fmt(lit['d_rka'])} "
            f"{_fmt(lit['d_max_lateral'])} {sc['s_w']:>6.2f} {sc['s_s']:>6.2f} {sc['total']:>6.2f}  "
            f"{','.join(sc['flags'])}"
        )
    lines.append("")
    for s in report["scenarios"]:
        lines.append(f"scenario {s['scenario_id']:<16} runs={s['run_count']:<3} mean={s['mean']:.4f}")
    lines.append(f"comprehensive score: {report['comprehensive']['value']:.4f}")
    return "\n".join(lines) + "\n"


def write_series(run: TestRun, config: EvaluationConfig, out_dir) -> Path:
    """Per-sample lateral position series for plotting."""
    scenario = config.scenario(config.run_scenarios.get(run.run_id, run.scenario_ref))
    if scenario is None:
        raise UnknownScenario(f"run {run.run_id!r} references unknown scenario {run.scenario_ref!r}")
    lateral = lateral_profile(run, config.footprint, scenario)
    velocity = lateral_velocity_series(run.t, lateral)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{scenario.scenario_id}__{run.run_id}.series.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("t", "lateral_canonical", "lateral_per_side", "dtre", "lateral_velocity", "warning_active", "rka_active"))
        for t, lat, vel, w, r in zip(
            run.t.tolist(), lateral.tolist(), velocity.tolist(),
            run.warning_active.tolist(), run.rka_active.tolist(),
        ):
            writer.writerow((
                f"{t:.{SIG_DIGITS}g}", f"{lat:.{SIG_DIGITS}g}",
                f"{to_per_side(lat, scenario.side):.{SIG_DIGITS}g}", f"{-lat + 0.0:.{SIG_DIGITS}g}",
                f"{vel:.{SIG_DIGITS}g}", int(w), int(r),
            ))
    return path
