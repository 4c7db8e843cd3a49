import math

import numpy as np

from rdds_score.errors import SpecInfeasible
from rdds_score.road_model import RoadScenario, VehicleFootprint
from rdds_score.scenario_synth import ConstantLateralDecel, SynthSpec, synthesize_with_truth

CASES = [("flat", "right"), ("flat", "left"), ("vertical", "right"), ("vertical", "left")]


def random_footprint(rng, symmetric=True):
    track = rng.uniform(1.4, 2.0)
    fp = VehicleFootprint.from_dimensions(
        track_width=track,
        wheelbase=rng.uniform(2.2, 3.3),
        body_width=track + rng.uniform(0.0, 0.4),
        front_overhang=rng.uniform(0.6, 1.1),
        rear_overhang=rng.uniform(0.6, 1.2),
    )
    if symmetric:
        return fp
    # lopsided body: one side bulges further than the other
    tire = fp.tire_polygon
    xs = [p[0] for p in fp.body_polygon]
    half = max(p[1] for p in fp.body_polygon)
    left_extra = rng.uniform(0.05, 0.3)
    body = (
        (min(xs), -half),
        (max(xs), -half),
        (max(xs), half + left_extra),
        (0.5 * (min(xs) + max(xs)), half + 1.5 * left_extra),
        (min(xs), half + left_extra),
    )
    return VehicleFootprint(tire, body)


def _pick(rng, lo, hi, avoid, margin):
    for _ in range(200):
        v = rng.uniform(lo, hi)
        if all(abs(v - a) > margin for a in avoid):
            return v
    raise RuntimeError("could not place trigger")


def random_synth(rng, kind, side, footprint, scenario_id="s", run_id="r", edge_offset=None):
    """Random feasible spec whose triggers and excursion stay clear of every fail line.

    The margin of two samples of lateral travel keeps closed-form predictions
    unambiguous despite sampling.
    """
    lines_rdw = 0.2 if kind == "flat" else -0.2
    lines_rka = 0.1 if kind == "flat" else -0.1
    if edge_offset is None:
        edge_offset = float(rng.uniform(-3.0, 3.0))
    scenario = RoadScenario(kind, side, edge_offset, scenario_id)
    while True:
        speed = rng.uniform(5.0, 30.0)
        angle = math.radians(rng.uniform(1.0, 15.0))
        rate = float(rng.choice([10.0, 20.0, 50.0, 100.0]))
        v = speed * math.sin(angle)
        step = v / rate
        margin = 2.0 * step
        initial = rng.uniform(0.5, 1.5)
        l0 = -initial
        hi = 0.5 if kind == "flat" else -margin
        avoid = [lines_rdw, lines_rka]
        if l0 + margin >= hi:
            continue
        try:
            rdw = _pick(rng, l0 + margin, hi, avoid, margin) if rng.random() < 0.8 else None
            rka = _pick(rng, l0 + margin, hi, avoid, margin) if rng.random() < 0.8 else None
        except RuntimeError:
            continue
        correction = None
        if rka is not None and rng.random() < 0.5:
            correction = ConstantLateralDecel(rng.uniform(1.0, 8.0))
        duration = (1.0 - l0) / v + rng.uniform(0.5, 2.0)
        spec = SynthSpec(
            speed=speed,
            departure_angle=angle,
            edge_kind=kind,
            side=side,
            trigger_rdw_at=rdw,
            trigger_rka_at=rka,
            correction=correction,
            sample_rate=rate,
            duration=duration,
            initial_dtre=initial,
            run_id=run_id,
        )
        try:
            run, truth = synthesize_with_truth(spec, footprint, scenario)
        except SpecInfeasible:
            continue
        if any(abs(truth.d_max_lateral - line) <= margin for line in (lines_rdw, lines_rka)):
            continue
        return spec, scenario, run, truth


def rng_for(seed):
    return np.random.default_rng(seed)
