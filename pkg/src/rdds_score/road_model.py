"""Road edge, departure side and vehicle footprint types.

All metrics are computed in a *canonical* lateral frame: the road edge line sits
at 0, on-road positions are negative and the departure direction is positive.
Right departures map raw lateral positions through ``raw - edge_offset``; left
departures are mirrored, ``-(raw - edge_offset)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Sequence, Tuple

import numpy as np

from .errors import ConfigError, InvalidFootprint, InvalidVerticalPenetration, WeightSumViolation

if TYPE_CHECKING:
    from .event_extraction import TestRun

# Contact noise allowance for vertical edges (m).
VERTICAL_PENETRATION_TOL = 1e-3

Point = Tuple[float, float]


class EdgeKind(str, enum.Enum):
    FLAT = "flat"
    VERTICAL = "vertical"


class DepartureSide(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    def flipped(self) -> "DepartureSide":
        return DepartureSide.RIGHT if self is DepartureSide.LEFT else DepartureSide.LEFT

    @property
    def sign(self) -> float:
        return 1.0 if self is DepartureSide.RIGHT else -1.0


def _as_points(points: Sequence[Sequence[float]], name: str) -> tuple[Point, ...]:
    try:
        pts = tuple((float(p[0]), float(p[1])) for p in points)
    except (TypeError, ValueError, IndexError) as exc:
        raise InvalidFootprint(f"{name}: vertices must be (x, y) pairs") from exc
    if len(pts) < 3:
        raise InvalidFootprint(f"{name}: need at least 3 vertices, got {len(pts)}")
    if not all(math.isfinite(c) for p in pts for c in p):
        raise InvalidFootprint(f"{name}: non-finite vertex coordinate")
    return pts


def polygon_area(points: Sequence[Point]) -> float:
    """Signed shoelace area; positive for counter-clockwise order."""
    n = len(points)
    acc = 0.0
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


def _check_convex_ccw(points: tuple[Point, ...], name: str) -> None:
    area = polygon_area(points)
    if area <= 0.0:
        if area < 0.0:
            raise InvalidFootprint(f"{name}: vertices must be ordered counter-clockwise in (x, y), i.e. positive signed area")
        raise InvalidFootprint(f"{name}: degenerate polygon (zero area)")
    n = len(points)
    turning = 0.0
    for i in range(n):
        ax, ay = points[i - 1]
        bx, by = points[i]
        cx, cy = points[(i + 1) % n]
        e1 = (bx - ax, by - ay)
        e2 = (cx - bx, cy - by)
        if e1 == (0.0, 0.0) or e2 == (0.0, 0.0):
            raise InvalidFootprint(f"{name}: repeated vertex at index {i}")
        cross = e1[0] * e2[1] - e1[1] * e2[0]
        if cross < -1e-12:
            raise InvalidFootprint(f"{name}: polygon is not convex at vertex {i}")
        turning += math.atan2(cross, e1[0] * e2[0] + e1[1] * e2[1])
    # rejects self-intersecting stars whose turns are all left
    if abs(turning - 2.0 * math.pi) > 1e-6:
        raise InvalidFootprint(f"{name}: polygon is not simple")


def _contains(outer: tuple[Point, ...], inner: tuple[Point, ...], tol: float = 1e-9) -> bool:
    n = len(outer)
    for vx, vy in inner:
        for i in range(n):
            ax, ay = outer[i]
            bx, by = outer[(i + 1) % n]
            if (bx - ax) * (vy - ay) - (by - ay) * (vx - ax) < -tol:
                return False
    return True


@dataclass(frozen=True)
class VehicleFootprint:
    """Tire-contact and body outlines in the vehicle frame.

    Vehicle frame: origin at the centroid, x forward, y toward the right (the
    same lateral sense as the log frame). The tire
    polygon joins the points where the outside plane of each tire meets the
    road; the body polygon is the outermost outline (first collision point
    against a vertical edge).
    """

    tire_polygon: tuple[Point, ...]
    body_polygon: tuple[Point, ...]

    def __post_init__(self):
        tire = _as_points(self.tire_polygon, "tire_polygon")
        body = _as_points(self.body_polygon, "body_polygon")
        _check_convex_ccw(tire, "tire_polygon")
        _check_convex_ccw(body, "body_polygon")
        if not _contains(body, tire):
            raise InvalidFootprint("tire_polygon must lie inside body_polygon")
        object.__setattr__(self, "tire_polygon", tire)
        object.__setattr__(self, "body_polygon", body)

    @classmethod
    def from_dimensions(
        cls,
        track_width: float,
        wheelbase: float,
        body_width: float,
        front_overhang: float,
        rear_overhang: float,
        cg_to_front_axle: float | None = None,
    ) -> "VehicleFootprint":
        """Rectangular footprint from basic vehicle dimensions.

        ``track_width`` is measured between the outside edges of the tires.
        The centroid defaults to the middle of the wheelbase.
        """
        dims = dict(
            track_width=track_width,
            wheelbase=wheelbase,
            body_width=body_width,
            front_overhang=front_overhang,
            rear_overhang=rear_overhang,
        )
        for key, val in dims.items():
            if not (math.isfinite(val) and val >= 0.0):
                raise InvalidFootprint(f"{key} must be finite and non-negative, got {val!r}")
        if track_width <= 0.0 or wheelbase <= 0.0:
            raise InvalidFootprint("track_width and wheelbase must be positive")
        if body_width < track_width:
            raise InvalidFootprint("body_width must be at least track_width")
        if cg_to_front_axle is None:
            cg_to_front_axle = 0.5 * wheelbase
        if not 0.0 <= cg_to_front_axle <= wheelbase:
            raise InvalidFootprint("cg_to_front_axle must lie within the wheelbase")
        front = cg_to_front_axle
        rear = wheelbase - cg_to_front_axle
        tire = _rectangle(-rear, front, 0.5 * track_width)
        body = _rectangle(-rear - rear_overhang, front + front_overhang, 0.5 * body_width)
        return cls(tire, body)

    def polygon_for(self, edge_kind: EdgeKind) -> np.ndarray:
        """Vertices that define the outermost edge for this edge kind, as (n, 2)."""
        pts = self.tire_polygon if EdgeKind(edge_kind) is EdgeKind.FLAT else self.body_polygon
        return np.asarray(pts, dtype=float)

    def mirrored(self) -> "VehicleFootprint":
        """Reflect across the longitudinal axis (y -> -y), keeping CCW order."""
        def flip(poly):
            return tuple((x, -y) for x, y in reversed(poly))

        return VehicleFootprint(flip(self.tire_polygon), flip(self.body_polygon))


def _rectangle(x_min: float, x_max: float, half_width: float) -> tuple[Point, ...]:
    return (
        (x_min, -half_width),
        (x_max, -half_width),
        (x_max, half_width),
        (x_min, half_width),
    )


@dataclass(frozen=True)
class RoadScenario:
    edge_kind: EdgeKind
    side: DepartureSide
    edge_offset: float = 0.0
    scenario_id: str = "scenario"
    weight: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "edge_kind", EdgeKind(self.edge_kind))
        object.__setattr__(self, "side", DepartureSide(self.side))
        if not math.isfinite(self.edge_offset):
            raise ConfigError(f"scenario {self.scenario_id!r}: edge_offset must be finite")
        if self.weight is not None and not 0.0 <= self.weight <= 1.0:
            raise WeightSumViolation(
                f"scenario {self.scenario_id!r}: weight must lie in [0, 1], got {self.weight!r}"
            )

    def mirrored(self) -> "RoadScenario":
        return replace(self, side=self.side.flipped(), edge_offset=-self.edge_offset)


def canonical_array(raw_lateral, scenario: RoadScenario) -> np.ndarray:
    """Vectorised :func:`to_canonical`."""
    raw = np.asarray(raw_lateral, dtype=float)
    shifted = raw - scenario.edge_offset
    out = shifted if scenario.side is DepartureSide.RIGHT else -shifted
    if scenario.edge_kind is EdgeKind.VERTICAL:
        worst = float(np.max(out)) if out.size else -math.inf
        if worst > VERTICAL_PENETRATION_TOL:
            raise InvalidVerticalPenetration(
                f"scenario {scenario.scenario_id!r}: vehicle is {worst:.4f} m past a vertical "
                "edge; log is corrupt or edge_kind is wrong"
            )
    return out


def to_canonical(raw_lateral: float, scenario: RoadScenario) -> float:
    return float(canonical_array(raw_lateral, scenario))


def from_canonical(canonical_lateral, scenario: RoadScenario):
    c = np.asarray(canonical_lateral, dtype=float)
    out = c + scenario.edge_offset if scenario.side is DepartureSide.RIGHT else -(c - scenario.edge_offset)
    return float(out) if out.ndim == 0 else out


def to_per_side(canonical_lateral: float, side: DepartureSide) -> float:
    """Signed lateral position in the per-side convention used for reporting.

    Right departures keep the canonical sign; left departures are positive on
    road. ``+ 0.0`` folds negative zero.
    """
    return DepartureSide(side).sign * canonical_lateral + 0.0


def mirror_run(run: "TestRun", scenario: RoadScenario) -> tuple["TestRun", RoadScenario]:
    """Reflect a run and its scenario to the opposite departure side.

    Raw lateral positions and yaw are negated and the edge offset follows, so
    every canonical quantity is bitwise unchanged. Footprints that are not
    symmetric about the longitudinal axis must be mirrored too (see
    :meth:`VehicleFootprint.mirrored`).
    """
    return replace(run, y=-run.y, yaw=-run.yaw), scenario.mirrored()
