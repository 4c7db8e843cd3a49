"""Outermost-edge position, DTRE and TTLC for a posed vehicle footprint."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, NegativeDtre
from .road_model import RoadScenario, VehicleFootprint, canonical_array

_CHUNK = 1 << 20


def normalize_yaw_array(yaw) -> np.ndarray:
    """Wrap to (-pi, pi]; in-range values pass through untouched."""
    yaw = np.array(yaw, dtype=float)
    out = np.atleast_1d(yaw)
    wrap = (out <= -math.pi) | (out > math.pi)
    if wrap.any():
        k = np.round(out[wrap] / (2.0 * math.pi))
        w = out[wrap] - (2.0 * math.pi) * k
        out[wrap] = np.where(w <= -math.pi, math.pi, np.minimum(w, math.pi))
    return out.reshape(yaw.shape)


def normalize_yaw(yaw: float) -> float:
    return float(normalize_yaw_array(yaw))


@dataclass(frozen=True)
class Pose:
    """Timed planar pose in the log's raw frame: x forward, y to the right, yaw from x toward y."""

    t: float
    x: float
    y: float
    yaw: float

    def __post_init__(self):
        for name in ("t", "x", "y", "yaw"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise InvariantError(f"pose.{name} must be finite, got {val!r}")
            object.__setattr__(self, name, val)
        if self.t < 0.0:
            raise InvariantError(f"pose.t must be non-negative, got {self.t!r}")
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))


def _sincos(yaw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # exact odd/even symmetry so mirrored runs reproduce bitwise
    mag = np.abs(yaw)
    return np.copysign(np.sin(mag), yaw), np.cos(mag)


def outermost_lateral_series(ys, yaws, footprint: VehicleFootprint, scenario: RoadScenario) -> np.ndarray:
    """Canonical lateral position of the critical point for many poses at once.

    The tire outline is used against flat edges and the body outline against
    vertical ones. For a convex polygon the maximum of a linear functional is
    attained at a vertex, so only vertices are transformed.
    """
    ys = np.asarray(ys, dtype=float)
    yaws = np.asarray(yaws, dtype=float)
    verts = footprint.polygon_for(scenario.edge_kind)
    px, py = verts[:, 0], verts[:, 1]
    out = np.empty(ys.shape, dtype=float)
    for lo in range(0, ys.size, _CHUNK):
        hi = lo + _CHUNK
        s, c = _sincos(yaws[lo:hi])
        raw = ys[lo:hi, None] + (px[None, :] * s[:, None] + py[None, :] * c[:, None])
        out[lo:hi] = canonical_array(raw, scenario).max(axis=1)
    return out


def outermost_lateral(pose: Pose, footprint: VehicleFootprint, scenario: RoadScenario) -> float:
    return float(outermost_lateral_series([pose.y], [pose.yaw], footprint, scenario)[0])


def dtre(pose: Pose, footprint: VehicleFootprint, scenario: RoadScenario) -> float:
    """Distance to road edge: positive while on road, negative once past the edge."""
    return -outermost_lateral(pose, footprint, scenario) + 0.0


def ttlc(pose: Pose, lateral_velocity: float, footprint: VehicleFootprint, scenario: RoadScenario) -> float:
    """Time to line crossing at constant canonical lateral velocity.

    Returns ``inf`` when the vehicle is not closing on the edge.
    """
    remaining = dtre(pose, footprint, scenario)
    if remaining < 0.0:
        raise NegativeDtre(f"vehicle already {-remaining:.4f} m past the edge at t={pose.t}")
    if lateral_velocity <= 0.0:
        return math.inf
    return remaining / lateral_velocity


def lateral_velocity_series(times, canonical_lateral) -> np.ndarray:
    """Central finite-difference lateral velocity (one-sided at the ends)."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(canonical_lateral, dtype=float)
    if t.size < 2:
        return np.zeros_like(y)
    return np.gradient(y, t)
