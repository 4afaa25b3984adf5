"""Shared geometry types and conventions.

Coordinates are left-handed with Y up. Yaw is rotation about the Y axis in
degrees, normalized to [0, 360). The heading unit vector for a yaw angle is
(sin(yaw), 0, cos(yaw)), so yaw 0 faces +Z and yaw 90 faces +X. All lengths
are meters, all times seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Vec3:
    x: float = 0.0  # meters
    y: float = 0.0  # meters, up
    z: float = 0.0  # meters

    def __add__(self, other: Vec3) -> Vec3:
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vec3) -> Vec3:
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> Vec3:
        return Vec3(self.x * k, self.y * k, self.z * k)

    def length(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


def normalize_yaw(angle: float) -> float:
    """Reduce an angle in degrees to the canonical [0, 360) range."""
    if not math.isfinite(angle):
        raise ValueError(f"yaw must be finite, got {angle!r}")
    result = math.fmod(angle, 360.0)
    if result < 0.0:
        result += 360.0
    # fmod of a tiny negative can land exactly on 360.0 after the correction
    if result >= 360.0:
        result = 0.0
    return result


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


@dataclass(frozen=True)
class Pose:
    position: Vec3 = field(default_factory=Vec3)
    yaw: float = 0.0    # degrees in [0, 360)
    pitch: float = 0.0  # degrees in [-90, 90]

    def __post_init__(self) -> None:
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))
        object.__setattr__(self, "pitch", clamp(self.pitch, -90.0, 90.0))


def heading_vector(yaw: float) -> Vec3:
    """Unit vector in the X-Z plane for a yaw angle in degrees."""
    rad = math.radians(yaw)
    return Vec3(math.sin(rad), 0.0, math.cos(rad))


def horizontal_distance(a: Vec3, b: Vec3) -> float:
    """Euclidean distance between two points measured in the X-Z plane only.

    The vertical axis is ignored on purpose: goals sit on the floor and the
    marker's height is decorative, so residual distance is a 2-D quantity.
    """
    if not (a.is_finite() and b.is_finite()):
        raise ValueError("horizontal_distance requires finite points")
    dx = a.x - b.x
    dz = a.z - b.z
    return math.sqrt(dx * dx + dz * dz)


def wrap_degrees(delta: float) -> float:
    """Map an angle difference to the signed (-180, 180] range."""
    d = math.fmod(delta, 360.0)
    if d > 180.0:
        d -= 360.0
    elif d <= -180.0:
        d += 360.0
    return d


@dataclass(frozen=True)
class FrameInput:
    """One tick of tracked device state.

    timestamp is seconds since trial start as seen by the input producer.
    controllers holds zero, one, or two tracked controller poses; the count
    must stay constant within a session.
    """

    timestamp: float = 0.0
    hmd: Pose = field(default_factory=Pose)
    controllers: tuple[Pose, ...] = ()
    move_held: bool = False
    trigger_held: bool = False
    end_trial_pressed: bool = False
    skip_pressed: bool = False


IDLE_INPUT = FrameInput()
