"""Per-tick locomotion models.

Every model here is a pure function from explicit state to displacement or
pose, so they can be unit tested without an engine and replayed exactly.
All of them keep the participant on the Y=0 floor plane; eye height is a
presentation concern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .core import FrameInput, Pose, Vec3, heading_vector, horizontal_distance, wrap_degrees
from .settings import LocomotionSettings

DIRECTION_UP = "Up"
DIRECTION_DOWN = "Down"
DIRECTION_UNKNOWN = "Unknown"


def teleop_step(
    pose: Pose, frame: FrameInput, settings: LocomotionSettings, dt: float
) -> Vec3:
    """Keyboard and controller teleoperation share this implementation.

    While the move control is held the participant traverses at the preset
    linear velocity along the current head yaw; the displacement is confined
    to the X-Z plane.
    """
    if not frame.move_held:
        return Vec3()
    return heading_vector(frame.hmd.yaw).scaled(settings.linear_velocity * dt)


def arm_swing_speed(
    prev_controllers: Sequence[Pose],
    curr_controllers: Sequence[Pose],
    settings: LocomotionSettings,
    dt: float,
) -> float:
    """Forward speed in m/s derived from controller motion between frames.

    Each controller contributes its positional displacement since the last
    frame. With require_both_controllers the gate opens only when every
    controller moved more than arm_swing_threshold this frame; otherwise one
    moving controller is enough. When the gate is open the speed is the gain
    scaled mean displacement divided by dt.
    """
    if len(prev_controllers) == 0 or len(curr_controllers) == 0:
        raise ValueError("arm swing needs at least one tracked controller")
    if len(prev_controllers) != len(curr_controllers):
        raise ValueError(
            f"controller count changed between frames: "
            f"{len(prev_controllers)} then {len(curr_controllers)}"
        )
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    displacements = [
        (curr.position - prev.position).length()
        for prev, curr in zip(prev_controllers, curr_controllers)
    ]
    over = [d > settings.arm_swing_threshold for d in displacements]
    engaged = all(over) if settings.require_both_controllers else any(over)
    if not engaged:
        return 0.0
    mean_displacement = sum(displacements) / len(displacements)
    return settings.arm_swing_gain * mean_displacement / dt


@dataclass(frozen=True)
class HeadBobState:
    """Tracker state for walking-in-place detection from head height."""

    direction: str = DIRECTION_UNKNOWN
    last_flexion_height: float | None = None
    last_height: float | None = None
    last_pitch: float | None = None


def head_bob_step(
    state: HeadBobState,
    hmd_height: float,
    hmd_pitch: float,
    settings: LocomotionSettings,
) -> tuple[HeadBobState, bool]:
    """Feed one head sample; returns the new state and whether a step fired.

    A flexion point is recorded whenever the vertical direction of the head
    reverses; its height is the previous sample (the local extremum). A step
    is detected at that reversal when the height difference from the
    previous flexion point exceeds bob_height_threshold and the pitch change
    on the detection frame stays within pitch_reject_threshold, so nodding
    the head does not count as stepping. The very first flexion point has
    nothing to compare against and never produces a step. Every flexion
    updates the comparison point, including rejected ones.
    """
    if state.last_height is None:
        return (
            HeadBobState(
                direction=DIRECTION_UNKNOWN,
                last_flexion_height=None,
                last_height=hmd_height,
                last_pitch=hmd_pitch,
            ),
            False,
        )

    dh = hmd_height - state.last_height
    if dh > 0:
        new_direction = DIRECTION_UP
    elif dh < 0:
        new_direction = DIRECTION_DOWN
    else:
        new_direction = state.direction  # plateau keeps the current direction

    step = False
    flexion_height = state.last_flexion_height
    reversal = (
        state.direction != DIRECTION_UNKNOWN
        and new_direction != DIRECTION_UNKNOWN
        and new_direction != state.direction
    )
    if reversal:
        extremum = state.last_height
        pitch_change = abs(hmd_pitch - (state.last_pitch if state.last_pitch is not None else hmd_pitch))
        if flexion_height is not None:
            height_diff = abs(extremum - flexion_height)
            if height_diff > settings.bob_height_threshold and pitch_change <= settings.pitch_reject_threshold:
                step = True
        flexion_height = extremum

    return (
        HeadBobState(
            direction=new_direction,
            last_flexion_height=flexion_height,
            last_height=hmd_height,
            last_pitch=hmd_pitch,
        ),
        step,
    )


@dataclass(frozen=True)
class SafeArea:
    """The tracked physical region for real walking."""

    center: Vec3 = field(default_factory=Vec3)
    width: float = 3.0   # meters, X extent
    depth: float = 3.0   # meters, Z extent
    barrier_margin: float = 0.5  # meters from an edge at which the barrier shows


@dataclass(frozen=True)
class WalkLockState:
    """Accumulated yaw offset from environment locking.

    While the lock trigger is held the virtual scene stays put as the
    participant physically rotates; the rotation accumulates into yaw_offset
    and keeps being subtracted from the real yaw after release.
    """

    yaw_offset: float = 0.0  # degrees
    last_real_yaw: float | None = None


def _edge_distance(position: Vec3, area: SafeArea) -> float:
    # Signed distance to the nearest edge of the rectangle; negative outside.
    half_w = area.width / 2.0
    half_d = area.depth / 2.0
    dx = half_w - abs(position.x - area.center.x)
    dz = half_d - abs(position.z - area.center.z)
    return min(dx, dz)


def physical_walk_step(
    real_pose: Pose,
    state: WalkLockState,
    safe_area: SafeArea,
    trigger_held: bool,
) -> tuple[Pose, bool, WalkLockState]:
    """Map one tracked physical pose to a virtual pose.

    Position follows the tracked position one to one. The grid barrier is
    reported visible whenever the participant is within barrier_margin of a
    safe area edge (or outside it entirely).
    """
    new_offset = state.yaw_offset
    if trigger_held and state.last_real_yaw is not None:
        new_offset += wrap_degrees(real_pose.yaw - state.last_real_yaw)

    virtual_pose = Pose(
        position=Vec3(real_pose.position.x, 0.0, real_pose.position.z),
        yaw=real_pose.yaw - new_offset,
        pitch=real_pose.pitch,
    )
    barrier_visible = _edge_distance(real_pose.position, safe_area) <= safe_area.barrier_margin
    return (
        virtual_pose,
        barrier_visible,
        WalkLockState(yaw_offset=new_offset, last_real_yaw=real_pose.yaw),
    )


@dataclass(frozen=True)
class CollisionDisc:
    center: Vec3
    radius: float  # meters


@dataclass(frozen=True)
class World:
    """Parametric world geometry used for teleport validation.

    The room footprint is an axis aligned rectangle centered on the origin.
    Objects occupy collision discs on the floor plane.
    """

    room_width: float = 10.0
    room_depth: float = 10.0
    collision_discs: tuple[CollisionDisc, ...] = ()

    def contains(self, point: Vec3) -> bool:
        return abs(point.x) <= self.room_width / 2.0 and abs(point.z) <= self.room_depth / 2.0

    def clear_of_collisions(self, point: Vec3) -> bool:
        return all(
            horizontal_distance(point, disc.center) > disc.radius
            for disc in self.collision_discs
        )


@dataclass(frozen=True)
class TeleportTarget:
    position: Vec3
    valid: bool


def teleport_resolve(
    pose: Pose,
    aim_direction: Vec3,
    settings: LocomotionSettings,
    world: World,
) -> TeleportTarget:
    """Intersect the aim ray with the floor and validate the landing spot.

    The ray starts at the given pose position (the tracked controller). A
    target is valid when the ray actually meets the Y=0 plane going forward,
    the landing point lies within teleport_max_range horizontally, inside
    the room footprint, and clear of all collision discs. Invalid targets
    are returned with valid=False so a client can paint them differently.
    """
    if aim_direction.length() == 0:
        raise ValueError("aim direction must be nonzero")
    origin = pose.position
    if aim_direction.y >= 0 or origin.y <= 0:
        # Aiming level or upward never lands; so does aiming from the floor.
        return TeleportTarget(position=origin, valid=False)
    s = -origin.y / aim_direction.y
    hit = Vec3(origin.x + s * aim_direction.x, 0.0, origin.z + s * aim_direction.z)
    valid = (
        horizontal_distance(origin, hit) <= settings.teleport_max_range
        and world.contains(hit)
        and world.clear_of_collisions(hit)
    )
    return TeleportTarget(position=hit, valid=valid)


def apply_teleport(pose: Pose, target: TeleportTarget) -> Pose:
    """Relocate without reorienting: body and head direction are unchanged."""
    if not target.valid:
        raise ValueError("cannot teleport to an invalid target")
    return replace(pose, position=target.position)


def aim_from_pose(pose: Pose) -> Vec3:
    """Direction vector for the pose's yaw and pitch; negative pitch aims down."""
    yaw_rad = math.radians(pose.yaw)
    pitch_rad = math.radians(pose.pitch)
    cos_pitch = math.cos(pitch_rad)
    return Vec3(
        math.sin(yaw_rad) * cos_pitch,
        math.sin(pitch_rad),
        math.cos(yaw_rad) * cos_pitch,
    )
