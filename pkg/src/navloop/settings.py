"""Settings schema: the three configuration files that define a session.

Environment, locomotion, and scenario settings are separate files so that an
experiment can mix and match them. Every field carries a default so that a
partial (or empty) document still parses; validate_settings reports problems
as data instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any

from .core import Pose, Vec3

METHOD_KEYBOARD_TELEOP = "KeyboardTeleop"
METHOD_CONTROLLER_TELEOP = "ControllerTeleop"
METHOD_ARM_SWING = "ArmSwing"
METHOD_HEAD_BOB = "HeadBob"
METHOD_PHYSICAL_WALK = "PhysicalWalk"
METHOD_TELEPORT = "Teleport"

LOCOMOTION_METHODS = (
    METHOD_KEYBOARD_TELEOP,
    METHOD_CONTROLLER_TELEOP,
    METHOD_ARM_SWING,
    METHOD_HEAD_BOB,
    METHOD_PHYSICAL_WALK,
    METHOD_TELEPORT,
)

# Methods whose forward motion is velocity driven (need linear_velocity > 0).
VELOCITY_METHODS = frozenset(
    {
        METHOD_KEYBOARD_TELEOP,
        METHOD_CONTROLLER_TELEOP,
        METHOD_ARM_SWING,
        METHOD_HEAD_BOB,
    }
)


@dataclass(frozen=True)
class ScoreConstants:
    """Constants of the delayed reward R = b1*exp(-a1*t) + b2*exp(-a2*d)."""

    alpha1: float = -0.05  # 1/seconds
    alpha2: float = 0.2    # 1/meters
    beta1: float = -2.0
    beta2: float = 6.2
    scale_factor: float = 300.0
    floor_at_zero: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "scale_factor": self.scale_factor,
            "floor_at_zero": self.floor_at_zero,
        }


@dataclass(frozen=True)
class FireflyParams:
    """Dynamic goal marker motion parameters for one block."""

    radius: float = 0.75      # meters, horizontal sampling disc around the goal
    min_height: float = 0.75  # meters
    max_height: float = 1.25  # meters
    step_size: float = 0.005  # meters moved toward the current target per tick

    def to_dict(self) -> dict[str, Any]:
        return {
            "radius": self.radius,
            "min_height": self.min_height,
            "max_height": self.max_height,
            "step_size": self.step_size,
        }


@dataclass(frozen=True)
class EnvironmentSettings:
    room_width: float = 10.0  # meters, X extent, centered on the origin
    room_depth: float = 10.0  # meters, Z extent
    wall_height: float = 4.0  # meters
    walls_present_per_block: tuple[bool, ...] = (True, False)
    floor_extends_per_block: tuple[bool, ...] = (False, True)
    lights_on: bool = True
    sound_on: bool = True
    survey_links: tuple[str, ...] = ("ssq", "nasa-tlx")
    safe_area_width: float = 3.0  # meters, tracked physical area
    safe_area_depth: float = 3.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "room_width": self.room_width,
            "room_depth": self.room_depth,
            "wall_height": self.wall_height,
            "walls_present_per_block": list(self.walls_present_per_block),
            "floor_extends_per_block": list(self.floor_extends_per_block),
            "lights_on": self.lights_on,
            "sound_on": self.sound_on,
            "survey_links": list(self.survey_links),
            "safe_area_width": self.safe_area_width,
            "safe_area_depth": self.safe_area_depth,
        }


@dataclass(frozen=True)
class LocomotionSettings:
    method: str = METHOD_CONTROLLER_TELEOP
    linear_velocity: float = 2.0        # m/s for velocity driven methods
    rotation_speed: float = 45.0        # deg/s, used by input producers that turn in steps
    bob_height_threshold: float = 0.03  # meters between successive flexion points
    pitch_reject_threshold: float = 1.5  # deg/frame, larger pitch change voids a bob
    arm_swing_threshold: float = 0.005  # meters/frame per controller
    arm_swing_gain: float = 1.0         # controller speed to forward speed factor
    require_both_controllers: bool = False
    teleport_max_range: float = 5.0     # meters
    step_carry_duration: float = 0.5    # seconds of forward motion granted per detected step

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "linear_velocity": self.linear_velocity,
            "rotation_speed": self.rotation_speed,
            "bob_height_threshold": self.bob_height_threshold,
            "pitch_reject_threshold": self.pitch_reject_threshold,
            "arm_swing_threshold": self.arm_swing_threshold,
            "arm_swing_gain": self.arm_swing_gain,
            "require_both_controllers": self.require_both_controllers,
            "teleport_max_range": self.teleport_max_range,
            "step_carry_duration": self.step_carry_duration,
        }


@dataclass(frozen=True)
class ScenarioSettings:
    trials_per_block: tuple[int, ...] = (15, 15)
    max_trial_duration: float = 120.0  # seconds
    start_pose: Pose = field(
        default_factory=lambda: Pose(Vec3(4.5, 0.0, 4.5), yaw=225.0)
    )
    goal_position: Vec3 = field(default_factory=lambda: Vec3(-3.0, 0.0, -1.0))
    score: ScoreConstants = field(default_factory=ScoreConstants)
    firefly_per_block: tuple[FireflyParams, ...] = (
        FireflyParams(radius=0.75),
        FireflyParams(radius=1.5),
    )
    feedback_display_duration: float = 10.0  # seconds
    rng_seed: int = 12345

    def to_dict(self) -> dict[str, Any]:
        return {
            "trials_per_block": list(self.trials_per_block),
            "max_trial_duration": self.max_trial_duration,
            "start_pose": _pose_to_dict(self.start_pose),
            "goal_position": _vec3_to_dict(self.goal_position),
            "score": self.score.to_dict(),
            "firefly_per_block": [p.to_dict() for p in self.firefly_per_block],
            "feedback_display_duration": self.feedback_display_duration,
            "rng_seed": self.rng_seed,
        }


def _vec3_to_dict(v: Vec3) -> dict[str, float]:
    return {"x": v.x, "y": v.y, "z": v.z}


def _vec3_from_dict(data: Any) -> Vec3:
    if not isinstance(data, dict):
        raise ValueError(f"expected an object with x/y/z, got {type(data).__name__}")
    return Vec3(float(data.get("x", 0.0)), float(data.get("y", 0.0)), float(data.get("z", 0.0)))


def _pose_to_dict(p: Pose) -> dict[str, Any]:
    return {"position": _vec3_to_dict(p.position), "yaw": p.yaw, "pitch": p.pitch}


def _pose_from_dict(data: Any) -> Pose:
    if not isinstance(data, dict):
        raise ValueError(f"expected a pose object, got {type(data).__name__}")
    return Pose(
        position=_vec3_from_dict(data.get("position", {})),
        yaw=float(data.get("yaw", 0.0)),
        pitch=float(data.get("pitch", 0.0)),
    )


def _check_keys(cls: type, data: dict[str, Any], warnings: list[str] | None) -> None:
    if warnings is None:
        return
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            warnings.append(f"{cls.__name__}: unknown key '{key}' ignored")
    for name in known:
        if name not in data:
            warnings.append(f"{cls.__name__}: key '{name}' absent, default used")


def score_constants_from_dict(
    data: dict[str, Any], warnings: list[str] | None = None
) -> ScoreConstants:
    _check_keys(ScoreConstants, data, warnings)
    base = ScoreConstants()
    return ScoreConstants(
        alpha1=float(data.get("alpha1", base.alpha1)),
        alpha2=float(data.get("alpha2", base.alpha2)),
        beta1=float(data.get("beta1", base.beta1)),
        beta2=float(data.get("beta2", base.beta2)),
        scale_factor=float(data.get("scale_factor", base.scale_factor)),
        floor_at_zero=bool(data.get("floor_at_zero", base.floor_at_zero)),
    )


def firefly_params_from_dict(
    data: dict[str, Any], warnings: list[str] | None = None
) -> FireflyParams:
    _check_keys(FireflyParams, data, warnings)
    base = FireflyParams()
    return FireflyParams(
        radius=float(data.get("radius", base.radius)),
        min_height=float(data.get("min_height", base.min_height)),
        max_height=float(data.get("max_height", base.max_height)),
        step_size=float(data.get("step_size", base.step_size)),
    )


def environment_from_dict(
    data: dict[str, Any], warnings: list[str] | None = None
) -> EnvironmentSettings:
    _check_keys(EnvironmentSettings, data, warnings)
    base = EnvironmentSettings()
    return EnvironmentSettings(
        room_width=float(data.get("room_width", base.room_width)),
        room_depth=float(data.get("room_depth", base.room_depth)),
        wall_height=float(data.get("wall_height", base.wall_height)),
        walls_present_per_block=tuple(
            bool(v) for v in data.get("walls_present_per_block", base.walls_present_per_block)
        ),
        floor_extends_per_block=tuple(
            bool(v) for v in data.get("floor_extends_per_block", base.floor_extends_per_block)
        ),
        lights_on=bool(data.get("lights_on", base.lights_on)),
        sound_on=bool(data.get("sound_on", base.sound_on)),
        survey_links=tuple(str(s) for s in data.get("survey_links", base.survey_links)),
        safe_area_width=float(data.get("safe_area_width", base.safe_area_width)),
        safe_area_depth=float(data.get("safe_area_depth", base.safe_area_depth)),
    )


def locomotion_from_dict(
    data: dict[str, Any], warnings: list[str] | None = None
) -> LocomotionSettings:
    _check_keys(LocomotionSettings, data, warnings)
    base = LocomotionSettings()
    return LocomotionSettings(
        method=str(data.get("method", base.method)),
        linear_velocity=float(data.get("linear_velocity", base.linear_velocity)),
        rotation_speed=float(data.get("rotation_speed", base.rotation_speed)),
        bob_height_threshold=float(data.get("bob_height_threshold", base.bob_height_threshold)),
        pitch_reject_threshold=float(
            data.get("pitch_reject_threshold", base.pitch_reject_threshold)
        ),
        arm_swing_threshold=float(data.get("arm_swing_threshold", base.arm_swing_threshold)),
        arm_swing_gain=float(data.get("arm_swing_gain", base.arm_swing_gain)),
        require_both_controllers=bool(
            data.get("require_both_controllers", base.require_both_controllers)
        ),
        teleport_max_range=float(data.get("teleport_max_range", base.teleport_max_range)),
        step_carry_duration=float(data.get("step_carry_duration", base.step_carry_duration)),
    )


def scenario_from_dict(
    data: dict[str, Any], warnings: list[str] | None = None
) -> ScenarioSettings:
    _check_keys(ScenarioSettings, data, warnings)
    base = ScenarioSettings()
    start_pose = base.start_pose
    if "start_pose" in data:
        start_pose = _pose_from_dict(data["start_pose"])
    goal = base.goal_position
    if "goal_position" in data:
        goal = _vec3_from_dict(data["goal_position"])
    score = base.score
    if "score" in data:
        score = score_constants_from_dict(data["score"], warnings)
    firefly = base.firefly_per_block
    if "firefly_per_block" in data:
        firefly = tuple(firefly_params_from_dict(p, warnings) for p in data["firefly_per_block"])
    return ScenarioSettings(
        trials_per_block=tuple(int(n) for n in data.get("trials_per_block", base.trials_per_block)),
        max_trial_duration=float(data.get("max_trial_duration", base.max_trial_duration)),
        start_pose=start_pose,
        goal_position=goal,
        score=score,
        firefly_per_block=firefly,
        feedback_display_duration=float(
            data.get("feedback_display_duration", base.feedback_display_duration)
        ),
        rng_seed=int(data.get("rng_seed", base.rng_seed)),
    )


def validate_settings(
    env: EnvironmentSettings, loco: LocomotionSettings, scen: ScenarioSettings
) -> list[str]:
    """Cross-check the three settings objects.

    Returns a list of human readable violations; an empty list means the
    combination is runnable. Violations are data, not exceptions.
    """
    report: list[str] = []
    blocks = len(scen.trials_per_block)

    if blocks == 0:
        report.append("scenario: trials_per_block must not be empty")
    for i, n in enumerate(scen.trials_per_block):
        if n < 1:
            report.append(f"scenario: trials_per_block[{i}] must be >= 1, got {n}")
    if scen.max_trial_duration <= 0:
        report.append(f"scenario: max_trial_duration must be > 0, got {scen.max_trial_duration}")
    if scen.feedback_display_duration < 0:
        report.append("scenario: feedback_display_duration must be >= 0")
    if scen.score.scale_factor <= 0:
        report.append(f"scenario: score.scale_factor must be > 0, got {scen.score.scale_factor}")
    if len(scen.firefly_per_block) != blocks:
        report.append(
            f"scenario: firefly_per_block length {len(scen.firefly_per_block)} "
            f"does not match block count {blocks}"
        )
    for i, p in enumerate(scen.firefly_per_block):
        if p.radius < 0:
            report.append(f"scenario: firefly_per_block[{i}].radius must be >= 0")
        if p.min_height > p.max_height:
            report.append(f"scenario: firefly_per_block[{i}] min_height exceeds max_height")
        if p.step_size <= 0:
            report.append(f"scenario: firefly_per_block[{i}].step_size must be > 0")

    for name, value in (
        ("room_width", env.room_width),
        ("room_depth", env.room_depth),
        ("wall_height", env.wall_height),
        ("safe_area_width", env.safe_area_width),
        ("safe_area_depth", env.safe_area_depth),
    ):
        if value <= 0:
            report.append(f"environment: {name} must be > 0, got {value}")
    if len(env.walls_present_per_block) != blocks:
        report.append(
            f"environment: walls_present_per_block length {len(env.walls_present_per_block)} "
            f"does not match block count {blocks}"
        )
    if len(env.floor_extends_per_block) != blocks:
        report.append(
            f"environment: floor_extends_per_block length {len(env.floor_extends_per_block)} "
            f"does not match block count {blocks}"
        )

    if loco.method not in LOCOMOTION_METHODS:
        report.append(f"locomotion: unknown method '{loco.method}'")
    if loco.method in VELOCITY_METHODS and loco.linear_velocity <= 0:
        report.append(
            f"locomotion: linear_velocity must be > 0 for {loco.method}, "
            f"got {loco.linear_velocity}"
        )
    for name, value in (
        ("bob_height_threshold", loco.bob_height_threshold),
        ("pitch_reject_threshold", loco.pitch_reject_threshold),
        ("arm_swing_threshold", loco.arm_swing_threshold),
        ("teleport_max_range", loco.teleport_max_range),
        ("step_carry_duration", loco.step_carry_duration),
    ):
        if value < 0:
            report.append(f"locomotion: {name} must be >= 0, got {value}")

    return report


def demo_environment() -> EnvironmentSettings:
    """The bundled two-block demonstration room."""
    return EnvironmentSettings()


def demo_locomotion(method: str = METHOD_CONTROLLER_TELEOP) -> LocomotionSettings:
    return LocomotionSettings(method=method)


TIME_GROUP_CONSTANTS = ScoreConstants(alpha1=-0.05, alpha2=0.2, beta1=-2.0, beta2=6.2)
ACCURACY_GROUP_CONSTANTS = ScoreConstants(alpha1=0.2, alpha2=1.0, beta1=0.5, beta2=3.4)


def demo_scenario(group: str = "time", rng_seed: int = 12345) -> ScenarioSettings:
    """Two blocks of fifteen trials with the group's reward constants."""
    if group == "time":
        score = TIME_GROUP_CONSTANTS
    elif group == "accuracy":
        score = ACCURACY_GROUP_CONSTANTS
    else:
        raise ValueError(f"unknown group '{group}', expected 'time' or 'accuracy'")
    return ScenarioSettings(score=score, rng_seed=rng_seed)
