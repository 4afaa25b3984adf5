"""Headless goal-directed navigation experiment framework.

A deterministic session engine for trial-block-session navigation
experiments with pluggable locomotion models, a stochastic goal marker,
delayed reward feedback with leaderboards, surveys, full telemetry
persistence, simulated participants, a descriptive analysis pipeline, and
a live operator protocol service.
"""

__version__ = "0.1.0"

from .core import FrameInput, Pose, Vec3, heading_vector, horizontal_distance, normalize_yaw
from .engine import (
    EndReason,
    ParticipantInfo,
    Phase,
    SessionEngine,
    TrialRecord,
    start_session,
)
from .scoring import Leaderboard, LeaderboardMode, displayed_score, raw_reward
from .settings import (
    EnvironmentSettings,
    LocomotionSettings,
    ScenarioSettings,
    ScoreConstants,
    demo_environment,
    demo_locomotion,
    demo_scenario,
    validate_settings,
)

__all__ = [
    "EndReason",
    "EnvironmentSettings",
    "FrameInput",
    "Leaderboard",
    "LeaderboardMode",
    "LocomotionSettings",
    "ParticipantInfo",
    "Phase",
    "Pose",
    "ScenarioSettings",
    "ScoreConstants",
    "SessionEngine",
    "TrialRecord",
    "Vec3",
    "demo_environment",
    "demo_locomotion",
    "demo_scenario",
    "displayed_score",
    "heading_vector",
    "horizontal_distance",
    "normalize_yaw",
    "raw_reward",
    "start_session",
    "validate_settings",
    "__version__",
]
