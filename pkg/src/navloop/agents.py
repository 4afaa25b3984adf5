"""Simulated participants.

Agents close the loop for unattended runs: each tick they observe the fly
and their own pose and produce one FrameInput, exactly what a tracked human
would feed the engine. Three behaviors are provided. GoalSeeker watches the
fly, keeps a running centroid of its horizontal positions as the goal
estimate, then walks there and ends the trial. FlyChaser steers at the
fly's instantaneous position forever, the classic misbehavior that times
every trial out. Scripted replays a prerecorded input stream for exact
replay tests.
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass, replace
from pathlib import Path
from random import Random
from typing import Any, Protocol, Sequence

from .core import FrameInput, Pose, Vec3, clamp, horizontal_distance
from .engine import (
    DEFAULT_DT,
    ParticipantInfo,
    Phase,
    SessionEngine,
    start_session,
)
from .persistence import build_archive, write_session_archive
from .scoring import Leaderboard, LeaderboardMode
from .settings import (
    EnvironmentSettings,
    LocomotionSettings,
    ScenarioSettings,
    ScoreConstants,
    score_constants_from_dict,
)
from .surveys import minimal_answers

KIND_GOAL_SEEKER = "GoalSeeker"
KIND_FLY_CHASER = "FlyChaser"
KIND_SCRIPTED = "Scripted"


@dataclass(frozen=True)
class AgentPolicy:
    kind: str = KIND_GOAL_SEEKER
    observation_noise: float = 0.0  # meters, std of fly position noise
    stop_radius: float = 0.3        # meters from the estimate at which to stop
    observe_ticks: int = 300        # baseline ticks spent watching before moving
    speed_preference: float = 0.0   # 0 careful .. 1 hasty; shortens observation


@dataclass(frozen=True)
class Observation:
    self_pose: Pose
    fly_position: Vec3
    trial_clock: float


class Agent(Protocol):
    def act(self, obs: Observation) -> FrameInput: ...

    def reset_trial(self) -> None: ...


def _yaw_toward(origin: Vec3, target_x: float, target_z: float) -> float:
    # Left-handed heading: yaw 0 is +Z, so the angle comes from atan2(dx, dz).
    return math.degrees(math.atan2(target_x - origin.x, target_z - origin.z)) % 360.0


class GoalSeekerAgent:
    def __init__(self, policy: AgentPolicy, rng: Random | None = None):
        self.policy = policy
        self.rng = rng if rng is not None else Random(0)
        self.effective_observe = max(
            0, round(policy.observe_ticks * (1.0 - clamp(policy.speed_preference, 0.0, 1.0)))
        )
        self.reset_trial()

    def reset_trial(self) -> None:
        self._ticks = 0
        self._sum_x = 0.0
        self._sum_z = 0.0

    def act(self, obs: Observation) -> FrameInput:
        fx, fz = obs.fly_position.x, obs.fly_position.z
        if self.policy.observation_noise > 0:
            fx += self.rng.gauss(0.0, self.policy.observation_noise)
            fz += self.rng.gauss(0.0, self.policy.observation_noise)
        self._ticks += 1
        self._sum_x += fx
        self._sum_z += fz
        estimate_x = self._sum_x / self._ticks
        estimate_z = self._sum_z / self._ticks

        if self._ticks <= self.effective_observe:
            return FrameInput(timestamp=obs.trial_clock, hmd=obs.self_pose)

        distance = horizontal_distance(
            obs.self_pose.position, Vec3(estimate_x, 0.0, estimate_z)
        )
        if distance <= self.policy.stop_radius:
            return FrameInput(
                timestamp=obs.trial_clock, hmd=obs.self_pose, end_trial_pressed=True
            )
        yaw = _yaw_toward(obs.self_pose.position, estimate_x, estimate_z)
        return FrameInput(
            timestamp=obs.trial_clock,
            hmd=Pose(position=obs.self_pose.position, yaw=yaw),
            move_held=True,
        )


class FlyChaserAgent:
    def __init__(self, policy: AgentPolicy | None = None, rng: Random | None = None):
        self.policy = policy or AgentPolicy(kind=KIND_FLY_CHASER)

    def reset_trial(self) -> None:
        pass

    def act(self, obs: Observation) -> FrameInput:
        yaw = _yaw_toward(obs.self_pose.position, obs.fly_position.x, obs.fly_position.z)
        return FrameInput(
            timestamp=obs.trial_clock,
            hmd=Pose(position=obs.self_pose.position, yaw=yaw),
            move_held=True,
        )


class ScriptedAgent:
    """Replays a fixed input stream, one entry per tick, then idles."""

    def __init__(self, inputs: Sequence[FrameInput]):
        self.inputs = list(inputs)
        self._cursor = 0

    def reset_trial(self) -> None:
        pass

    def act(self, obs: Observation) -> FrameInput:
        if self._cursor >= len(self.inputs):
            return FrameInput(timestamp=obs.trial_clock, hmd=obs.self_pose)
        frame = self.inputs[self._cursor]
        self._cursor += 1
        return frame


def make_agent(policy: AgentPolicy, rng: Random | None = None) -> Agent:
    if policy.kind == KIND_GOAL_SEEKER:
        return GoalSeekerAgent(policy, rng)
    if policy.kind == KIND_FLY_CHASER:
        return FlyChaserAgent(policy, rng)
    raise ValueError(f"cannot build agent of kind '{policy.kind}' without a script")


def run_session(
    env: EnvironmentSettings,
    loco: LocomotionSettings,
    scen: ScenarioSettings,
    participant: ParticipantInfo,
    agent: Agent,
    leaderboard: Leaderboard | None = None,
    dt: float = DEFAULT_DT,
    session_id: str = "",
    created_at: str = "",
    skip_feedback: bool = True,
    max_ticks: int = 2_000_000,
) -> SessionEngine:
    """Drive one agent through a complete session.

    Surveys are answered with their minimum values and feedback display is
    skipped by default so unattended runs do not burn wall-clock ticks on a
    screen nobody watches. The tick budget guards against a misbehaving
    agent and a scenario with no timeout.
    """
    engine = start_session(
        env, loco, scen, participant, leaderboard,
        session_id=session_id, created_at=created_at,
    )
    ticks = 0
    while engine.phase not in (Phase.ENDED, Phase.ABORTED):
        if ticks > max_ticks:
            raise RuntimeError(f"session exceeded {max_ticks} ticks without ending")
        if engine.phase is Phase.IN_TRIAL:
            obs = Observation(engine.pose, engine.fly_position(), engine.trial_clock)
            ended = engine.tick(agent.act(obs), dt)
            if ended:
                agent.reset_trial()
            ticks += 1
        elif engine.phase is Phase.FEEDBACK_DISPLAY:
            engine.feedback_tick(dt, end_pressed=skip_feedback)
            ticks += 1
        elif engine.phase is Phase.SURVEY_PENDING:
            for definition in list(engine.pending_surveys):
                engine.record_response(definition.id, minimal_answers(definition))
        elif engine.phase is Phase.BLOCK_TRANSITION:
            engine.advance_block()
        else:
            break
    return engine


def deterministic_stamp(seed: int) -> str:
    """A reproducible stand-in for a wall-clock timestamp in simulated runs."""
    moment = _dt.datetime(2000, 1, 1, tzinfo=_dt.timezone.utc) + _dt.timedelta(
        seconds=seed % 100_000_000
    )
    return moment.strftime("%Y%m%dT%H%M%SZ")


@dataclass(frozen=True)
class AgentSpec:
    """One simulated participant from an agents file."""

    participant: ParticipantInfo
    policy: AgentPolicy
    score: ScoreConstants | None = None  # overrides the scenario constants


def agent_spec_from_dict(data: dict[str, Any]) -> AgentSpec:
    policy_data = data.get("policy", {})
    policy = AgentPolicy(
        kind=str(data.get("kind", KIND_GOAL_SEEKER)),
        observation_noise=float(policy_data.get("observation_noise", 0.0)),
        stop_radius=float(policy_data.get("stop_radius", 0.3)),
        observe_ticks=int(policy_data.get("observe_ticks", 300)),
        speed_preference=float(policy_data.get("speed_preference", 0.0)),
    )
    participant = ParticipantInfo(
        id=str(data["id"]),
        age=int(data.get("age", 0)),
        gender=str(data.get("gender", "")),
        qualification=str(data.get("qualification", "")),
        group=str(data.get("group", "")),
    )
    score = None
    if "score" in data:
        score = score_constants_from_dict(data["score"])
    return AgentSpec(participant=participant, policy=policy, score=score)


def speed_preference_for(constants: ScoreConstants) -> float:
    """Couple an agent's haste to how hard its feedback punishes time.

    The magnitude of beta1 scales the time term of the reward, so a larger
    |beta1| means slow trials cost more and the agent should hurry.
    """
    return clamp(abs(constants.beta1) * 0.4, 0.0, 1.0)


def cohort_specs(
    n_per_group: int,
    groups: Sequence[tuple[str, ScoreConstants]],
    observation_noise: float = 0.05,
) -> list[AgentSpec]:
    """GoalSeeker specs for n participants in each feedback group."""
    specs = []
    for group_name, constants in groups:
        preference = speed_preference_for(constants)
        for i in range(n_per_group):
            specs.append(
                AgentSpec(
                    participant=ParticipantInfo(
                        id=f"{group_name[:1]}{i + 1:02d}", group=group_name
                    ),
                    policy=AgentPolicy(
                        kind=KIND_GOAL_SEEKER,
                        observation_noise=observation_noise,
                        stop_radius=0.15 + 0.25 * preference,
                        observe_ticks=300,
                        speed_preference=preference,
                    ),
                    score=constants,
                )
            )
    return specs


def run_cohort(
    specs: Sequence[AgentSpec],
    env: EnvironmentSettings,
    loco: LocomotionSettings,
    scen: ScenarioSettings,
    out_root: Path | str,
    seed: int,
    leaderboard_mode: LeaderboardMode = LeaderboardMode.FAKE,
    dt: float = DEFAULT_DT,
) -> list[Path]:
    """Run every spec through its own session and persist the archives.

    Sessions share one leaderboard; in fake mode it reverts between
    participants and the disk file (if any) is left alone. Each participant
    gets a distinct engine seed derived from the base seed, so the whole
    cohort is reproducible from one number.
    """
    board = Leaderboard(mode=leaderboard_mode).with_snapshot()
    session_dirs: list[Path] = []
    for index, spec in enumerate(specs):
        if board.mode is LeaderboardMode.FAKE:
            board.reset_for_participant()
        scenario = replace(scen, rng_seed=seed + index)
        if spec.score is not None:
            scenario = replace(scenario, score=spec.score)
        agent = make_agent(spec.policy, Random(seed * 1_000_003 + index))
        engine = run_session(
            env,
            loco,
            scenario,
            spec.participant,
            agent,
            leaderboard=board,
            dt=dt,
            session_id=f"run_{deterministic_stamp(seed + index)}",
            created_at=deterministic_stamp(seed + index),
        )
        archive = build_archive(engine, leaderboard_mode=board.mode.value)
        session_dirs.append(write_session_archive(out_root, archive))
    return session_dirs
