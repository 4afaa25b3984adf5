"""The trial, block, session state machine.

One engine instance runs one participant through one session: a sequence of
blocks, each a sequence of trials. A trial advances by fixed-timestep ticks
fed with tracked input; when it ends, the delayed reward is computed and
shown, then the next trial begins from a freshly reset scene. Block
boundaries administer any configured surveys before moving on.

The engine is deliberately single threaded. Operator commands (toggles,
notes, abort) must be applied between ticks by whoever owns the loop; the
engine itself never blocks and never touches a socket or a file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from random import Random

from .core import FrameInput, Pose, Vec3, heading_vector, horizontal_distance
from .firefly import FireflyState, firefly_advance, firefly_init
from .locomotion import (
    HeadBobState,
    SafeArea,
    WalkLockState,
    World,
    aim_from_pose,
    apply_teleport,
    arm_swing_speed,
    head_bob_step,
    physical_walk_step,
    teleop_step,
    teleport_resolve,
)
from .scoring import Leaderboard, Placement, displayed_score, raw_reward
from .settings import (
    METHOD_ARM_SWING,
    METHOD_CONTROLLER_TELEOP,
    METHOD_HEAD_BOB,
    METHOD_KEYBOARD_TELEOP,
    METHOD_PHYSICAL_WALK,
    METHOD_TELEPORT,
    EnvironmentSettings,
    LocomotionSettings,
    ScenarioSettings,
    validate_settings,
)
from .surveys import (
    ADMINISTER_POST_BLOCK,
    ADMINISTER_POST_SESSION,
    SurveyDefinition,
    SurveyResponse,
    builtin_survey_map,
    validate_answers,
)

DEFAULT_DT = 1.0 / 90.0  # seconds; the demo headset refreshed at about 90 Hz
DEFAULT_EYE_HEIGHT = 1.5  # meters, used when the input carries no head height


class Phase(Enum):
    IDLE = "Idle"
    IN_TRIAL = "InTrial"
    FEEDBACK_DISPLAY = "FeedbackDisplay"
    SURVEY_PENDING = "SurveyPending"
    BLOCK_TRANSITION = "BlockTransition"
    ENDED = "Ended"
    ABORTED = "Aborted"


class EndReason(Enum):
    END_KEY = "EndKey"
    TIMEOUT = "Timeout"
    SKIPPED = "Skipped"


# The closed transition graph. Abort is reachable from everywhere; the
# BlockTransition to Ended edge exists only as the documented response to
# advancing past the final block.
ALLOWED_TRANSITIONS = frozenset(
    {
        (Phase.IDLE, Phase.IN_TRIAL),
        (Phase.IN_TRIAL, Phase.FEEDBACK_DISPLAY),
        (Phase.FEEDBACK_DISPLAY, Phase.IN_TRIAL),
        (Phase.FEEDBACK_DISPLAY, Phase.SURVEY_PENDING),
        (Phase.SURVEY_PENDING, Phase.BLOCK_TRANSITION),
        (Phase.SURVEY_PENDING, Phase.ENDED),
        (Phase.BLOCK_TRANSITION, Phase.IN_TRIAL),
        (Phase.BLOCK_TRANSITION, Phase.ENDED),
    }
    | {(phase, Phase.ABORTED) for phase in Phase}
)


class PhaseError(RuntimeError):
    """An operation was attempted in a phase that does not allow it."""


class SettingsError(ValueError):
    def __init__(self, report: list[str]):
        super().__init__("invalid settings: " + "; ".join(report))
        self.report = report


@dataclass(frozen=True)
class ParticipantInfo:
    id: str
    age: int = 0
    gender: str = ""
    qualification: str = ""
    group: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "age": self.age,
            "gender": self.gender,
            "qualification": self.qualification,
            "group": self.group,
        }

    @staticmethod
    def from_dict(data: dict) -> "ParticipantInfo":
        return ParticipantInfo(
            id=str(data["id"]),
            age=int(data.get("age", 0)),
            gender=str(data.get("gender", "")),
            qualification=str(data.get("qualification", "")),
            group=str(data.get("group", "")),
        )


@dataclass(frozen=True)
class FrameLogEntry:
    t: float       # seconds since trial start
    x: float       # meters
    z: float       # meters
    yaw: float     # degrees
    lights_on: bool
    sound_on: bool


@dataclass(frozen=True)
class TrialRecord:
    block_index: int
    trial_index: int
    start_time: float  # session clock at trial start
    end_time: float    # session clock at trial end
    t: float           # elapsed trial seconds
    d: float           # residual horizontal distance to the goal, meters
    reward: float
    time_component: float
    distance_component: float
    displayed_score: int
    end_reason: EndReason
    path_length: float  # meters actually covered over the trial
    frames: tuple[FrameLogEntry, ...]


@dataclass(frozen=True)
class AutoPilotPlan:
    """A preset sequence of environment and locomotion pairs."""

    pairs: tuple[tuple[str, str], ...]
    cursor: int = 0


def autopilot_next(plan: AutoPilotPlan) -> tuple[str, str, AutoPilotPlan] | None:
    """Pop the next pair, or None when the plan is exhausted."""
    if plan.cursor >= len(plan.pairs):
        return None
    env_ref, method = plan.pairs[plan.cursor]
    return env_ref, method, AutoPilotPlan(plan.pairs, plan.cursor + 1)


@dataclass
class _LocomotionRuntime:
    headbob: HeadBobState = field(default_factory=HeadBobState)
    walk: WalkLockState = field(default_factory=WalkLockState)
    prev_controllers: tuple[Pose, ...] | None = None
    step_carry: float = 0.0  # seconds of forward motion left from the last step
    prev_trigger: bool = False


class SessionEngine:
    """Runs one session; see the module docstring for the big picture."""

    def __init__(
        self,
        env: EnvironmentSettings,
        loco: LocomotionSettings,
        scen: ScenarioSettings,
        participant: ParticipantInfo,
        leaderboard: Leaderboard | None = None,
        surveys: dict[str, SurveyDefinition] | None = None,
        session_id: str = "",
        created_at: str = "",
        world: World | None = None,
    ):
        report = validate_settings(env, loco, scen)
        if report:
            raise SettingsError(report)
        if not participant.id:
            raise ValueError("participant id must not be empty")

        self.env = env
        self.loco = loco
        self.scen = scen
        self.participant = participant
        self.leaderboard = leaderboard
        self.session_id = session_id or f"session_{scen.rng_seed}"
        self.created_at = created_at
        self.world = world if world is not None else World(env.room_width, env.room_depth)

        known = builtin_survey_map()
        if surveys:
            known.update(surveys)
        # Only surveys the environment links to are administered.
        self.surveys: dict[str, SurveyDefinition] = {
            sid: known[sid] for sid in env.survey_links if sid in known
        }

        self.phase = Phase.IDLE
        self.block_index = 0
        self.trial_index = 0
        self.clock = 0.0        # seconds since session start
        self.trial_clock = 0.0  # seconds since trial start
        self.pose: Pose = scen.start_pose
        self.fly: FireflyState | None = None
        self.lights_on = env.lights_on
        self.sound_on = env.sound_on
        self.bad_session = False
        self.notes: list[tuple[float, str]] = []
        self.rng = Random(scen.rng_seed)
        self.frames: list[FrameLogEntry] = []
        self.records: list[TrialRecord] = []
        self.responses: list[SurveyResponse] = []
        self.pending_surveys: list[SurveyDefinition] = []
        self.feedback_clock = 0.0
        self.last_placement: Placement | None = None
        self.barrier_visible = False
        self.transitions: list[tuple[Phase, Phase]] = []
        self._trial_start_clock = 0.0
        self._loco_state = _LocomotionRuntime()

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        if self.phase is not Phase.IDLE:
            raise PhaseError(f"start requires Idle, engine is {self.phase.value}")
        self._begin_trial()
        self._set_phase(Phase.IN_TRIAL)

    def tick(self, frame: FrameInput, dt: float = DEFAULT_DT) -> list[TrialRecord]:
        """Advance one fixed timestep; returns the trial record if one ended."""
        if self.phase is not Phase.IN_TRIAL:
            raise PhaseError(f"tick requires InTrial, engine is {self.phase.value}")
        if dt <= 0:
            raise ValueError(f"dt must be > 0, got {dt}")

        self.clock += dt
        self.trial_clock += dt
        assert self.fly is not None
        self.fly = firefly_advance(
            self.fly, self.scen.goal_position, self._firefly_params(), self.rng
        )
        self._apply_locomotion(frame, dt)
        self.frames.append(
            FrameLogEntry(
                t=self.trial_clock,
                x=self.pose.position.x,
                z=self.pose.position.z,
                yaw=self.pose.yaw,
                lights_on=self.lights_on,
                sound_on=self.sound_on,
            )
        )

        if frame.end_trial_pressed:
            return [self.end_trial(EndReason.END_KEY)]
        if self.trial_clock >= self.scen.max_trial_duration:
            return [self.end_trial(EndReason.TIMEOUT)]
        if frame.skip_pressed:
            return [self.end_trial(EndReason.SKIPPED)]
        return []

    def end_trial(self, reason: EndReason) -> TrialRecord:
        if self.phase is not Phase.IN_TRIAL:
            raise PhaseError(f"end_trial requires InTrial, engine is {self.phase.value}")
        t = self.trial_clock
        d = horizontal_distance(self.pose.position, self.scen.goal_position)
        reward = raw_reward(t, d, self.scen.score)
        score = displayed_score(reward.total, self.scen.score)
        self.last_placement = None
        if self.leaderboard is not None and reason is not EndReason.SKIPPED:
            self.last_placement = self.leaderboard.submit(
                self.participant.id, score, timestamp=self.clock
            )
        record = TrialRecord(
            block_index=self.block_index,
            trial_index=self.trial_index,
            start_time=self._trial_start_clock,
            end_time=self.clock,
            t=t,
            d=d,
            reward=reward.total,
            time_component=reward.time_component,
            distance_component=reward.distance_component,
            displayed_score=score,
            end_reason=reason,
            path_length=self._path_length(),
            frames=tuple(self.frames),
        )
        self.records.append(record)
        self.frames = []
        self.feedback_clock = 0.0
        self._set_phase(Phase.FEEDBACK_DISPLAY)
        return record

    def feedback_tick(self, dt: float = DEFAULT_DT, end_pressed: bool = False) -> None:
        """Advance the feedback display; moves on after its duration or a press."""
        if self.phase is not Phase.FEEDBACK_DISPLAY:
            raise PhaseError(f"feedback_tick requires FeedbackDisplay, engine is {self.phase.value}")
        if dt <= 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        self.clock += dt
        self.feedback_clock += dt
        if end_pressed or self.feedback_clock >= self.scen.feedback_display_duration:
            self._after_feedback()

    def record_response(self, survey_id: str, answers) -> SurveyResponse:
        """Accept answers for one pending survey; advances once all are in."""
        if self.phase is not Phase.SURVEY_PENDING:
            raise PhaseError(f"record_response requires SurveyPending, engine is {self.phase.value}")
        definition = next((s for s in self.pending_surveys if s.id == survey_id), None)
        if definition is None:
            raise ValueError(f"survey '{survey_id}' is not pending")
        validate_answers(definition, answers)
        response = SurveyResponse(
            survey_id=survey_id,
            participant_id=self.participant.id,
            boundary=definition.administer_at,
            block_index=(
                self.block_index if definition.administer_at == ADMINISTER_POST_BLOCK else None
            ),
            answers=tuple(answers),
            timestamp=self.clock,
        )
        self.responses.append(response)
        self.pending_surveys.remove(definition)
        if not self.pending_surveys:
            self._after_surveys()
        return response

    def advance_block(self) -> None:
        if self.phase is not Phase.BLOCK_TRANSITION:
            raise PhaseError(f"advance_block requires BlockTransition, engine is {self.phase.value}")
        if self.block_index + 1 >= len(self.scen.trials_per_block):
            self._set_phase(Phase.ENDED)
            return
        self.block_index += 1
        self.trial_index = 0
        self._begin_trial()
        self._set_phase(Phase.IN_TRIAL)

    # -- operator actions --------------------------------------------------

    def toggle_light(self) -> bool:
        if self.phase in (Phase.ENDED, Phase.ABORTED):
            raise PhaseError(f"cannot toggle lights in {self.phase.value}")
        self.lights_on = not self.lights_on
        return self.lights_on

    def toggle_sound(self) -> bool:
        if self.phase in (Phase.ENDED, Phase.ABORTED):
            raise PhaseError(f"cannot toggle sound in {self.phase.value}")
        self.sound_on = not self.sound_on
        return self.sound_on

    def add_note(self, text: str) -> None:
        self.notes.append((self.clock, text))

    def mark_bad(self) -> None:
        # Monotone: once bad, always bad.
        self.bad_session = True

    def abort(self) -> None:
        if self.phase is Phase.ABORTED:
            return
        self.frames = []  # the partial trial is discarded, completed ones stay
        self.pending_surveys = []
        self.bad_session = True
        self._set_phase(Phase.ABORTED)

    # -- views -------------------------------------------------------------

    @property
    def walls_present(self) -> bool:
        return self.env.walls_present_per_block[self.block_index]

    @property
    def floor_extends(self) -> bool:
        return self.env.floor_extends_per_block[self.block_index]

    def fly_position(self) -> Vec3:
        return self.fly.position if self.fly is not None else self.scen.goal_position

    # -- internals ---------------------------------------------------------

    def _firefly_params(self):
        return self.scen.firefly_per_block[self.block_index]

    def _set_phase(self, new: Phase) -> None:
        self.transitions.append((self.phase, new))
        self.phase = new

    def _begin_trial(self) -> None:
        # The scene resets to the exact same configuration for every trial.
        self.pose = self.scen.start_pose
        self.fly = firefly_init(self.scen.goal_position, self._firefly_params(), self.rng)
        self.trial_clock = 0.0
        self.frames = []
        self._trial_start_clock = self.clock
        self._loco_state = _LocomotionRuntime()
        self.barrier_visible = False

    def _after_feedback(self) -> None:
        if self.trial_index + 1 < self.scen.trials_per_block[self.block_index]:
            self.trial_index += 1
            self._begin_trial()
            self._set_phase(Phase.IN_TRIAL)
            return
        # Block boundary. Surveys are administered here even when none are
        # configured, in which case the phase resolves immediately.
        last_block = self.block_index + 1 >= len(self.scen.trials_per_block)
        pending = [
            s for s in self.surveys.values() if s.administer_at == ADMINISTER_POST_BLOCK
        ]
        if last_block:
            pending += [
                s for s in self.surveys.values() if s.administer_at == ADMINISTER_POST_SESSION
            ]
        self.pending_surveys = pending
        self._set_phase(Phase.SURVEY_PENDING)
        if not pending:
            self._after_surveys()

    def _after_surveys(self) -> None:
        if self.block_index + 1 < len(self.scen.trials_per_block):
            self._set_phase(Phase.BLOCK_TRANSITION)
        else:
            self._set_phase(Phase.ENDED)

    def _path_length(self) -> float:
        total = 0.0
        prev = self.scen.start_pose.position
        for entry in self.frames:
            here = Vec3(entry.x, 0.0, entry.z)
            total += horizontal_distance(prev, here)
            prev = here
        return total

    def _apply_locomotion(self, frame: FrameInput, dt: float) -> None:
        method = self.loco.method
        if method in (METHOD_KEYBOARD_TELEOP, METHOD_CONTROLLER_TELEOP):
            disp = teleop_step(self.pose, frame, self.loco, dt)
            self._move_to(self.pose.position + disp, frame.hmd)
        elif method == METHOD_ARM_SWING:
            speed = 0.0
            if frame.controllers:
                prev = self._loco_state.prev_controllers or frame.controllers
                speed = arm_swing_speed(prev, frame.controllers, self.loco, dt)
                self._loco_state.prev_controllers = frame.controllers
            disp = heading_vector(frame.hmd.yaw).scaled(speed * dt)
            self._move_to(self.pose.position + disp, frame.hmd)
        elif method == METHOD_HEAD_BOB:
            self._loco_state.headbob, stepped = head_bob_step(
                self._loco_state.headbob, frame.hmd.position.y, frame.hmd.pitch, self.loco
            )
            if stepped:
                self._loco_state.step_carry = self.loco.step_carry_duration
            disp = Vec3()
            if self._loco_state.step_carry > 0:
                disp = heading_vector(frame.hmd.yaw).scaled(self.loco.linear_velocity * dt)
                self._loco_state.step_carry -= dt
            self._move_to(self.pose.position + disp, frame.hmd)
        elif method == METHOD_PHYSICAL_WALK:
            area = SafeArea(
                center=Vec3(),
                width=self.env.safe_area_width,
                depth=self.env.safe_area_depth,
            )
            virtual, barrier, self._loco_state.walk = physical_walk_step(
                frame.hmd, self._loco_state.walk, area, frame.trigger_held
            )
            self.pose = virtual
            self.barrier_visible = barrier
        elif method == METHOD_TELEPORT:
            rising = frame.trigger_held and not self._loco_state.prev_trigger
            self._loco_state.prev_trigger = frame.trigger_held
            position = self.pose.position
            if rising:
                eye = frame.hmd.position.y if frame.hmd.position.y > 0 else DEFAULT_EYE_HEIGHT
                origin = Pose(
                    position=Vec3(position.x, eye, position.z),
                    yaw=frame.hmd.yaw,
                    pitch=frame.hmd.pitch,
                )
                target = teleport_resolve(origin, aim_from_pose(frame.hmd), self.loco, self.world)
                if target.valid:
                    position = apply_teleport(origin, target).position
            self.pose = Pose(
                position=Vec3(position.x, 0.0, position.z),
                yaw=frame.hmd.yaw,
                pitch=frame.hmd.pitch,
            )
        else:
            raise ValueError(f"unknown locomotion method '{method}'")

    def _move_to(self, position: Vec3, hmd: Pose) -> None:
        self.pose = Pose(
            position=Vec3(position.x, 0.0, position.z),
            yaw=hmd.yaw,
            pitch=hmd.pitch,
        )


def start_session(
    env: EnvironmentSettings,
    loco: LocomotionSettings,
    scen: ScenarioSettings,
    participant: ParticipantInfo,
    leaderboard: Leaderboard | None = None,
    **kwargs,
) -> SessionEngine:
    """Construct an engine and enter the first trial."""
    engine = SessionEngine(env, loco, scen, participant, leaderboard, **kwargs)
    engine.start()
    return engine
