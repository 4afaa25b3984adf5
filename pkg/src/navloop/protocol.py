"""Wire protocol for the operator service.

Messages are single-line JSON objects separated by newlines. Every message
carries a "type" discriminator; remaining keys follow the field order of
the dataclasses below. Optional fields equal to None are omitted from the
wire and come back as None, so decode(encode(m)) == m for every message.
The exact schema is documented in docs/protocol.md.

This module is transport-agnostic: the same payloads travel over a raw TCP
stream or inside WebSocket text frames for browsers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from typing import Any

ROLE_OPERATOR = "operator"
ROLE_SPECTATOR = "spectator"

CMD_START_SESSION = "StartSession"
CMD_TOGGLE_LIGHT = "ToggleLight"
CMD_TOGGLE_SOUND = "ToggleSound"
CMD_ADD_NOTE = "AddNote"
CMD_MARK_BAD = "MarkBad"
CMD_ABORT = "Abort"
CMD_SUBMIT_SURVEY = "SubmitSurvey"
CMD_END_FEEDBACK = "EndFeedback"
CMD_AUTOPILOT_NEXT = "AutopilotNext"

COMMAND_KINDS = (
    CMD_START_SESSION,
    CMD_TOGGLE_LIGHT,
    CMD_TOGGLE_SOUND,
    CMD_ADD_NOTE,
    CMD_MARK_BAD,
    CMD_ABORT,
    CMD_SUBMIT_SURVEY,
    CMD_END_FEEDBACK,
    CMD_AUTOPILOT_NEXT,
)


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class Hello:
    """First client message; one operator at a time, any number of spectators."""

    role: str = ROLE_OPERATOR


@dataclass(frozen=True)
class Welcome:
    """Server reply to hello: what this service can start sessions with."""

    catalog: dict[str, Any] = field(default_factory=dict)
    session_active: bool = False


@dataclass(frozen=True)
class SessionInfo:
    """Static facts about the running session, sent once on start and to
    late joiners. Everything a client needs to render without asking again:
    room geometry, trial structure, and full survey definitions."""

    session_id: str = ""
    participant: dict[str, Any] = field(default_factory=dict)
    room: dict[str, float] = field(default_factory=dict)
    goal: dict[str, float] = field(default_factory=dict)
    start: dict[str, float] = field(default_factory=dict)
    max_trial_duration: float = 0.0
    feedback_display_duration: float = 0.0
    trials_per_block: list[int] = field(default_factory=list)
    walls_present_per_block: list[bool] = field(default_factory=list)
    survey_definitions: list[dict[str, Any]] = field(default_factory=list)
    leaderboard_mode: str = "Real"


@dataclass(frozen=True)
class Command:
    """Operator request. command_id is chosen by the client and echoed in
    the ack so requests and outcomes can be matched up."""

    command_id: int = 0
    kind: str = ""
    payload: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Ack:
    command_id: int = 0
    ok: bool = True
    error: str | None = None
    detail: dict[str, Any] | None = None  # per-kind extras, e.g. applied-at clock


@dataclass(frozen=True)
class Snapshot:
    """Periodic state report. Snapshots are droppable; only the latest one
    matters, and seq increases by the server's publish count so a client
    can notice it skipped some."""

    seq: int = 0
    session_id: str = ""
    phase: str = "Idle"
    block_index: int = 0
    trial_index: int = 0
    trial_clock: float = 0.0
    pose: dict[str, float] = field(default_factory=dict)
    fly: dict[str, float] = field(default_factory=dict)
    lights_on: bool = True
    sound_on: bool = True
    walls_present: bool = True
    bad_session: bool = False
    last_trial: dict[str, Any] | None = None
    leaderboard: dict[str, Any] | None = None
    pending_survey: str | None = None


@dataclass(frozen=True)
class ErrorMessage:
    message: str = ""


MESSAGE_TYPES: dict[str, type] = {
    "hello": Hello,
    "welcome": Welcome,
    "session_info": SessionInfo,
    "command": Command,
    "ack": Ack,
    "snapshot": Snapshot,
    "error": ErrorMessage,
}

_TYPE_NAMES = {cls: name for name, cls in MESSAGE_TYPES.items()}

Message = Hello | Welcome | SessionInfo | Command | Ack | Snapshot | ErrorMessage


def encode(message: Message) -> str:
    """One JSON line, newline terminated. None-valued fields are omitted."""
    cls = type(message)
    name = _TYPE_NAMES.get(cls)
    if name is None:
        raise ProtocolError(f"not a protocol message: {cls.__name__}")
    body: dict[str, Any] = {"type": name}
    for f in fields(cls):
        value = getattr(message, f.name)
        if value is None:
            continue
        body[f.name] = value
    return json.dumps(body, separators=(",", ":")) + "\n"


def decode(line: str | bytes) -> Message:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed message: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ProtocolError(f"message must be an object, got {type(data).__name__}")
    type_name = data.get("type")
    if not isinstance(type_name, str):
        raise ProtocolError("message has no type")
    cls = MESSAGE_TYPES.get(type_name)
    if cls is None:
        raise ProtocolError(f"unknown message type '{type_name}'")
    known = {f.name for f in fields(cls)}
    kwargs = {k: v for k, v in data.items() if k in known}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ProtocolError(f"bad fields for '{type_name}': {exc}") from exc
