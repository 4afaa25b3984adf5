"""Reading and writing settings files and per-session log artifacts.

Settings are JSON documents. Per-session output is a directory tree:

    <out>/<participantId>/<sessionId>/
        settings/environment.json
        settings/locomotion.json
        settings/scenario.json
        session.json          participant particulars, bad flag, survey responses
        trials/trial_001.csv  one movement log per trial, numbered across blocks
        results.csv           one row per trial
        notes.txt             timestamped operator notes

Serialization is canonical: object keys are written in a fixed order and
CSV floats use fixed 6-decimal formatting, so writing, reading, and writing
again produces byte-identical files. That property is what makes replay
verification possible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .engine import FrameLogEntry, ParticipantInfo, SessionEngine, TrialRecord
from .scoring import Leaderboard, LeaderboardEntry, LeaderboardMode
from .settings import (
    EnvironmentSettings,
    LocomotionSettings,
    ScenarioSettings,
    environment_from_dict,
    locomotion_from_dict,
    scenario_from_dict,
)
from .surveys import SurveyResponse, survey_response_from_dict

MOVEMENT_LOG_HEADER = "t,x,z,yaw,lights,sound"
RESULTS_HEADER = (
    "block,trial,t,d,time_component,distance_component,reward,score,end_reason,path_length"
)

SETTINGS_PARSERS = {
    "environment": environment_from_dict,
    "locomotion": locomotion_from_dict,
    "scenario": scenario_from_dict,
}


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" at line {line} column {column}" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ArchiveError(RuntimeError):
    """A session directory is missing or has a corrupt artifact."""

    def __init__(self, artifact: str, message: str):
        super().__init__(message)
        self.artifact = artifact


@dataclass(frozen=True)
class ParseResult:
    value: Any
    warnings: tuple[str, ...]


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def parse_settings(text: str | bytes, kind: str) -> ParseResult:
    """Parse one settings document; absent keys get defaults, unknown keys warn."""
    if kind not in SETTINGS_PARSERS:
        raise ValueError(f"unknown settings kind '{kind}'")
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed {kind} settings: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise ParseError(f"{kind} settings must be a JSON object, got {type(data).__name__}")
    warnings: list[str] = []
    value = SETTINGS_PARSERS[kind](data, warnings)
    return ParseResult(value=value, warnings=tuple(warnings))


def load_settings_file(path: Path | str, kind: str) -> ParseResult:
    return parse_settings(Path(path).read_text(encoding="utf-8"), kind)


@dataclass(frozen=True)
class ResultRow:
    """One line of results.csv; a TrialRecord without its frames."""

    block: int
    trial: int
    t: float
    d: float
    time_component: float
    distance_component: float
    reward: float
    score: int
    end_reason: str
    path_length: float


def result_row_from_record(record: TrialRecord) -> ResultRow:
    return ResultRow(
        block=record.block_index,
        trial=record.trial_index,
        t=record.t,
        d=record.d,
        time_component=record.time_component,
        distance_component=record.distance_component,
        reward=record.reward,
        score=record.displayed_score,
        end_reason=record.end_reason.value,
        path_length=record.path_length,
    )


@dataclass(frozen=True)
class SessionArchive:
    """Everything persisted for one session, reconstructable from disk."""

    environment: EnvironmentSettings
    locomotion: LocomotionSettings
    scenario: ScenarioSettings
    participant: ParticipantInfo
    session_id: str
    created_at: str
    leaderboard_mode: str
    bad_session: bool
    survey_responses: tuple[SurveyResponse, ...]
    trial_results: tuple[ResultRow, ...]
    movement_logs: tuple[tuple[FrameLogEntry, ...], ...]
    notes: tuple[tuple[float, str], ...]


def build_archive(
    engine: SessionEngine, leaderboard_mode: str = "Real", created_at: str = ""
) -> SessionArchive:
    """Collect a finished (or aborted) engine's outputs into an archive value."""
    return SessionArchive(
        environment=engine.env,
        locomotion=engine.loco,
        scenario=engine.scen,
        participant=engine.participant,
        session_id=engine.session_id,
        created_at=created_at or engine.created_at,
        leaderboard_mode=leaderboard_mode,
        bad_session=engine.bad_session,
        survey_responses=tuple(engine.responses),
        trial_results=tuple(result_row_from_record(r) for r in engine.records),
        movement_logs=tuple(r.frames for r in engine.records),
        notes=tuple(engine.notes),
    )


def _format_movement_rows(frames: tuple[FrameLogEntry, ...]) -> str:
    lines = [MOVEMENT_LOG_HEADER]
    for e in frames:
        lines.append(
            f"{e.t:.6f},{e.x:.6f},{e.z:.6f},{e.yaw:.6f},"
            f"{1 if e.lights_on else 0},{1 if e.sound_on else 0}"
        )
    return "\n".join(lines) + "\n"


def _format_results(rows: tuple[ResultRow, ...]) -> str:
    lines = [RESULTS_HEADER]
    for r in rows:
        lines.append(
            f"{r.block},{r.trial},{r.t:.6f},{r.d:.6f},{r.time_component:.6f},"
            f"{r.distance_component:.6f},{r.reward:.6f},{r.score},{r.end_reason},"
            f"{r.path_length:.6f}"
        )
    return "\n".join(lines) + "\n"


def _format_notes(notes: tuple[tuple[float, str], ...]) -> str:
    # One note per line; newlines inside a note would break the format.
    lines = [f"{t:.6f}\t{text}".replace("\n", " ") for t, text in notes]
    return "".join(line + "\n" for line in lines)


def _session_meta_dict(archive: SessionArchive) -> dict[str, Any]:
    return {
        "session_id": archive.session_id,
        "created_at": archive.created_at,
        "participant": archive.participant.to_dict(),
        "leaderboard_mode": archive.leaderboard_mode,
        "bad_session": archive.bad_session,
        "survey_responses": [r.to_dict() for r in archive.survey_responses],
    }


def write_session_archive(out_root: Path | str, archive: SessionArchive) -> Path:
    """Write all artifacts; returns the session directory."""
    session_dir = Path(out_root) / archive.participant.id / archive.session_id
    (session_dir / "settings").mkdir(parents=True, exist_ok=True)
    (session_dir / "trials").mkdir(parents=True, exist_ok=True)

    (session_dir / "settings" / "environment.json").write_text(
        canonical_json(archive.environment.to_dict()), encoding="utf-8"
    )
    (session_dir / "settings" / "locomotion.json").write_text(
        canonical_json(archive.locomotion.to_dict()), encoding="utf-8"
    )
    (session_dir / "settings" / "scenario.json").write_text(
        canonical_json(archive.scenario.to_dict()), encoding="utf-8"
    )
    (session_dir / "session.json").write_text(
        canonical_json(_session_meta_dict(archive)), encoding="utf-8"
    )
    for i, frames in enumerate(archive.movement_logs):
        (session_dir / "trials" / f"trial_{i + 1:03d}.csv").write_text(
            _format_movement_rows(frames), encoding="utf-8"
        )
    (session_dir / "results.csv").write_text(
        _format_results(archive.trial_results), encoding="utf-8"
    )
    (session_dir / "notes.txt").write_text(_format_notes(archive.notes), encoding="utf-8")
    return session_dir


def _read_text(session_dir: Path, relative: str, artifact: str) -> str:
    path = session_dir / relative
    if not path.is_file():
        raise ArchiveError(artifact, f"missing {artifact} artifact: {path}")
    return path.read_text(encoding="utf-8")


def _parse_movement_log(text: str, path: Path) -> tuple[FrameLogEntry, ...]:
    lines = text.splitlines()
    if not lines or lines[0] != MOVEMENT_LOG_HEADER:
        raise ArchiveError("movement log", f"bad header in {path}")
    frames = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 6:
            raise ArchiveError("movement log", f"bad row in {path}: {line!r}")
        frames.append(
            FrameLogEntry(
                t=float(parts[0]),
                x=float(parts[1]),
                z=float(parts[2]),
                yaw=float(parts[3]),
                lights_on=parts[4] == "1",
                sound_on=parts[5] == "1",
            )
        )
    return tuple(frames)


def _parse_results(text: str, path: Path) -> tuple[ResultRow, ...]:
    lines = text.splitlines()
    if not lines or lines[0] != RESULTS_HEADER:
        raise ArchiveError("trial results", f"bad header in {path}")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 10:
            raise ArchiveError("trial results", f"bad row in {path}: {line!r}")
        rows.append(
            ResultRow(
                block=int(parts[0]),
                trial=int(parts[1]),
                t=float(parts[2]),
                d=float(parts[3]),
                time_component=float(parts[4]),
                distance_component=float(parts[5]),
                reward=float(parts[6]),
                score=int(parts[7]),
                end_reason=parts[8],
                path_length=float(parts[9]),
            )
        )
    return tuple(rows)


def _parse_notes(text: str) -> tuple[tuple[float, str], ...]:
    notes = []
    for line in text.splitlines():
        stamp, _, body = line.partition("\t")
        notes.append((float(stamp), body))
    return tuple(notes)


def read_session_archive(session_dir: Path | str) -> SessionArchive:
    """Reconstruct an archive from disk; unrelated extra files are ignored."""
    session_dir = Path(session_dir)
    if not session_dir.is_dir():
        raise ArchiveError("session directory", f"not a directory: {session_dir}")

    environment = parse_settings(
        _read_text(session_dir, "settings/environment.json", "environment settings"),
        "environment",
    ).value
    locomotion = parse_settings(
        _read_text(session_dir, "settings/locomotion.json", "locomotion settings"),
        "locomotion",
    ).value
    scenario = parse_settings(
        _read_text(session_dir, "settings/scenario.json", "scenario settings"),
        "scenario",
    ).value

    meta_text = _read_text(session_dir, "session.json", "session metadata")
    try:
        meta = json.loads(meta_text)
    except json.JSONDecodeError as exc:
        raise ArchiveError("session metadata", f"corrupt session.json: {exc.msg}") from exc

    trials_dir = session_dir / "trials"
    if not trials_dir.is_dir():
        raise ArchiveError("movement logs", f"missing trials directory: {trials_dir}")
    log_paths = sorted(trials_dir.glob("trial_*.csv"))
    movement_logs = tuple(
        _parse_movement_log(p.read_text(encoding="utf-8"), p) for p in log_paths
    )

    results = _parse_results(
        _read_text(session_dir, "results.csv", "trial results"), session_dir / "results.csv"
    )
    notes = _parse_notes(_read_text(session_dir, "notes.txt", "notes"))

    return SessionArchive(
        environment=environment,
        locomotion=locomotion,
        scenario=scenario,
        participant=ParticipantInfo.from_dict(meta["participant"]),
        session_id=str(meta["session_id"]),
        created_at=str(meta["created_at"]),
        leaderboard_mode=str(meta["leaderboard_mode"]),
        bad_session=bool(meta["bad_session"]),
        survey_responses=tuple(
            survey_response_from_dict(r) for r in meta.get("survey_responses", [])
        ),
        trial_results=results,
        movement_logs=movement_logs,
        notes=notes,
    )


def list_session_dirs(out_root: Path | str) -> list[Path]:
    """All session directories under an output root, sorted for determinism."""
    root = Path(out_root)
    if not root.is_dir():
        return []
    found = [
        session
        for participant in sorted(root.iterdir())
        if participant.is_dir()
        for session in sorted(participant.iterdir())
        if (session / "session.json").is_file()
    ]
    return found


def load_leaderboard(path: Path | str, mode: LeaderboardMode) -> Leaderboard:
    """Load a board file if present; the loaded entries become the snapshot."""
    path = Path(path)
    entries: list[LeaderboardEntry] = []
    if path.is_file():
        data = json.loads(path.read_text(encoding="utf-8"))
        entries = [
            LeaderboardEntry(
                participant_id=str(e["participant_id"]),
                score=int(e["score"]),
                timestamp=float(e.get("timestamp", 0.0)),
            )
            for e in data.get("entries", [])
        ]
    board = Leaderboard(mode=mode, entries=entries)
    return board.with_snapshot()


def save_leaderboard(board: Leaderboard, path: Path | str) -> None:
    """Persist board entries. Callers must not invoke this for fake boards;
    the whole point of fake mode is that the disk state never moves."""
    if board.mode is LeaderboardMode.FAKE:
        raise ValueError("fake leaderboards are never written back to disk")
    payload = {
        "entries": [
            {"participant_id": e.participant_id, "score": e.score, "timestamp": e.timestamp}
            for e in board.entries
        ]
    }
    Path(path).write_text(canonical_json(payload), encoding="utf-8")
