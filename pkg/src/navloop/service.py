"""Live operator service: snapshots out, commands in.

One TCP listener serves two framings on the same port. A connection whose
first bytes look like an HTTP GET is upgraded to a WebSocket (for the
browser console); anything else is treated as raw newline-delimited JSON
(for scripts and tests). The payloads are identical either way.

Threading layout:
  - accept thread: hands sockets to per-connection reader/writer threads
  - reader threads: decode messages, answer hello, queue commands
  - writer threads: drain a per-connection outbox plus a latest-snapshot
    slot, so a slow client can only ever miss snapshots, never acks
  - runner thread: the only thread that touches the engine; applies queued
    commands between ticks and publishes snapshots

Because the engine is driven headlessly, the participant is played by a
simulated agent chosen at session start.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

from . import wsproto
from .agents import (
    AgentPolicy,
    KIND_FLY_CHASER,
    KIND_GOAL_SEEKER,
    Observation,
    make_agent,
)
from .engine import (
    DEFAULT_DT,
    AutoPilotPlan,
    ParticipantInfo,
    Phase,
    PhaseError,
    SessionEngine,
    autopilot_next,
)
from .persistence import (
    build_archive,
    load_leaderboard,
    load_settings_file,
    save_leaderboard,
    write_session_archive,
)
from .protocol import (
    Ack,
    Command,
    CMD_ABORT,
    CMD_ADD_NOTE,
    CMD_AUTOPILOT_NEXT,
    CMD_END_FEEDBACK,
    CMD_MARK_BAD,
    CMD_START_SESSION,
    CMD_SUBMIT_SURVEY,
    CMD_TOGGLE_LIGHT,
    CMD_TOGGLE_SOUND,
    ErrorMessage,
    Hello,
    Message,
    ProtocolError,
    ROLE_OPERATOR,
    ROLE_SPECTATOR,
    SessionInfo,
    Snapshot,
    Welcome,
    decode,
    encode,
)
from .scoring import Leaderboard, LeaderboardMode
from .settings import LocomotionSettings, validate_settings
from .surveys import builtin_survey_map

SNAPSHOT_EVERY_TICKS = 9  # at 90 Hz ticks this is ten snapshots per second


@dataclass
class SettingsCatalog:
    """Named settings files discovered in a directory.

    Files are grouped by basename: <name>.environment.json,
    <name>.locomotion.json, <name>.scenario.json form the entry <name>.
    """

    directory: Path
    environments: dict[str, Path] = field(default_factory=dict)
    locomotions: dict[str, Path] = field(default_factory=dict)
    scenarios: dict[str, Path] = field(default_factory=dict)

    @staticmethod
    def scan(directory: Path | str) -> "SettingsCatalog":
        directory = Path(directory)
        catalog = SettingsCatalog(directory)
        buckets = {
            ".environment": catalog.environments,
            ".locomotion": catalog.locomotions,
            ".scenario": catalog.scenarios,
        }
        if directory.is_dir():
            for path in sorted(directory.glob("*.json")):
                stem = path.name[: -len(".json")]
                for suffix, bucket in buckets.items():
                    if stem.endswith(suffix):
                        bucket[stem[: -len(suffix)]] = path
        return catalog

    def describe(self) -> dict:
        return {
            "environments": sorted(self.environments),
            "locomotions": sorted(self.locomotions),
            "scenarios": sorted(self.scenarios),
            "leaderboard_modes": [m.value for m in LeaderboardMode],
            "surveys": [d.to_dict() for d in builtin_survey_map().values()],
        }


class _Connection:
    _next_id = 0

    def __init__(self, sock: socket.socket):
        _Connection._next_id += 1
        self.id = _Connection._next_id
        self.sock = sock
        self.websocket = False
        self.role: str | None = None
        self.alive = True
        self.cond = threading.Condition()
        self.outbox: list[str] = []        # non-droppable, FIFO
        self.latest_snapshot: str | None = None
        self.latest_seq = -1
        self.sent_seq = -1

    def enqueue(self, message: Message) -> None:
        line = encode(message)
        with self.cond:
            self.outbox.append(line)
            self.cond.notify()

    def offer_snapshot(self, seq: int, line: str) -> None:
        with self.cond:
            self.latest_snapshot = line
            self.latest_seq = seq
            self.cond.notify()

    def close(self) -> None:
        with self.cond:
            self.alive = False
            self.cond.notify()
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


class OperatorService:
    def __init__(
        self,
        settings_dir: Path | str,
        out_dir: Path | str,
        host: str = "127.0.0.1",
        port: int = 0,
        autopilot: AutoPilotPlan | None = None,
        realtime: bool = True,
        dt: float = DEFAULT_DT,
        snapshot_every: int = SNAPSHOT_EVERY_TICKS,
    ):
        self.catalog = SettingsCatalog.scan(settings_dir)
        self.out_dir = Path(out_dir)
        self.host = host
        self.port = port
        self.autopilot = autopilot
        self.realtime = realtime
        self.dt = dt
        self.snapshot_every = max(1, snapshot_every)

        self.engine: SessionEngine | None = None
        self.agent = None
        self.board: Leaderboard | None = None
        self.session_info: SessionInfo | None = None
        self._finalized = True
        self._auto_counter = 0

        self.command_queue: "queue.Queue[tuple[_Connection, Command]]" = queue.Queue()
        self.connections: list[_Connection] = []
        self.operator: _Connection | None = None
        self._lock = threading.Lock()
        self._running = False
        self._seq = 0
        self._listener: socket.socket | None = None
        self._threads: list[threading.Thread] = []

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        self._listener = socket.create_server((self.host, self.port))
        self.port = self._listener.getsockname()[1]
        self._running = True
        self._spawn(self._accept_loop, "accept")
        self._spawn(self._runner_loop, "runner")

    def stop(self) -> None:
        self._running = False
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        with self._lock:
            conns = list(self.connections)
        for conn in conns:
            conn.close()
        for thread in self._threads:
            thread.join(timeout=2.0)

    def _spawn(self, target, name: str, *args) -> None:
        thread = threading.Thread(target=target, args=args, name=f"navloop-{name}", daemon=True)
        thread.start()
        self._threads.append(thread)

    # -- accept / io --------------------------------------------------------

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while self._running:
            try:
                sock, _addr = self._listener.accept()
            except OSError:
                return
            conn = _Connection(sock)
            with self._lock:
                self.connections.append(conn)
            self._spawn(self._reader_loop, f"read-{conn.id}", conn)
            self._spawn(self._writer_loop, f"write-{conn.id}", conn)

    def _writer_loop(self, conn: _Connection) -> None:
        while True:
            with conn.cond:
                while conn.alive and not conn.outbox and conn.sent_seq >= conn.latest_seq:
                    conn.cond.wait(timeout=0.5)
                if not conn.alive:
                    return
                lines = conn.outbox[:]
                conn.outbox.clear()
                snapshot = None
                if conn.latest_seq > conn.sent_seq and conn.latest_snapshot is not None:
                    snapshot = conn.latest_snapshot
                    conn.sent_seq = conn.latest_seq
            try:
                for line in lines:
                    self._send_line(conn, line)
                if snapshot is not None:
                    self._send_line(conn, snapshot)
            except OSError:
                self._drop(conn)
                return

    def _send_line(self, conn: _Connection, line: str) -> None:
        if conn.websocket:
            conn.sock.sendall(wsproto.encode_text(line))
        else:
            conn.sock.sendall(line.encode("utf-8"))

    def _reader_loop(self, conn: _Connection) -> None:
        try:
            buffer = conn.sock.recv(4096)
            if not buffer:
                self._drop(conn)
                return
            if buffer.startswith(b"GET "):
                buffer = self._websocket_upgrade(conn, buffer)
                if buffer is None:
                    return
                self._websocket_read(conn, buffer)
            else:
                self._raw_read(conn, buffer)
        except OSError:
            pass
        finally:
            self._drop(conn)

    def _websocket_upgrade(self, conn: _Connection, buffer: bytes) -> bytes | None:
        while b"\r\n\r\n" not in buffer:
            chunk = conn.sock.recv(4096)
            if not chunk:
                return None
            buffer += chunk
        head, _, rest = buffer.partition(b"\r\n\r\n")
        try:
            response = wsproto.handshake_response(head + b"\r\n\r\n")
        except wsproto.HandshakeError:
            conn.sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            return None
        conn.sock.sendall(response)
        conn.websocket = True
        return rest

    def _raw_read(self, conn: _Connection, buffer: bytes) -> None:
        while True:
            while b"\n" in buffer:
                line, _, buffer = buffer.partition(b"\n")
                if line.strip():
                    self._handle_line(conn, line)
            chunk = conn.sock.recv(4096)
            if not chunk:
                return
            buffer += chunk

    def _websocket_read(self, conn: _Connection, buffer: bytes) -> None:
        pending = b""
        while True:
            frames, buffer = wsproto.decode_frames(buffer)
            for opcode, payload in frames:
                if opcode == wsproto.OP_CLOSE:
                    try:
                        conn.sock.sendall(wsproto.encode_close())
                    except OSError:
                        pass
                    return
                if opcode == wsproto.OP_PING:
                    conn.sock.sendall(wsproto.encode_frame(payload, wsproto.OP_PONG))
                    continue
                if opcode in (wsproto.OP_TEXT, wsproto.OP_BINARY):
                    pending += payload
                    while b"\n" in pending:
                        line, _, pending = pending.partition(b"\n")
                        if line.strip():
                            self._handle_line(conn, line)
            chunk = conn.sock.recv(4096)
            if not chunk:
                return
            buffer += chunk

    def _handle_line(self, conn: _Connection, line: bytes) -> None:
        try:
            message = decode(line)
        except ProtocolError as exc:
            conn.enqueue(ErrorMessage(message=str(exc)))
            return
        if isinstance(message, Hello):
            self._handle_hello(conn, message)
        elif isinstance(message, Command):
            if conn.role is None:
                conn.enqueue(ErrorMessage(message="say hello first"))
            elif conn.role != ROLE_OPERATOR:
                conn.enqueue(Ack(command_id=message.command_id, ok=False, error="read-only connection"))
            else:
                self.command_queue.put((conn, message))
        else:
            conn.enqueue(ErrorMessage(message=f"unexpected message type '{type(message).__name__}'"))

    def _handle_hello(self, conn: _Connection, hello: Hello) -> None:
        if conn.role is not None:
            conn.enqueue(ErrorMessage(message="already greeted"))
            return
        if hello.role == ROLE_OPERATOR:
            with self._lock:
                if self.operator is not None and self.operator.alive:
                    conn.enqueue(ErrorMessage(message="operator seat occupied"))
                    # Give the writer a moment to flush, then drop the socket.
                    threading.Timer(0.2, conn.close).start()
                    return
                self.operator = conn
        elif hello.role != ROLE_SPECTATOR:
            conn.enqueue(ErrorMessage(message=f"unknown role '{hello.role}'"))
            return
        conn.role = hello.role
        active = self.engine is not None and self.engine.phase not in (Phase.ENDED, Phase.ABORTED)
        conn.enqueue(Welcome(catalog=self.catalog.describe(), session_active=active))
        if self.session_info is not None:
            conn.enqueue(self.session_info)

    def _drop(self, conn: _Connection) -> None:
        conn.close()
        with self._lock:
            if conn in self.connections:
                self.connections.remove(conn)
            if self.operator is conn:
                self.operator = None

    # -- engine loop --------------------------------------------------------

    def _runner_loop(self) -> None:
        ticks = 0
        last_phase: Phase | None = None
        while self._running:
            did_command = self._drain_commands()
            engine = self.engine
            progressed = False
            if engine is not None:
                try:
                    if engine.phase is Phase.IN_TRIAL and self.agent is not None:
                        obs = Observation(engine.pose, engine.fly_position(), engine.trial_clock)
                        ended = engine.tick(self.agent.act(obs), self.dt)
                        if ended:
                            self.agent.reset_trial()
                        progressed = True
                        ticks += 1
                    elif engine.phase is Phase.FEEDBACK_DISPLAY:
                        engine.feedback_tick(self.dt)
                        progressed = True
                        ticks += 1
                    elif engine.phase is Phase.BLOCK_TRANSITION:
                        engine.advance_block()
                    elif engine.phase in (Phase.ENDED, Phase.ABORTED):
                        self._finalize_session()
                except PhaseError:
                    pass
                phase = engine.phase
            else:
                phase = None
            if did_command or phase != last_phase or ticks % self.snapshot_every == 0:
                self._publish_snapshot()
                last_phase = phase
            if self.realtime:
                time.sleep(self.dt)
            elif not progressed:
                time.sleep(0.002)

    def _drain_commands(self) -> bool:
        did = False
        while True:
            try:
                conn, command = self.command_queue.get_nowait()
            except queue.Empty:
                return did
            did = True
            ack = self._apply_command(command)
            conn.enqueue(ack)

    def _apply_command(self, command: Command) -> Ack:
        try:
            detail = self._dispatch(command)
            return Ack(command_id=command.command_id, ok=True, detail=detail)
        except (PhaseError, ValueError, KeyError, OSError) as exc:
            return Ack(command_id=command.command_id, ok=False, error=str(exc))

    def _dispatch(self, command: Command) -> dict | None:
        kind = command.kind
        payload = command.payload
        engine = self.engine
        if kind == CMD_START_SESSION:
            return self._start_session(payload)
        if kind == CMD_AUTOPILOT_NEXT:
            return self._start_autopilot(payload)
        if engine is None:
            raise ValueError("no active session")
        if kind == CMD_TOGGLE_LIGHT:
            value = engine.toggle_light()
            return {"lights_on": value, "trial_clock": engine.trial_clock}
        if kind == CMD_TOGGLE_SOUND:
            value = engine.toggle_sound()
            return {"sound_on": value, "trial_clock": engine.trial_clock}
        if kind == CMD_ADD_NOTE:
            engine.add_note(str(payload.get("text", "")))
            return None
        if kind == CMD_MARK_BAD:
            engine.mark_bad()
            return None
        if kind == CMD_ABORT:
            engine.abort()
            self._finalize_session()
            return None
        if kind == CMD_SUBMIT_SURVEY:
            engine.record_response(
                str(payload.get("survey_id", "")), list(payload.get("answers", []))
            )
            return {"phase": engine.phase.value}
        if kind == CMD_END_FEEDBACK:
            engine.feedback_tick(self.dt, end_pressed=True)
            return {"phase": engine.phase.value}
        raise ValueError(f"unknown command kind '{kind}'")

    def _load_catalog_entry(self, payload: dict) -> tuple:
        env_name = str(payload.get("environment", "demo"))
        loco_name = str(payload.get("locomotion", env_name))
        scen_name = str(payload.get("scenario", env_name))
        if env_name not in self.catalog.environments:
            raise ValueError(f"unknown environment '{env_name}'")
        if loco_name not in self.catalog.locomotions:
            raise ValueError(f"unknown locomotion settings '{loco_name}'")
        if scen_name not in self.catalog.scenarios:
            raise ValueError(f"unknown scenario '{scen_name}'")
        env = load_settings_file(self.catalog.environments[env_name], "environment").value
        loco = load_settings_file(self.catalog.locomotions[loco_name], "locomotion").value
        scen = load_settings_file(self.catalog.scenarios[scen_name], "scenario").value
        if "method" in payload:
            loco = LocomotionSettings(**{**loco.to_dict(), "method": str(payload["method"])})
        return env, loco, scen

    def _start_session(self, payload: dict) -> dict:
        if self.engine is not None and self.engine.phase not in (Phase.ENDED, Phase.ABORTED):
            raise ValueError("a session is already running")
        participant_data = payload.get("participant", {})
        if not isinstance(participant_data, dict) or not str(participant_data.get("id", "")):
            raise ValueError("participant id is required")
        participant = ParticipantInfo.from_dict(participant_data)
        env, loco, scen = self._load_catalog_entry(payload)
        report = validate_settings(env, loco, scen)
        if report:
            raise ValueError("invalid settings: " + "; ".join(report))

        mode = LeaderboardMode(str(payload.get("leaderboard_mode", "Real")))
        board = load_leaderboard(self.out_dir / "leaderboard.json", mode)
        if mode is LeaderboardMode.FAKE:
            board.reset_for_participant()

        agent_data = payload.get("agent", {})
        kind = str(agent_data.get("kind", KIND_GOAL_SEEKER))
        if kind not in (KIND_GOAL_SEEKER, KIND_FLY_CHASER):
            raise ValueError(f"unknown agent kind '{kind}'")
        policy = AgentPolicy(
            kind=kind,
            observation_noise=float(agent_data.get("observation_noise", 0.0)),
            stop_radius=float(agent_data.get("stop_radius", 0.3)),
            observe_ticks=int(agent_data.get("observe_ticks", 120)),
            speed_preference=float(agent_data.get("speed_preference", 0.0)),
        )
        agent = make_agent(policy, Random(scen.rng_seed ^ 0x5EED))

        created_at = time.strftime("%Y%m%dT%H%M%SZ", time.gmtime())
        session_id = f"{created_at}_{participant.id}"
        engine = SessionEngine(
            env, loco, scen, participant,
            leaderboard=board,
            session_id=session_id,
            created_at=created_at,
        )
        engine.start()
        self.engine = engine
        self.agent = agent
        self.board = board
        self._finalized = False
        self.session_info = SessionInfo(
            session_id=session_id,
            participant=participant.to_dict(),
            room={
                "width": env.room_width,
                "depth": env.room_depth,
                "wall_height": env.wall_height,
            },
            goal={"x": scen.goal_position.x, "y": scen.goal_position.y, "z": scen.goal_position.z},
            start={
                "x": scen.start_pose.position.x,
                "z": scen.start_pose.position.z,
                "yaw": scen.start_pose.yaw,
            },
            max_trial_duration=scen.max_trial_duration,
            feedback_display_duration=scen.feedback_display_duration,
            trials_per_block=list(scen.trials_per_block),
            walls_present_per_block=list(env.walls_present_per_block),
            survey_definitions=[
                d.to_dict() for d in engine.surveys.values()
            ],
            leaderboard_mode=mode.value,
        )
        self._broadcast(self.session_info)
        self._publish_snapshot()
        return {"session_id": session_id}

    def _start_autopilot(self, payload: dict) -> dict:
        if self.autopilot is None:
            raise ValueError("no autopilot plan loaded")
        step = autopilot_next(self.autopilot)
        if step is None:
            raise ValueError("autopilot plan exhausted")
        env_ref, method, self.autopilot = step
        self._auto_counter += 1
        merged = {
            "participant": payload.get("participant", {"id": f"auto{self._auto_counter:02d}"}),
            "environment": env_ref,
            "locomotion": env_ref,
            "scenario": env_ref,
            "method": method,
            "leaderboard_mode": payload.get("leaderboard_mode", "Fake"),
            "agent": payload.get("agent", {}),
        }
        detail = self._start_session(merged)
        detail["remaining"] = len(self.autopilot.pairs) - self.autopilot.cursor
        return detail

    def _finalize_session(self) -> None:
        engine = self.engine
        if engine is None or self._finalized:
            return
        self._finalized = True
        archive = build_archive(
            engine,
            leaderboard_mode=self.board.mode.value if self.board else "Real",
            created_at=engine.created_at,
        )
        write_session_archive(self.out_dir, archive)
        if self.board is not None and self.board.mode is LeaderboardMode.REAL:
            save_leaderboard(self.board, self.out_dir / "leaderboard.json")

    # -- snapshots ----------------------------------------------------------

    def _publish_snapshot(self) -> None:
        self._seq += 1
        snapshot = self._build_snapshot(self._seq)
        line = encode(snapshot)
        with self._lock:
            conns = list(self.connections)
        for conn in conns:
            if conn.role is not None:
                conn.offer_snapshot(snapshot.seq, line)

    def _build_snapshot(self, seq: int) -> Snapshot:
        engine = self.engine
        if engine is None:
            return Snapshot(seq=seq, phase=Phase.IDLE.value)
        fly = engine.fly_position()
        last_trial = None
        if engine.records:
            record = engine.records[-1]
            last_trial = {
                "block_index": record.block_index,
                "trial_index": record.trial_index,
                "t": record.t,
                "d": record.d,
                "score": record.displayed_score,
                "end_reason": record.end_reason.value,
            }
        leaderboard = None
        if engine.leaderboard is not None:
            placement = engine.last_placement
            leaderboard = {
                "mode": engine.leaderboard.mode.value,
                "entries": [
                    {"participant_id": e.participant_id, "score": e.score}
                    for e in engine.leaderboard.view()
                ],
            }
            if placement is not None:
                leaderboard["placement"] = {
                    "score": placement.score,
                    "rank": placement.rank,
                    "is_new_high": placement.is_new_high,
                    "below_board": placement.below_board,
                    "practice": placement.practice,
                }
        pending = engine.pending_surveys[0].id if engine.pending_surveys else None
        return Snapshot(
            seq=seq,
            session_id=engine.session_id,
            phase=engine.phase.value,
            block_index=engine.block_index,
            trial_index=engine.trial_index,
            trial_clock=engine.trial_clock,
            pose={
                "x": engine.pose.position.x,
                "z": engine.pose.position.z,
                "yaw": engine.pose.yaw,
            },
            fly={"x": fly.x, "y": fly.y, "z": fly.z},
            lights_on=engine.lights_on,
            sound_on=engine.sound_on,
            walls_present=engine.walls_present,
            bad_session=engine.bad_session,
            last_trial=last_trial,
            leaderboard=leaderboard,
            pending_survey=pending,
        )

    def _broadcast(self, message: Message) -> None:
        with self._lock:
            conns = list(self.connections)
        for conn in conns:
            if conn.role is not None:
                conn.enqueue(message)


def load_autopilot_plan(path: Path | str) -> AutoPilotPlan:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    pairs = tuple((str(env), str(method)) for env, method in data["pairs"])
    return AutoPilotPlan(pairs=pairs)
