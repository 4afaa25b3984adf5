import { describe, expect, it } from "vitest";

import { Snapshot, SessionInfo } from "../src/protocol.js";
import { ConsoleState } from "../src/state.js";

function snap(seq: number, over: Partial<Snapshot> = {}): Snapshot {
  return {
    type: "snapshot",
    seq,
    session_id: "s1",
    phase: "InTrial",
    block_index: 0,
    trial_index: 0,
    trial_clock: seq * 0.1,
    pose: { x: seq * 0.5, z: 0, yaw: 90 },
    fly: { x: 1, y: 1, z: 1 },
    lights_on: true,
    sound_on: true,
    walls_present: true,
    bad_session: false,
    last_trial: null,
    leaderboard: null,
    pending_survey: null,
    ...over,
  };
}

function info(over: Partial<SessionInfo> = {}): SessionInfo {
  return {
    type: "session_info",
    session_id: "s1",
    participant: { id: "p1" },
    room: { width: 10, depth: 10, wall_height: 4 },
    goal: { x: -3, y: 0, z: -1 },
    start: { x: 4.5, z: 4.5, yaw: 225 },
    max_trial_duration: 120,
    feedback_display_duration: 10,
    trials_per_block: [15, 15],
    walls_present_per_block: [true, false],
    survey_definitions: [],
    leaderboard_mode: "Real",
    ...over,
  };
}

describe("ConsoleState", () => {
  it("starts with an idle view", () => {
    const state = new ConsoleState();
    const view = state.view();
    expect(view.phase).toBe("Idle");
    expect(view.status).toBe("connecting");
    expect(view.countdown).toBeNull();
    expect(view.trail).toEqual([]);
  });

  it("keeps the latest snapshot and drops stale ones", () => {
    const state = new ConsoleState();
    state.apply(snap(5));
    state.apply(snap(3)); // late arrival, must not regress
    state.apply(snap(5)); // duplicate
    expect(state.snapshot?.seq).toBe(5);
    state.apply(snap(6));
    expect(state.snapshot?.seq).toBe(6);
  });

  it("builds the trail ordered by seq, one point per accepted snapshot", () => {
    const state = new ConsoleState();
    for (const s of [1, 2, 4, 3, 5]) state.apply(snap(s));
    expect(state.trail.map((p) => p.seq)).toEqual([1, 2, 4, 5]);
    expect(state.trail.map((p) => p.x)).toEqual([0.5, 1, 2, 2.5]);
  });

  it("resets the trail when the trial changes", () => {
    const state = new ConsoleState();
    state.apply(snap(1));
    state.apply(snap(2));
    state.apply(snap(3, { trial_index: 1 }));
    expect(state.trail.map((p) => p.seq)).toEqual([3]);
  });

  it("resets the trail on a new session_info", () => {
    const state = new ConsoleState();
    state.apply(snap(1));
    state.apply(info());
    expect(state.trail).toEqual([]);
    expect(state.sessionActive).toBe(true);
  });

  it("only collects trail points while a trial runs", () => {
    const state = new ConsoleState();
    state.apply(snap(1));
    state.apply(snap(2, { phase: "FeedbackDisplay" }));
    expect(state.trail).toHaveLength(1);
  });

  it("derives the countdown from session info", () => {
    const state = new ConsoleState();
    state.apply(info());
    state.apply(snap(1, { trial_clock: 30 }));
    expect(state.view().countdown).toBe(90);
    state.apply(snap(2, { phase: "FeedbackDisplay", trial_clock: 30 }));
    expect(state.view().countdown).toBeNull();
  });

  it("tracks session activity from phase", () => {
    const state = new ConsoleState();
    state.apply({ type: "welcome", catalog: { environments: [] }, session_active: false });
    expect(state.sessionActive).toBe(false);
    state.apply(snap(1));
    expect(state.sessionActive).toBe(true);
    state.apply(snap(2, { phase: "Ended" }));
    expect(state.sessionActive).toBe(false);
  });

  it("turns failed acks and errors into toasts", () => {
    const state = new ConsoleState();
    state.apply({ type: "ack", command_id: 1, ok: true, error: null, detail: null });
    state.apply({ type: "ack", command_id: 2, ok: false, error: "no active session", detail: null });
    state.apply({ type: "error", message: "say hello first" });
    const toasts = state.takeToasts();
    expect(toasts.map((t) => t.text)).toEqual(["no active session", "say hello first"]);
    expect(state.takeToasts()).toEqual([]); // drained
    expect(state.ackFor(2)?.ok).toBe(false);
  });

  it("marks data stale on disconnect, closed when nothing arrived", () => {
    const fresh = new ConsoleState();
    fresh.onOpen();
    fresh.onClose();
    expect(fresh.status).toBe("closed");

    const seen = new ConsoleState();
    seen.onOpen();
    seen.apply(snap(1));
    seen.onClose();
    expect(seen.status).toBe("stale");
    expect(seen.view().pose.x).toBe(0.5); // last data still on screen
  });
});
