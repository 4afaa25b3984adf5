import { describe, expect, it } from "vitest";

import {
  Ack,
  COMMAND_KINDS,
  Message,
  ProtocolError,
  Snapshot,
  decode,
  encode,
} from "../src/protocol.js";
import { GOLDEN_LINES, GOLDEN_SNAPSHOT_LINE } from "./fixtures.js";

function samples(): Message[] {
  return [
    { type: "hello", role: "spectator" },
    { type: "welcome", catalog: { environments: ["demo"] }, session_active: true },
    {
      type: "command",
      command_id: 12,
      kind: "ToggleLight",
      payload: {},
    },
    { type: "ack", command_id: 12, ok: true, error: null, detail: { lights_on: false } },
    { type: "error", message: "nope" },
  ];
}

describe("codec", () => {
  it("round-trips every message type", () => {
    for (const message of samples()) {
      expect(decode(encode(message))).toEqual(message);
    }
  });

  it("puts the type tag first and stays compact", () => {
    for (const message of samples()) {
      const line = encode(message);
      expect(line.startsWith('{"type":"')).toBe(true);
      expect(line.endsWith("}\n")).toBe(true);
      expect(line).not.toContain('": ');
    }
  });

  it("matches the service encoder byte for byte on golden lines", () => {
    for (const line of GOLDEN_LINES) {
      expect(encode(decode(line))).toBe(line);
    }
  });

  it("decodes a full service snapshot", () => {
    const snap = decode(GOLDEN_SNAPSHOT_LINE) as Snapshot;
    expect(snap.type).toBe("snapshot");
    expect(snap.seq).toBe(7);
    expect(snap.phase).toBe("InTrial");
    expect(snap.pose).toEqual({ x: 1.5, z: -2.25, yaw: 90.5 });
    expect(snap.fly.y).toBe(1.0);
    expect(snap.lights_on).toBe(false);
    expect(snap.last_trial?.score).toBe(800);
    expect(snap.leaderboard?.placement?.is_new_high).toBe(true);
    expect(snap.pending_survey).toBeNull(); // omitted on the wire
  });

  it("omits null fields and restores them on decode", () => {
    const ack: Ack = { type: "ack", command_id: 1, ok: true, error: null, detail: null };
    const line = encode(ack);
    expect(line).toBe('{"type":"ack","command_id":1,"ok":true}\n');
    expect(decode(line)).toEqual(ack);
  });

  it("fills missing fields with defaults", () => {
    const snap = decode('{"type":"snapshot","seq":3}\n') as Snapshot;
    expect(snap.phase).toBe("Idle");
    expect(snap.lights_on).toBe(true);
    expect(snap.leaderboard).toBeNull();
  });

  it("ignores unknown keys", () => {
    const msg = decode('{"type":"hello","role":"operator","zzz":1}');
    expect(msg).toEqual({ type: "hello", role: "operator" });
  });

  it("rejects garbage", () => {
    expect(() => decode("{nope")).toThrowError(ProtocolError);
    expect(() => decode("{nope")).toThrowError(/^malformed message: /);
    expect(() => decode("[1,2]")).toThrowError(/must be an object, got array/);
    expect(() => decode('"hi"')).toThrowError(/must be an object, got string/);
    expect(() => decode("null")).toThrowError(/must be an object, got null/);
    expect(() => decode("{}")).toThrowError("message has no type");
    expect(() => decode('{"type":42}')).toThrowError("message has no type");
    expect(() => decode('{"type":"bogus"}')).toThrowError("unknown message type 'bogus'");
  });

  it("rejects non-protocol objects on encode", () => {
    expect(() => encode({ type: "nope" } as any)).toThrowError(ProtocolError);
  });

  it("knows all nine command kinds", () => {
    expect(COMMAND_KINDS).toHaveLength(9);
    expect(new Set(COMMAND_KINDS)).toEqual(
      new Set([
        "StartSession",
        "ToggleLight",
        "ToggleSound",
        "AddNote",
        "MarkBad",
        "Abort",
        "SubmitSurvey",
        "EndFeedback",
        "AutopilotNext",
      ]),
    );
  });
});
