// Client-side truth is whatever the last snapshot said. This store keeps
// the latest snapshot (latest-wins by seq), the static session info, a
// per-trial trajectory trail, and the connection status. Nothing here
// mutates session state; reconnecting rebuilds the whole view from the
// next snapshot.

import {
  Ack,
  LeaderboardData,
  Message,
  SessionInfo,
  Snapshot,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "stale" | "closed";

export interface TrailPoint {
  seq: number;
  x: number;
  z: number;
  yaw: number;
}

export interface Toast {
  kind: "error" | "info";
  text: string;
}

export interface ConsoleSessionView {
  status: ConnectionStatus;
  sessionId: string;
  phase: string;
  blockIndex: number;
  trialIndex: number;
  trialClock: number;
  pose: Record<string, number>;
  fly: Record<string, number>;
  lightsOn: boolean;
  soundOn: boolean;
  wallsPresent: boolean;
  badSession: boolean;
  trail: TrailPoint[];
  // maxTrialDuration - trialClock, only meaningful while a trial runs
  countdown: number | null;
  score: number | null;
  lastTrial: Record<string, any> | null;
  leaderboard: LeaderboardData | null;
  pendingSurvey: string | null;
  seq: number;
}

const TRAIL_LIMIT = 2000;

export class ConsoleState {
  status: ConnectionStatus = "connecting";
  catalog: Record<string, any> | null = null;
  sessionActive = false;
  info: SessionInfo | null = null;
  snapshot: Snapshot | null = null;
  trail: TrailPoint[] = [];
  toasts: Toast[] = [];
  acks: Ack[] = [];
  private trailKey = "";

  onOpen(): void {
    this.status = "connected";
  }

  onClose(): void {
    // keep the last data on screen, but flag it
    this.status = this.snapshot ? "stale" : "closed";
  }

  apply(message: Message): void {
    switch (message.type) {
      case "welcome":
        this.catalog = message.catalog;
        this.sessionActive = message.session_active;
        return;
      case "session_info":
        this.info = message;
        this.trail = [];
        this.trailKey = "";
        this.sessionActive = true;
        return;
      case "snapshot":
        this.applySnapshot(message);
        return;
      case "ack":
        this.acks.push(message);
        if (!message.ok) {
          this.toasts.push({ kind: "error", text: message.error ?? "command failed" });
        }
        return;
      case "error":
        this.toasts.push({ kind: "error", text: message.message });
        return;
      default:
        // hello/command are client-to-server only; ignore echoes
        return;
    }
  }

  private applySnapshot(snap: Snapshot): void {
    if (this.snapshot && snap.seq <= this.snapshot.seq) return; // stale or duplicate
    this.snapshot = snap;
    this.sessionActive =
      snap.session_id !== "" && snap.phase !== "Ended" && snap.phase !== "Aborted";
    const key = `${snap.session_id}/${snap.block_index}/${snap.trial_index}`;
    if (key !== this.trailKey) {
      this.trailKey = key;
      this.trail = [];
    }
    if (snap.phase === "InTrial") {
      this.trail.push({
        seq: snap.seq,
        x: snap.pose.x ?? 0,
        z: snap.pose.z ?? 0,
        yaw: snap.pose.yaw ?? 0,
      });
      if (this.trail.length > TRAIL_LIMIT) {
        this.trail.splice(0, this.trail.length - TRAIL_LIMIT);
      }
    }
  }

  takeToasts(): Toast[] {
    const out = this.toasts;
    this.toasts = [];
    return out;
  }

  ackFor(commandId: number): Ack | undefined {
    return this.acks.find((a) => a.command_id === commandId);
  }

  view(): ConsoleSessionView {
    const snap = this.snapshot;
    const info = this.info;
    let countdown: number | null = null;
    if (snap && info && snap.phase === "InTrial") {
      countdown = Math.max(0, info.max_trial_duration - snap.trial_clock);
    }
    return {
      status: this.status,
      sessionId: snap?.session_id ?? "",
      phase: snap?.phase ?? "Idle",
      blockIndex: snap?.block_index ?? 0,
      trialIndex: snap?.trial_index ?? 0,
      trialClock: snap?.trial_clock ?? 0,
      pose: snap?.pose ?? {},
      fly: snap?.fly ?? {},
      lightsOn: snap?.lights_on ?? true,
      soundOn: snap?.sound_on ?? true,
      wallsPresent: snap?.walls_present ?? true,
      badSession: snap?.bad_session ?? false,
      trail: this.trail,
      countdown,
      score: snap?.last_trial ? (snap.last_trial.score as number) : null,
      lastTrial: snap?.last_trial ?? null,
      leaderboard: snap?.leaderboard ?? null,
      pendingSurvey: snap?.pending_survey ?? null,
      seq: snap?.seq ?? 0,
    };
  }
}
