// Wire codec for the operator service. One JSON object per line, newline
// terminated. The object's first key is "type"; the rest follow a fixed
// per-type order, and null fields are left off the wire entirely. Field
// order and defaults mirror the service encoder so the same message always
// serializes to the same bytes on either end (see docs/protocol.md).

export const ROLE_OPERATOR = "operator";
export const ROLE_SPECTATOR = "spectator";

export const CMD_START_SESSION = "StartSession";
export const CMD_TOGGLE_LIGHT = "ToggleLight";
export const CMD_TOGGLE_SOUND = "ToggleSound";
export const CMD_ADD_NOTE = "AddNote";
export const CMD_MARK_BAD = "MarkBad";
export const CMD_ABORT = "Abort";
export const CMD_SUBMIT_SURVEY = "SubmitSurvey";
export const CMD_END_FEEDBACK = "EndFeedback";
export const CMD_AUTOPILOT_NEXT = "AutopilotNext";

export const COMMAND_KINDS = [
  CMD_START_SESSION,
  CMD_TOGGLE_LIGHT,
  CMD_TOGGLE_SOUND,
  CMD_ADD_NOTE,
  CMD_MARK_BAD,
  CMD_ABORT,
  CMD_SUBMIT_SURVEY,
  CMD_END_FEEDBACK,
  CMD_AUTOPILOT_NEXT,
] as const;

export class ProtocolError extends Error {}

export interface SurveyItemDef {
  prompt: string;
  scale_min?: number;
  scale_max?: number;
  labels?: string[];
  free_text?: boolean;
}

export interface SurveyDefinition {
  id: string;
  title: string;
  administer_at: string;
  items: SurveyItemDef[];
}

export interface Hello {
  type: "hello";
  role: string;
}

export interface Welcome {
  type: "welcome";
  catalog: Record<string, any>;
  session_active: boolean;
}

export interface SessionInfo {
  type: "session_info";
  session_id: string;
  participant: Record<string, any>;
  room: Record<string, number>;
  goal: Record<string, number>;
  start: Record<string, number>;
  max_trial_duration: number;
  feedback_display_duration: number;
  trials_per_block: number[];
  walls_present_per_block: boolean[];
  survey_definitions: SurveyDefinition[];
  leaderboard_mode: string;
}

export interface Command {
  type: "command";
  command_id: number;
  kind: string;
  payload: Record<string, any>;
}

export interface Ack {
  type: "ack";
  command_id: number;
  ok: boolean;
  error: string | null;
  detail: Record<string, any> | null;
}

export interface PlacementView {
  score: number;
  rank: number | null;
  is_new_high: boolean;
  below_board: boolean;
  practice: boolean;
}

export interface LeaderboardData {
  mode: string;
  entries: { participant_id: string; score: number }[];
  placement?: PlacementView;
}

export interface Snapshot {
  type: "snapshot";
  seq: number;
  session_id: string;
  phase: string;
  block_index: number;
  trial_index: number;
  trial_clock: number;
  pose: Record<string, number>;
  fly: Record<string, number>;
  lights_on: boolean;
  sound_on: boolean;
  walls_present: boolean;
  bad_session: boolean;
  last_trial: Record<string, any> | null;
  leaderboard: LeaderboardData | null;
  pending_survey: string | null;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type Message =
  | Hello
  | Welcome
  | SessionInfo
  | Command
  | Ack
  | Snapshot
  | ErrorMessage;

interface Shape {
  order: string[];
  blank: () => Record<string, any>;
}

const SHAPES: Record<string, Shape> = {
  hello: {
    order: ["role"],
    blank: () => ({ role: ROLE_OPERATOR }),
  },
  welcome: {
    order: ["catalog", "session_active"],
    blank: () => ({ catalog: {}, session_active: false }),
  },
  session_info: {
    order: [
      "session_id",
      "participant",
      "room",
      "goal",
      "start",
      "max_trial_duration",
      "feedback_display_duration",
      "trials_per_block",
      "walls_present_per_block",
      "survey_definitions",
      "leaderboard_mode",
    ],
    blank: () => ({
      session_id: "",
      participant: {},
      room: {},
      goal: {},
      start: {},
      max_trial_duration: 0,
      feedback_display_duration: 0,
      trials_per_block: [],
      walls_present_per_block: [],
      survey_definitions: [],
      leaderboard_mode: "Real",
    }),
  },
  command: {
    order: ["command_id", "kind", "payload"],
    blank: () => ({ command_id: 0, kind: "", payload: {} }),
  },
  ack: {
    order: ["command_id", "ok", "error", "detail"],
    blank: () => ({ command_id: 0, ok: true, error: null, detail: null }),
  },
  snapshot: {
    order: [
      "seq",
      "session_id",
      "phase",
      "block_index",
      "trial_index",
      "trial_clock",
      "pose",
      "fly",
      "lights_on",
      "sound_on",
      "walls_present",
      "bad_session",
      "last_trial",
      "leaderboard",
      "pending_survey",
    ],
    blank: () => ({
      seq: 0,
      session_id: "",
      phase: "Idle",
      block_index: 0,
      trial_index: 0,
      trial_clock: 0,
      pose: {},
      fly: {},
      lights_on: true,
      sound_on: true,
      walls_present: true,
      bad_session: false,
      last_trial: null,
      leaderboard: null,
      pending_survey: null,
    }),
  },
  error: {
    order: ["message"],
    blank: () => ({ message: "" }),
  },
};

export function encode(message: Message): string {
  const shape = SHAPES[message.type];
  if (!shape) {
    throw new ProtocolError(`not a protocol message: ${String((message as any).type)}`);
  }
  const body: Record<string, any> = { type: message.type };
  for (const key of shape.order) {
    const value = (message as any)[key];
    if (value === null || value === undefined) continue;
    body[key] = value;
  }
  return JSON.stringify(body) + "\n";
}

export function decode(line: string): Message {
  let data: any;
  try {
    data = JSON.parse(line);
  } catch (exc: any) {
    throw new ProtocolError(`malformed message: ${exc.message}`);
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    const got = Array.isArray(data) ? "array" : data === null ? "null" : typeof data;
    throw new ProtocolError(`message must be an object, got ${got}`);
  }
  const typeName = data.type;
  if (typeof typeName !== "string") {
    throw new ProtocolError("message has no type");
  }
  const shape = SHAPES[typeName];
  if (!shape) {
    throw new ProtocolError(`unknown message type '${typeName}'`);
  }
  const out: Record<string, any> = { type: typeName, ...shape.blank() };
  for (const key of shape.order) {
    if (key in data) out[key] = data[key];
  }
  return out as Message;
}
