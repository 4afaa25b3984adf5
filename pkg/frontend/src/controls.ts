// Controls panel model: which buttons are live in which phase, and the
// command each one emits. Abort goes through an explicit confirm step.

import {
  CMD_ABORT,
  CMD_ADD_NOTE,
  CMD_END_FEEDBACK,
  CMD_MARK_BAD,
  CMD_TOGGLE_LIGHT,
  CMD_TOGGLE_SOUND,
  Command,
} from "./protocol.js";
import { ConsoleSessionView } from "./state.js";

export interface ControlsModel {
  toggleLight: boolean;
  toggleSound: boolean;
  addNote: boolean;
  markBad: boolean;
  abort: boolean;
  endFeedback: boolean;
}

const TERMINAL = new Set(["Idle", "Ended", "Aborted"]);

export function controlsFor(view: ConsoleSessionView): ControlsModel {
  const active = view.sessionId !== "" && !TERMINAL.has(view.phase);
  return {
    toggleLight: active,
    toggleSound: active,
    addNote: active,
    markBad: active,
    abort: active,
    endFeedback: active && view.phase === "FeedbackDisplay",
  };
}

function command(kind: string, commandId: number, payload: Record<string, any> = {}): Command {
  return { type: "command", command_id: commandId, kind, payload };
}

export function toggleLightCommand(commandId: number): Command {
  return command(CMD_TOGGLE_LIGHT, commandId);
}

export function toggleSoundCommand(commandId: number): Command {
  return command(CMD_TOGGLE_SOUND, commandId);
}

export function addNoteCommand(text: string, commandId: number): Command {
  return command(CMD_ADD_NOTE, commandId, { text });
}

export function markBadCommand(commandId: number): Command {
  return command(CMD_MARK_BAD, commandId);
}

export function endFeedbackCommand(commandId: number): Command {
  return command(CMD_END_FEEDBACK, commandId);
}

// Returns null unless the operator confirmed; no command leaves otherwise.
export function abortCommand(confirmed: boolean, commandId: number): Command | null {
  if (!confirmed) return null;
  return command(CMD_ABORT, commandId);
}
