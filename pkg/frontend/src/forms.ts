// Form models: session setup, survey panels, leaderboard rows. Pure data
// in and commands out; the DOM layer in app.ts only renders these.

import {
  CMD_AUTOPILOT_NEXT,
  CMD_START_SESSION,
  CMD_SUBMIT_SURVEY,
  Command,
  LeaderboardData,
  SurveyDefinition,
} from "./protocol.js";

// -- session setup ----------------------------------------------------------

export interface SetupFields {
  participantId: string;
  age: string;
  gender: string;
  qualification: string;
  environment: string;
  locomotion: string;
  scenario: string;
  method: string; // "" keeps the method from the settings file
  leaderboardMode: string;
  agentKind: string;
  autopilot: boolean;
}

export function defaultSetup(catalog: Record<string, any> | null): SetupFields {
  const first = (key: string) => {
    const names = catalog?.[key];
    return Array.isArray(names) && names.length > 0 ? String(names[0]) : "";
  };
  return {
    participantId: "",
    age: "",
    gender: "",
    qualification: "",
    environment: first("environments"),
    locomotion: first("locomotions"),
    scenario: first("scenarios"),
    method: "",
    leaderboardMode: "Real",
    agentKind: "GoalSeeker",
    autopilot: false,
  };
}

export function validateSetup(fields: SetupFields): Record<string, string> {
  const errors: Record<string, string> = {};
  if (fields.autopilot) return errors; // the plan supplies everything
  if (fields.participantId.trim() === "") {
    errors.participantId = "participant id is required";
  }
  if (fields.age.trim() !== "" && !/^\d+$/.test(fields.age.trim())) {
    errors.age = "age must be a whole number";
  }
  return errors;
}

// Null when validation fails: no command leaves the console.
export function setupCommand(fields: SetupFields, commandId: number): Command | null {
  if (Object.keys(validateSetup(fields)).length > 0) return null;
  if (fields.autopilot) {
    return { type: "command", command_id: commandId, kind: CMD_AUTOPILOT_NEXT, payload: {} };
  }
  const participant: Record<string, any> = { id: fields.participantId.trim() };
  if (fields.age.trim() !== "") participant.age = parseInt(fields.age.trim(), 10);
  if (fields.gender.trim() !== "") participant.gender = fields.gender.trim();
  if (fields.qualification.trim() !== "") participant.qualification = fields.qualification.trim();
  const payload: Record<string, any> = {
    participant,
    environment: fields.environment,
    locomotion: fields.locomotion,
    scenario: fields.scenario,
    leaderboard_mode: fields.leaderboardMode,
    agent: { kind: fields.agentKind },
  };
  if (fields.method !== "") payload.method = fields.method;
  return { type: "command", command_id: commandId, kind: CMD_START_SESSION, payload };
}

// -- surveys ------------------------------------------------------------------

export interface SurveyRow {
  prompt: string;
  choices: number[]; // empty for free-text rows
  labels: string[] | null;
  freeText: boolean;
  answer: number | string | null;
}

export interface SurveyPanel {
  surveyId: string;
  title: string;
  rows: SurveyRow[];
}

export function buildSurveyPanel(def: SurveyDefinition): SurveyPanel {
  const rows: SurveyRow[] = def.items.map((item) => {
    if (item.free_text) {
      return { prompt: item.prompt, choices: [], labels: null, freeText: true, answer: null };
    }
    const lo = item.scale_min ?? 0;
    const hi = item.scale_max ?? 0;
    const choices: number[] = [];
    for (let v = lo; v <= hi; v++) choices.push(v);
    return {
      prompt: item.prompt,
      choices,
      labels: item.labels ?? null,
      freeText: false,
      answer: null,
    };
  });
  return { surveyId: def.id, title: def.title, rows };
}

// Out-of-range picks are dropped, matching what radio inputs allow anyway.
export function answerRow(panel: SurveyPanel, index: number, value: number | string): void {
  const row = panel.rows[index];
  if (!row) return;
  if (row.freeText) {
    row.answer = String(value);
    return;
  }
  const v = typeof value === "number" ? value : parseInt(String(value), 10);
  if (row.choices.includes(v)) row.answer = v;
}

export function panelComplete(panel: SurveyPanel): boolean {
  return panel.rows.every((row) => row.answer !== null);
}

export function submitSurveyCommand(panel: SurveyPanel, commandId: number): Command | null {
  if (!panelComplete(panel)) return null;
  return {
    type: "command",
    command_id: commandId,
    kind: CMD_SUBMIT_SURVEY,
    payload: { survey_id: panel.surveyId, answers: panel.rows.map((r) => r.answer) },
  };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// Static markup; app.ts attaches the change handlers by input name.
export function renderSurveyHTML(panel: SurveyPanel): string {
  const parts: string[] = [`<h3>${escapeHtml(panel.title)}</h3>`];
  panel.rows.forEach((row, i) => {
    parts.push(`<fieldset data-row="${i}"><legend>${escapeHtml(row.prompt)}</legend>`);
    if (row.freeText) {
      const value = row.answer === null ? "" : escapeHtml(String(row.answer));
      parts.push(`<input type="text" name="q${i}" value="${value}">`);
    } else {
      for (const choice of row.choices) {
        const label = row.labels?.[choice - row.choices[0]] ?? String(choice);
        const checked = row.answer === choice ? " checked" : "";
        parts.push(
          `<label><input type="radio" name="q${i}" value="${choice}"${checked}> ` +
            `${escapeHtml(label)}</label>`,
        );
      }
    }
    parts.push("</fieldset>");
  });
  const disabled = panelComplete(panel) ? "" : " disabled";
  parts.push(`<button type="button" name="submit-survey"${disabled}>Submit</button>`);
  return parts.join("\n");
}

// -- leaderboard --------------------------------------------------------------

export interface BoardRow {
  rank: number | null;
  participantId: string;
  score: number;
  highlight: boolean;
  belowBoard: boolean;
  practice: boolean;
}

export interface BoardView {
  mode: string;
  practiceTag: boolean;
  rows: BoardRow[];
}

export function leaderboardView(
  data: LeaderboardData | null,
  participantId: string,
): BoardView | null {
  if (!data) return null;
  const placement = data.placement;
  const rows: BoardRow[] = data.entries.map((entry, i) => ({
    rank: i + 1,
    participantId: entry.participant_id,
    score: entry.score,
    highlight: Boolean(placement?.is_new_high && placement.rank === i + 1),
    belowBoard: false,
    practice: false,
  }));
  if (placement && !placement.is_new_high) {
    // the attempt did not land on the board: show it under the table
    rows.push({
      rank: placement.practice ? placement.rank : null,
      participantId,
      score: placement.score,
      highlight: false,
      belowBoard: placement.below_board,
      practice: placement.practice,
    });
  }
  return { mode: data.mode, practiceTag: Boolean(placement?.practice), rows };
}
