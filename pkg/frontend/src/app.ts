// Browser entry point. Everything on screen derives from ConsoleState;
// every click maps to exactly one command. Configure with URL parameters:
//   ?host=127.0.0.1:8765   service address (default: the page's host)
//   &role=spectator        read-only connection (default: operator)

import { controlsFor, abortCommand, addNoteCommand, endFeedbackCommand, markBadCommand, toggleLightCommand, toggleSoundCommand } from "./controls.js";
import {
  SetupFields,
  buildSurveyPanel,
  defaultSetup,
  leaderboardView,
  renderSurveyHTML,
  answerRow,
  setupCommand,
  submitSurveyCommand,
  validateSetup,
  SurveyPanel,
} from "./forms.js";
import { drawScene } from "./map.js";
import { ConsoleClient, webSocketWire } from "./transport.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const params = new URLSearchParams(location.search);
const host = params.get("host") ?? location.host;
const role = params.get("role") ?? "operator";

const client = new ConsoleClient((events) => webSocketWire(`ws://${host}/`, events));
client.connect(role);
const state = client.state;

// -- setup form ---------------------------------------------------------------

const fields: SetupFields = defaultSetup(null);
let setupFilled = false;

function bindInput(id: string, key: keyof SetupFields): void {
  const input = el<HTMLInputElement>(id);
  input.addEventListener("input", () => {
    (fields as any)[key] = input.type === "checkbox" ? input.checked : input.value;
  });
}

function fillSelect(id: string, names: string[]): void {
  const select = el<HTMLSelectElement>(id);
  select.innerHTML = names.map((n) => `<option value="${n}">${n}</option>`).join("");
}

function populateSetup(): void {
  const catalog = state.catalog;
  if (!catalog || setupFilled) return;
  setupFilled = true;
  const fresh = defaultSetup(catalog);
  fields.environment = fresh.environment;
  fields.locomotion = fresh.locomotion;
  fields.scenario = fresh.scenario;
  fillSelect("setup-environment", catalog.environments ?? []);
  fillSelect("setup-locomotion", catalog.locomotions ?? []);
  fillSelect("setup-scenario", catalog.scenarios ?? []);
  fillSelect("setup-mode", catalog.leaderboard_modes ?? ["Real"]);
}

bindInput("setup-id", "participantId");
bindInput("setup-age", "age");
bindInput("setup-gender", "gender");
bindInput("setup-qualification", "qualification");
bindInput("setup-environment", "environment");
bindInput("setup-locomotion", "locomotion");
bindInput("setup-scenario", "scenario");
bindInput("setup-method", "method");
bindInput("setup-mode", "leaderboardMode");
bindInput("setup-agent", "agentKind");
bindInput("setup-autopilot", "autopilot");

el<HTMLButtonElement>("setup-start").addEventListener("click", () => {
  const errors = validateSetup(fields);
  el("setup-errors").textContent = Object.values(errors).join("; ");
  const command = setupCommand(fields, client.allocateId());
  if (command) client.sendCommand(command);
});

// -- controls -------------------------------------------------------------------

el<HTMLButtonElement>("btn-light").addEventListener("click", () => {
  client.sendCommand(toggleLightCommand(client.allocateId()));
});
el<HTMLButtonElement>("btn-sound").addEventListener("click", () => {
  client.sendCommand(toggleSoundCommand(client.allocateId()));
});
el<HTMLButtonElement>("btn-note").addEventListener("click", () => {
  const input = el<HTMLInputElement>("note-text");
  client.sendCommand(addNoteCommand(input.value, client.allocateId()));
  input.value = "";
});
el<HTMLButtonElement>("btn-bad").addEventListener("click", () => {
  client.sendCommand(markBadCommand(client.allocateId()));
});
el<HTMLButtonElement>("btn-feedback").addEventListener("click", () => {
  client.sendCommand(endFeedbackCommand(client.allocateId()));
});
el<HTMLButtonElement>("btn-abort").addEventListener("click", () => {
  const command = abortCommand(confirm("Abort the running session?"), client.allocateId());
  if (command) client.sendCommand(command);
});

// -- survey panel ----------------------------------------------------------------

let panel: SurveyPanel | null = null;
let panelFor = "";

function syncSurvey(pending: string | null): void {
  const container = el("survey");
  if (!pending) {
    panel = null;
    panelFor = "";
    container.innerHTML = "";
    return;
  }
  if (panelFor === pending && panel) return;
  const def = state.info?.survey_definitions.find((d) => d.id === pending);
  if (!def) return;
  panel = buildSurveyPanel(def);
  panelFor = pending;
  renderPanel();
}

function renderPanel(): void {
  if (!panel) return;
  const container = el("survey");
  container.innerHTML = renderSurveyHTML(panel);
  container.querySelectorAll("input").forEach((input) => {
    input.addEventListener("change", () => {
      if (!panel) return;
      const row = parseInt(input.name.slice(1), 10);
      answerRow(panel, row, input.type === "radio" ? parseInt(input.value, 10) : input.value);
      const submit = container.querySelector<HTMLButtonElement>("button[name=submit-survey]");
      if (submit) submit.disabled = submitSurveyCommand(panel, 0) === null;
    });
  });
  const submit = container.querySelector<HTMLButtonElement>("button[name=submit-survey]");
  submit?.addEventListener("click", () => {
    if (!panel) return;
    const command = submitSurveyCommand(panel, client.allocateId());
    if (command) {
      client.sendCommand(command);
      panelFor = ""; // rebuilt if the same survey comes back rejected
    }
  });
}

// -- render loop -------------------------------------------------------------------

const canvas = el<HTMLCanvasElement>("map");
const ctx = canvas.getContext("2d")!;

function room(): { width: number; depth: number } | null {
  const info = state.info;
  if (!info) return null;
  return { width: info.room.width, depth: info.room.depth };
}

function renderFrame(): void {
  populateSetup();
  const view = state.view();
  drawScene(ctx, canvas.width, canvas.height, view, room());

  const controls = controlsFor(view);
  el<HTMLButtonElement>("btn-light").disabled = !controls.toggleLight;
  el<HTMLButtonElement>("btn-sound").disabled = !controls.toggleSound;
  el<HTMLButtonElement>("btn-note").disabled = !controls.addNote;
  el<HTMLButtonElement>("btn-bad").disabled = !controls.markBad;
  el<HTMLButtonElement>("btn-abort").disabled = !controls.abort;
  el<HTMLButtonElement>("btn-feedback").disabled = !controls.endFeedback;
  el<HTMLButtonElement>("setup-start").disabled = state.sessionActive;

  el("status").textContent = `${view.status} | ${view.phase}` +
    (view.sessionId ? ` | ${view.sessionId}` : "");
  el("status").className = view.status === "connected" ? "ok" : "down";

  syncSurvey(view.pendingSurvey);

  const board = leaderboardView(view.leaderboard, String(state.info?.participant.id ?? ""));
  const table = el("leaderboard");
  if (!board) {
    table.innerHTML = "";
  } else {
    const rows = board.rows
      .map((r) => {
        const cls = [
          r.highlight ? "highlight" : "",
          r.belowBoard ? "below" : "",
          r.practice ? "practice" : "",
        ]
          .filter(Boolean)
          .join(" ");
        const rank = r.rank === null ? "-" : String(r.rank);
        const tag = r.practice ? " (practice)" : "";
        return `<tr class="${cls}"><td>${rank}</td><td>${r.participantId}${tag}</td>` +
          `<td>${r.score}</td></tr>`;
      })
      .join("");
    table.innerHTML = `<caption>${board.mode} board${board.practiceTag ? " (practice)" : ""}</caption>` + rows;
  }

  for (const toast of state.takeToasts()) {
    const div = document.createElement("div");
    div.className = `toast ${toast.kind}`;
    div.textContent = toast.text;
    el("toasts").appendChild(div);
    setTimeout(() => div.remove(), 6000);
  }

  requestAnimationFrame(renderFrame);
}

requestAnimationFrame(renderFrame);
