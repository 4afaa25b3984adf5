// Harness for driving the real service: spawns `navloop serve`, prepares
// settings variants, and adapts a TCP socket to the console's Wire
// interface. The TCP framing carries the exact same lines the browser's
// WebSocket framing does.

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ConsoleClient, LineSplitter, WireFactory } from "../src/transport.js";

export interface ServiceHandle {
  proc: ChildProcess;
  port: number;
  outDir: string;
  settingsDir: string;
  stop(): void;
}

function editJson(path: string, edit: (data: any) => void): void {
  const data = JSON.parse(readFileSync(path, "utf-8"));
  edit(data);
  writeFileSync(path, JSON.stringify(data, null, 2) + "\n");
}

function deriveTriplet(dir: string, name: string, edits: {
  environment?: (data: any) => void;
  scenario?: (data: any) => void;
}): void {
  for (const part of ["environment", "locomotion", "scenario"] as const) {
    const source = join(dir, `demo.${part}.json`);
    const target = join(dir, `${name}.${part}.json`);
    writeFileSync(target, readFileSync(source));
    const edit = part === "environment" ? edits.environment : part === "scenario" ? edits.scenario : undefined;
    if (edit) editJson(target, edit);
  }
}

// demo files plus two one-block variants:
//   live: no surveys, effectively unbounded trials (for FlyChaser watching)
//   quiz: both surveys, short trials (for the survey round trip)
export function makeSettingsDir(): string {
  const dir = mkdtempSync(join(tmpdir(), "console-settings-"));
  const seeded = spawnSync("python3", ["-m", "navloop.cli", "demo-settings", "--out", dir]);
  if (seeded.status !== 0) {
    throw new Error(`demo-settings failed: ${seeded.stderr?.toString()}`);
  }
  const oneBlock = (data: any) => {
    data.walls_present_per_block = [true];
    data.floor_extends_per_block = [false];
  };
  deriveTriplet(dir, "live", {
    environment: (data) => {
      oneBlock(data);
      data.survey_links = [];
    },
    scenario: (data) => {
      data.trials_per_block = [1];
      data.max_trial_duration = 1e6;
      data.feedback_display_duration = 0.05;
      data.firefly_per_block = [data.firefly_per_block[0]];
    },
  });
  deriveTriplet(dir, "quiz", {
    environment: oneBlock,
    scenario: (data) => {
      data.trials_per_block = [1];
      data.max_trial_duration = 3.0;
      data.feedback_display_duration = 0.02;
      data.firefly_per_block = [data.firefly_per_block[0]];
    },
  });
  return dir;
}

export async function startService(settingsDir: string): Promise<ServiceHandle> {
  const outDir = mkdtempSync(join(tmpdir(), "console-out-"));
  const proc = spawn(
    "python3",
    [
      "-m", "navloop.cli", "serve",
      "--settings-dir", settingsDir,
      "--listen", "127.0.0.1:0",
      "--out", outDir,
      "--no-realtime",
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let stdout = "";
  let stderr = "";
  proc.stderr!.on("data", (chunk) => { stderr += chunk.toString(); });
  const port = await new Promise<number>((resolve, reject) => {
    const timer = setTimeout(
      () => reject(new Error(`service did not report a port\n${stderr}`)),
      20_000,
    );
    proc.stdout!.on("data", (chunk) => {
      stdout += chunk.toString();
      const match = stdout.match(/listening on 127\.0\.0\.1:(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(parseInt(match[1], 10));
      }
    });
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited early (${code})\n${stderr}`));
    });
  });
  return {
    proc,
    port,
    outDir,
    settingsDir,
    stop() {
      proc.kill("SIGINT");
    },
  };
}

export function tcpWire(port: number): WireFactory {
  return (events) => {
    const sock = net.connect(port, "127.0.0.1");
    sock.setNoDelay(true);
    const splitter = new LineSplitter();
    sock.on("connect", () => events.onOpen());
    sock.on("data", (chunk) => {
      for (const line of splitter.push(chunk.toString("utf-8"))) events.onLine(line);
    });
    sock.on("close", () => events.onClose());
    sock.on("error", () => { /* close handles it */ });
    return {
      send: (line) => void sock.write(line),
      close: () => void sock.destroy(),
    };
  };
}

export async function until<T>(
  probe: () => T | null | undefined | false,
  what: string,
  timeoutMs = 30_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const got = probe();
    if (got) return got;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 10));
  }
}

export async function ackOf(client: ConsoleClient, commandId: number) {
  return until(() => client.state.ackFor(commandId), `ack ${commandId}`);
}
