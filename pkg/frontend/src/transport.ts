// Transport glue. The console speaks newline-delimited protocol lines over
// whatever wire it is given; the browser build wraps a WebSocket, tests
// wrap a plain TCP socket. Both carry identical payloads.

import { Command, Message, ProtocolError, decode, encode } from "./protocol.js";
import { ConsoleState } from "./state.js";

export interface Wire {
  send(line: string): void;
  close(): void;
}

export interface WireEvents {
  onOpen(): void;
  onLine(line: string): void;
  onClose(): void;
}

export type WireFactory = (events: WireEvents) => Wire;

export class LineSplitter {
  private buffer = "";

  push(chunk: string): string[] {
    this.buffer += chunk;
    const lines: string[] = [];
    let idx: number;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, idx);
      this.buffer = this.buffer.slice(idx + 1);
      if (line.trim() !== "") lines.push(line);
    }
    return lines;
  }
}

export function webSocketWire(url: string, events: WireEvents): Wire {
  const ws = new WebSocket(url);
  const splitter = new LineSplitter();
  ws.onopen = () => events.onOpen();
  ws.onmessage = (ev) => {
    for (const line of splitter.push(String(ev.data))) events.onLine(line);
  };
  ws.onclose = () => events.onClose();
  return {
    send: (line) => ws.send(line),
    close: () => ws.close(),
  };
}

export class ConsoleClient {
  readonly state = new ConsoleState();
  private wire: Wire | null = null;
  private nextId = 1;

  constructor(private readonly makeWire: WireFactory) {}

  connect(role: string): void {
    this.wire = this.makeWire({
      onOpen: () => {
        this.state.onOpen();
        this.wire?.send(encode({ type: "hello", role }));
      },
      onLine: (line) => this.handleLine(line),
      onClose: () => this.state.onClose(),
    });
  }

  private handleLine(line: string): void {
    let message: Message;
    try {
      message = decode(line);
    } catch (exc) {
      if (exc instanceof ProtocolError) {
        this.state.toasts.push({ kind: "error", text: exc.message });
        return;
      }
      throw exc;
    }
    this.state.apply(message);
  }

  // Allocates the command id, sends, and returns the id for ack matching.
  send(kind: string, payload: Record<string, any> = {}): number {
    const id = this.nextId++;
    const command: Command = { type: "command", command_id: id, kind, payload };
    this.sendCommand(command);
    return id;
  }

  // For commands prepared by the form/control models, which carry their id.
  sendCommand(command: Command): void {
    if (!this.wire) throw new Error("not connected");
    if (command.command_id >= this.nextId) this.nextId = command.command_id + 1;
    this.wire.send(encode(command));
  }

  allocateId(): number {
    return this.nextId++;
  }

  close(): void {
    this.wire?.close();
  }
}
