// Top-down live map. Renders through a minimal 2-D context interface so
// tests can pass a recording fake; a real CanvasRenderingContext2D
// satisfies it structurally.

import { ConsoleSessionView } from "./state.js";

export interface Canvas2D {
  fillStyle: any;
  strokeStyle: any;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  setLineDash(segments: number[]): void;
  fillText(text: string, x: number, y: number): void;
}

export interface RoomGeometry {
  width: number;
  depth: number;
}

export interface MapTransform {
  sx(x: number): number;
  sz(z: number): number;
  scale: number;
}

const MARGIN = 28;

// Day and night palettes; the background tint is the visible lights state.
export const DAY_BG = "#f5f1e4";
export const NIGHT_BG = "#141824";
const DAY_INK = "#26282e";
const NIGHT_INK = "#d8dce8";
const TRAIL = "#3b82d0";
const FLY = "#e0a020";
const PARTICIPANT = "#c04040";

// The room is centered on the world origin: x in [-w/2, w/2], z likewise.
// Screen y grows downward while world z grows "up" the map, so z flips.
export function mapTransform(room: RoomGeometry, w: number, h: number): MapTransform {
  const scale = Math.min((w - 2 * MARGIN) / room.width, (h - 2 * MARGIN) / room.depth);
  const cx = w / 2;
  const cy = h / 2;
  return {
    sx: (x) => cx + x * scale,
    sz: (z) => cy - z * scale,
    scale,
  };
}

function dot(ctx: Canvas2D, x: number, y: number, r: number, color: string): void {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, Math.PI * 2);
  ctx.fill();
}

export function drawScene(
  ctx: Canvas2D,
  w: number,
  h: number,
  view: ConsoleSessionView,
  room: RoomGeometry | null,
): void {
  const ink = view.lightsOn ? DAY_INK : NIGHT_INK;
  ctx.globalAlpha = 1;
  ctx.setLineDash([]);
  ctx.fillStyle = view.lightsOn ? DAY_BG : NIGHT_BG;
  ctx.fillRect(0, 0, w, h);

  if (!room) {
    ctx.fillStyle = ink;
    ctx.font = "14px sans-serif";
    ctx.fillText("no session", MARGIN, MARGIN);
    drawStatus(ctx, w, h, view);
    return;
  }

  const t = mapTransform(room, w, h);
  const left = t.sx(-room.width / 2);
  const top = t.sz(room.depth / 2);

  // room footprint; dashed outline means the walls are down this block
  ctx.lineWidth = view.wallsPresent ? 3 : 1;
  ctx.setLineDash(view.wallsPresent ? [] : [6, 6]);
  ctx.strokeStyle = ink;
  ctx.strokeRect(left, top, room.width * t.scale, room.depth * t.scale);
  ctx.setLineDash([]);

  if (view.trail.length > 1) {
    ctx.strokeStyle = TRAIL;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(t.sx(view.trail[0].x), t.sz(view.trail[0].z));
    for (let i = 1; i < view.trail.length; i++) {
      ctx.lineTo(t.sx(view.trail[i].x), t.sz(view.trail[i].z));
    }
    ctx.stroke();
  }

  if (view.fly.x !== undefined) {
    dot(ctx, t.sx(view.fly.x), t.sz(view.fly.z), 5, FLY);
  }

  if (view.pose.x !== undefined) {
    const px = t.sx(view.pose.x);
    const pz = t.sz(view.pose.z);
    dot(ctx, px, pz, 6, PARTICIPANT);
    // heading tick: forward is (sin yaw, cos yaw) in world x-z
    const yaw = ((view.pose.yaw ?? 0) * Math.PI) / 180;
    ctx.strokeStyle = PARTICIPANT;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(px, pz);
    ctx.lineTo(px + Math.sin(yaw) * 14, pz - Math.cos(yaw) * 14);
    ctx.stroke();
  }

  ctx.fillStyle = ink;
  ctx.font = "16px sans-serif";
  if (view.countdown !== null) {
    ctx.fillText(`${view.countdown.toFixed(1)} s`, MARGIN, MARGIN - 8);
  }
  if (view.score !== null) {
    ctx.fillText(`score ${view.score}`, w - MARGIN - 90, MARGIN - 8);
  }
  if (!view.soundOn) {
    ctx.fillText("sound off", MARGIN, h - 10);
  }
  if (view.badSession) {
    ctx.fillStyle = PARTICIPANT;
    ctx.fillText("marked bad", w - MARGIN - 110, h - 10);
  }
  drawStatus(ctx, w, h, view);
}

function drawStatus(ctx: Canvas2D, w: number, h: number, view: ConsoleSessionView): void {
  if (view.status === "connected") return;
  ctx.globalAlpha = 0.85;
  ctx.fillStyle = "#7a2020";
  ctx.fillRect(0, h / 2 - 18, w, 36);
  ctx.globalAlpha = 1;
  ctx.fillStyle = "#ffffff";
  ctx.font = "15px sans-serif";
  const text =
    view.status === "stale" ? "connection lost, data is stale" : `connection ${view.status}`;
  ctx.fillText(text, w / 2 - 100, h / 2 + 5);
}
