// Scene construction and canvas drawing. buildScene is pure (tested
// headless); drawScene is the only part touching a 2d context.

import type { StateFrame } from "./protocol.js";
import {
  clampedBadge,
  coincidenceBadge,
  coincidentPairs,
  crossRatioDeltas,
  CrossRatioDelta,
  ViewState,
} from "./state.js";
import { Viewport, worldToScreen } from "./transform.js";

export interface Segment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Scene {
  segments: Segment[];
  ghost: Segment[];
  rings: { cx: number; cy: number; radiusPx: number }[];
  trail: [number, number][];
  target: [number, number] | null;
  effector: [number, number] | null;
  panel: PanelModel;
}

export interface PanelModel {
  detP: string;
  rho: string;
  trackingError: string;
  crossRatios: CrossRatioDelta[];
  coincident: number[][];
  coincidenceBadge: boolean;
  clamped: boolean;
  connected: boolean;
  t: string;
}

/** Joint chain in screen space from the frame's angles and the arm lengths. */
function chain(vp: Viewport, lengths: number[], q: number[]): Segment[] {
  const out: Segment[] = [];
  let x = 0;
  let y = 0;
  for (let j = 0; j < lengths.length; j++) {
    const nx = x + lengths[j] * Math.cos(q[j]);
    const ny = y + lengths[j] * Math.sin(q[j]);
    const [x1, y1] = worldToScreen(vp, x, y);
    const [x2, y2] = worldToScreen(vp, nx, ny);
    out.push({ x1, y1, x2, y2 });
    x = nx;
    y = ny;
  }
  return out;
}

export function buildScene(view: ViewState, vp: Viewport): Scene {
  const meta = view.meta;
  const frame = view.frame;
  const [cx, cy] = worldToScreen(vp, 0, 0);
  const rings = (meta ? meta.critical_radii : [])
    .filter((r) => r > 0)
    .map((r) => ({ cx, cy, radiusPx: r * vp.scale }));

  const segments = meta && frame ? chain(vp, meta.lengths, frame.q) : [];
  const ghost =
    meta && view.baselineFrame && view.baselineFrame !== frame
      ? chain(vp, meta.lengths, view.baselineFrame.q)
      : [];

  const trail = view.trail
    .toArray()
    .map(([x, y]) => worldToScreen(vp, x, y));

  return {
    segments,
    ghost,
    rings,
    trail,
    target: frame ? worldToScreen(vp, frame.target[0], frame.target[1]) : null,
    effector: frame ? worldToScreen(vp, frame.effector[0], frame.effector[1]) : null,
    panel: buildPanel(view, frame),
  };
}

function fmt(x: number): string {
  return Math.abs(x) >= 1e-3 || x === 0 ? x.toFixed(4) : x.toExponential(2);
}

function buildPanel(view: ViewState, frame: StateFrame | null): PanelModel {
  return {
    detP: frame ? fmt(frame.det_p) : "-",
    rho: frame ? fmt(frame.rho) : "-",
    trackingError: frame ? frame.tracking_error.toExponential(2) : "-",
    crossRatios: crossRatioDeltas(view),
    coincident: coincidentPairs(view),
    coincidenceBadge: coincidenceBadge(view),
    clamped: clampedBadge(view),
    connected: view.connected,
    t: frame ? frame.t.toFixed(2) : "-",
  };
}

export function drawScene(ctx: CanvasRenderingContext2D, scene: Scene): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);

  ctx.strokeStyle = "#d0d0d0";
  ctx.setLineDash([4, 4]);
  for (const ring of scene.rings) {
    ctx.beginPath();
    ctx.arc(ring.cx, ring.cy, ring.radiusPx, 0, 2 * Math.PI);
    ctx.stroke();
  }
  ctx.setLineDash([]);

  if (scene.trail.length > 1) {
    ctx.strokeStyle = "#9ecbff";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(scene.trail[0][0], scene.trail[0][1]);
    for (const [x, y] of scene.trail) ctx.lineTo(x, y);
    ctx.stroke();
  }

  ctx.strokeStyle = "#bbbbbb";
  ctx.lineWidth = 3;
  for (const seg of scene.ghost) {
    ctx.beginPath();
    ctx.moveTo(seg.x1, seg.y1);
    ctx.lineTo(seg.x2, seg.y2);
    ctx.stroke();
  }

  ctx.strokeStyle = "#c23b22";
  ctx.fillStyle = "#c23b22";
  ctx.lineWidth = 4;
  for (const seg of scene.segments) {
    ctx.beginPath();
    ctx.moveTo(seg.x1, seg.y1);
    ctx.lineTo(seg.x2, seg.y2);
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(seg.x2, seg.y2, 3, 0, 2 * Math.PI);
    ctx.fill();
  }

  if (scene.target) {
    ctx.strokeStyle = "#2a7d2a";
    ctx.lineWidth = 2;
    const [tx, ty] = scene.target;
    ctx.beginPath();
    ctx.arc(tx, ty, 6, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(tx - 9, ty);
    ctx.lineTo(tx + 9, ty);
    ctx.moveTo(tx, ty - 9);
    ctx.lineTo(tx, ty + 9);
    ctx.stroke();
  }

  if (scene.effector) {
    ctx.fillStyle = "#1b4f9c";
    ctx.beginPath();
    ctx.arc(scene.effector[0], scene.effector[1], 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}
