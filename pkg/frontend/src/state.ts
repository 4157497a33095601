// Client-side view state: the last frame, the trail ring buffer, and the
// baseline used for the holonomy ghost and invariant deltas. Everything
// physical in here was computed by the service; this module only stores
// and diffs it.

import type { HolonomyFrame, MetaInfo, StateFrame } from "./protocol.js";

export const TRAIL_CAP = 5000;
export const DELTA_HIGHLIGHT = 1e-4;

/** Fixed-capacity ring buffer for the effector trail. */
export class Trail {
  private points: [number, number][];
  private head = 0;
  private count = 0;

  constructor(private readonly cap: number = TRAIL_CAP) {
    this.points = new Array(cap);
  }

  push(p: [number, number]): void {
    this.points[(this.head + this.count) % this.cap] = p;
    if (this.count < this.cap) {
      this.count += 1;
    } else {
      this.head = (this.head + 1) % this.cap;
    }
  }

  get length(): number {
    return this.count;
  }

  clear(): void {
    this.head = 0;
    this.count = 0;
  }

  toArray(): [number, number][] {
    const out: [number, number][] = new Array(this.count);
    for (let i = 0; i < this.count; i++) {
      out[i] = this.points[(this.head + i) % this.cap];
    }
    return out;
  }
}

export interface CrossRatioDelta {
  indices: number[];
  value: number;
  baseline: number | null;
  delta: number | null;
  highlight: boolean;
}

export interface ViewState {
  meta: MetaInfo | null;
  frame: StateFrame | null;
  baselineFrame: StateFrame | null;
  lastHolonomy: HolonomyFrame | null;
  trail: Trail;
  connected: boolean;
  framesSeen: number;
}

export function createViewState(): ViewState {
  return {
    meta: null,
    frame: null,
    baselineFrame: null,
    lastHolonomy: null,
    trail: new Trail(),
    connected: false,
    framesSeen: 0,
  };
}

export function attachMeta(view: ViewState, meta: MetaInfo): void {
  view.meta = meta;
}

/** Fold one state frame in; the first frame after a reset becomes baseline. */
export function applyState(view: ViewState, frame: StateFrame): void {
  if (view.baselineFrame === null) {
    view.baselineFrame = frame;
  }
  view.frame = frame;
  view.trail.push([frame.effector[0], frame.effector[1]]);
  view.framesSeen += 1;
}

export function applyHolonomy(view: ViewState, frame: HolonomyFrame): void {
  view.lastHolonomy = frame;
}

/** Drop the remembered baseline; the next frame re-seeds it and the trail. */
export function resetBaseline(view: ViewState): void {
  view.baselineFrame = null;
  view.trail.clear();
}

function matchRatio(baseline: StateFrame, indices: number[]): number | null {
  for (const entry of baseline.invariants.cross_ratios) {
    if (
      entry.indices.length === indices.length &&
      entry.indices.every((v, i) => v === indices[i])
    ) {
      return entry.value;
    }
  }
  return null;
}

/** Cross-ratio rows for the panel, with drift vs baseline flagged. */
export function crossRatioDeltas(view: ViewState): CrossRatioDelta[] {
  if (!view.frame) return [];
  const base = view.baselineFrame;
  return view.frame.invariants.cross_ratios.map((entry) => {
    const baseline = base ? matchRatio(base, entry.indices) : null;
    const delta = baseline === null ? null : entry.value - baseline;
    return {
      indices: entry.indices,
      value: entry.value,
      baseline,
      delta,
      highlight: delta !== null && Math.abs(delta) > DELTA_HIGHLIGHT,
    };
  });
}

/** Pairs the service reports as coincident right now. */
export function coincidentPairs(view: ViewState): number[][] {
  return view.frame ? view.frame.invariants.coincident : [];
}

export function coincidenceBadge(view: ViewState): boolean {
  return coincidentPairs(view).length > 0;
}

export function clampedBadge(view: ViewState): boolean {
  return view.frame !== null && view.frame.clamped;
}
