// Frame types of the steering service, plus a defensive parser.
// Every number shown in the UI comes out of these frames; nothing is
// recomputed on the client side.

export interface CrossRatioEntry {
  indices: number[];
  value: number;
}

export interface InvariantBlock {
  coincident: number[][];
  cross_ratios: CrossRatioEntry[];
}

export interface StateFrame {
  type: "state";
  session: string;
  t: number;
  q: number[];
  effector: [number, number];
  target: [number, number];
  det_p: number;
  rho: number;
  invariants: InvariantBlock;
  clamped: boolean;
  tracking_error: number;
}

export interface MetaInfo {
  session: string;
  lengths: number[];
  dim: number;
  critical_radii: number[];
  total_length: number;
  speed_cap: number;
  margin: number;
  tick_rate: number;
  baseline_point: [number, number];
}

export interface CreatedFrame {
  type: "created";
  id: string;
  state: StateFrame;
  meta: MetaInfo;
}

export interface HolonomyFrame {
  type: "holonomy";
  session: string;
  t: number;
  displacement: number[];
  displacement_norm: number;
  rho_change: number;
  baseline_gap: number;
  loop_points: number;
  gradient_alignment?: number;
  decomposition: number[];
  basis_rank: number;
}

export interface ErrorFrame {
  type: "error";
  error?: string;
  message: string;
}

export type Frame = StateFrame | CreatedFrame | HolonomyFrame | ErrorFrame;

function isPair(v: unknown): v is [number, number] {
  return (
    Array.isArray(v) &&
    v.length === 2 &&
    typeof v[0] === "number" &&
    typeof v[1] === "number"
  );
}

function isNumberArray(v: unknown): v is number[] {
  return Array.isArray(v) && v.every((x) => typeof x === "number");
}

function isInvariants(v: unknown): v is InvariantBlock {
  if (typeof v !== "object" || v === null) return false;
  const block = v as Record<string, unknown>;
  return (
    Array.isArray(block.coincident) &&
    block.coincident.every(isNumberArray) &&
    Array.isArray(block.cross_ratios) &&
    block.cross_ratios.every((e) => {
      const entry = e as Record<string, unknown>;
      return isNumberArray(entry.indices) && typeof entry.value === "number";
    })
  );
}

function isStateFrame(v: Record<string, unknown>): v is StateFrame & Record<string, unknown> {
  return (
    v.type === "state" &&
    typeof v.session === "string" &&
    typeof v.t === "number" &&
    isNumberArray(v.q) &&
    isPair(v.effector) &&
    isPair(v.target) &&
    typeof v.det_p === "number" &&
    typeof v.rho === "number" &&
    isInvariants(v.invariants) &&
    typeof v.clamped === "boolean" &&
    typeof v.tracking_error === "number"
  );
}

function isMeta(v: unknown): v is MetaInfo {
  if (typeof v !== "object" || v === null) return false;
  const m = v as Record<string, unknown>;
  return (
    isNumberArray(m.lengths) &&
    isNumberArray(m.critical_radii) &&
    typeof m.total_length === "number" &&
    typeof m.tick_rate === "number" &&
    isPair(m.baseline_point)
  );
}

/** Parse one wire message; malformed frames are dropped with a console note. */
export function parseFrame(raw: string): Frame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch (err) {
    console.warn("dropping unparseable frame", err);
    return null;
  }
  if (typeof data !== "object" || data === null) {
    console.warn("dropping non-object frame");
    return null;
  }
  const frame = data as Record<string, unknown>;
  switch (frame.type) {
    case "state":
      if (isStateFrame(frame)) return frame;
      break;
    case "created":
      if (
        typeof frame.id === "string" &&
        typeof frame.state === "object" &&
        frame.state !== null &&
        isStateFrame(frame.state as Record<string, unknown>) &&
        isMeta(frame.meta)
      ) {
        return frame as unknown as CreatedFrame;
      }
      break;
    case "holonomy":
      if (
        isNumberArray(frame.displacement) &&
        typeof frame.displacement_norm === "number" &&
        typeof frame.rho_change === "number" &&
        typeof frame.basis_rank === "number"
      ) {
        return frame as unknown as HolonomyFrame;
      }
      break;
    case "error":
      if (typeof frame.message === "string") return frame as unknown as ErrorFrame;
      break;
  }
  console.warn("dropping malformed frame", frame.type);
  return null;
}
