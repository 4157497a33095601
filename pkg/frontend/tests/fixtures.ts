// Frame factories shared by the tests.

import type { MetaInfo, StateFrame } from "../src/protocol.js";

export function meta(overrides: Partial<MetaInfo> = {}): MetaInfo {
  return {
    session: "s1",
    lengths: [1, 1, 1],
    dim: 2,
    critical_radii: [1, 3],
    total_length: 3,
    speed_cap: 1,
    margin: 0.05,
    tick_rate: 30,
    baseline_point: [1.2, 0.8],
    ...overrides,
  };
}

export function stateFrame(overrides: Partial<StateFrame> = {}): StateFrame {
  return {
    type: "state",
    session: "s1",
    t: 0,
    q: [0.2, 1.1, 2.3],
    effector: [1.2, 0.8],
    target: [1.2, 0.8],
    det_p: 2.1,
    rho: 3.6,
    invariants: { coincident: [], cross_ratios: [] },
    clamped: false,
    tracking_error: 1e-10,
    ...overrides,
  };
}
