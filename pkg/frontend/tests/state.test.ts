import { describe, expect, it } from "vitest";

import {
  applyState,
  clampedBadge,
  coincidenceBadge,
  createViewState,
  crossRatioDeltas,
  resetBaseline,
  Trail,
  TRAIL_CAP,
} from "../src/state.js";
import { stateFrame } from "./fixtures.js";

describe("trail ring buffer", () => {
  it("caps at the configured size and drops oldest first", () => {
    const trail = new Trail();
    for (let i = 0; i < TRAIL_CAP + 1000; i++) {
      trail.push([i, -i]);
    }
    expect(trail.length).toBe(TRAIL_CAP);
    const points = trail.toArray();
    expect(points.length).toBe(TRAIL_CAP);
    expect(points[0]).toEqual([1000, -1000]);
    expect(points[points.length - 1]).toEqual([TRAIL_CAP + 999, -(TRAIL_CAP + 999)]);
  });

  it("preserves order below capacity", () => {
    const trail = new Trail(5);
    trail.push([1, 1]);
    trail.push([2, 2]);
    expect(trail.toArray()).toEqual([
      [1, 1],
      [2, 2],
    ]);
  });
});

describe("view state", () => {
  it("seeds the baseline from the first frame and grows the trail", () => {
    const view = createViewState();
    const first = stateFrame({ t: 0 });
    applyState(view, first);
    applyState(view, stateFrame({ t: 0.1, effector: [1.3, 0.8] }));
    expect(view.baselineFrame).toBe(first);
    expect(view.frame!.t).toBe(0.1);
    expect(view.trail.length).toBe(2);
    expect(view.framesSeen).toBe(2);
  });

  it("re-seeds baseline and clears the trail after a reset", () => {
    const view = createViewState();
    applyState(view, stateFrame({ t: 0 }));
    applyState(view, stateFrame({ t: 0.1 }));
    resetBaseline(view);
    expect(view.trail.length).toBe(0);
    const fresh = stateFrame({ t: 0.2 });
    applyState(view, fresh);
    expect(view.baselineFrame).toBe(fresh);
  });

  it("highlights a cross-ratio only past the drift threshold", () => {
    const view = createViewState();
    const ratios = (value: number) => ({
      coincident: [],
      cross_ratios: [{ indices: [0, 1, 2, 3], value }],
    });
    applyState(view, stateFrame({ invariants: ratios(2.0) }));

    applyState(view, stateFrame({ t: 0.1, invariants: ratios(2.0 + 5e-5) }));
    expect(crossRatioDeltas(view)[0].highlight).toBe(false);

    applyState(view, stateFrame({ t: 0.2, invariants: ratios(2.0 + 2e-4) }));
    const row = crossRatioDeltas(view)[0];
    expect(row.highlight).toBe(true);
    expect(row.delta).toBeCloseTo(2e-4, 10);
    expect(row.baseline).toBe(2.0);
  });

  it("raises badges from the frame flags alone", () => {
    const view = createViewState();
    expect(coincidenceBadge(view)).toBe(false);
    applyState(
      view,
      stateFrame({
        invariants: { coincident: [[0, 2]], cross_ratios: [] },
        clamped: true,
      }),
    );
    expect(coincidenceBadge(view)).toBe(true);
    expect(clampedBadge(view)).toBe(true);
  });
});
