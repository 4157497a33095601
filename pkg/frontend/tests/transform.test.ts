import { describe, expect, it } from "vitest";

import { makeViewport, screenToWorld, worldToScreen } from "../src/transform.js";

describe("viewport", () => {
  it("maps the stretched arm to 40% of the smaller canvas side", () => {
    const vp = makeViewport(800, 600, 3);
    expect(vp.scale).toBeCloseTo((0.4 * 600) / 3, 12);
    // the fully stretched arm in pixels
    expect(3 * vp.scale).toBeCloseTo(240, 12);
  });

  it("keeps the outer critical ring on the canvas", () => {
    const vp = makeViewport(760, 760, 3);
    const [x] = worldToScreen(vp, 3, 0);
    expect(x).toBeGreaterThan(vp.width / 2);
    expect(x).toBeLessThan(vp.width);
  });

  it("round-trips points and flips the y axis", () => {
    const vp = makeViewport(640, 480, 2.5);
    const [px, py] = worldToScreen(vp, 0.7, -1.1);
    const [wx, wy] = screenToWorld(vp, px, py);
    expect(wx).toBeCloseTo(0.7, 10);
    expect(wy).toBeCloseTo(-1.1, 10);
    // world up is screen up (smaller y)
    const [, pyUp] = worldToScreen(vp, 0, 1);
    expect(pyUp).toBeLessThan(vp.height / 2);
  });

  it("rejects arms with no length", () => {
    expect(() => makeViewport(100, 100, 0)).toThrow();
  });
});
