import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { makeThrottle } from "../src/client.js";

describe("outbound throttle", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("passes the first value through immediately", () => {
    const sent: number[] = [];
    const throttle = makeThrottle<number>(33, (v) => sent.push(v));
    throttle.submit(1);
    expect(sent).toEqual([1]);
  });

  it("coalesces a burst down to first plus latest", () => {
    const sent: number[] = [];
    const throttle = makeThrottle<number>(33, (v) => sent.push(v));
    throttle.submit(1);
    throttle.submit(2);
    throttle.submit(3);
    throttle.submit(4);
    expect(sent).toEqual([1]);
    vi.advanceTimersByTime(40);
    expect(sent).toEqual([1, 4]);
  });

  it("keeps a steady drag at the configured rate", () => {
    const sent: number[] = [];
    const throttle = makeThrottle<number>(50, (v) => sent.push(v));
    for (let i = 0; i < 20; i++) {
      throttle.submit(i);
      vi.advanceTimersByTime(10); // drag events every 10ms for 200ms
    }
    // 200ms at one send per 50ms: about 4 sends, certainly not 20
    expect(sent.length).toBeGreaterThanOrEqual(3);
    expect(sent.length).toBeLessThanOrEqual(6);
    expect(sent[0]).toBe(0);
  });

  it("flush sends the trailing value at once", () => {
    const sent: number[] = [];
    const throttle = makeThrottle<number>(100, (v) => sent.push(v));
    throttle.submit(1);
    throttle.submit(2);
    throttle.flush();
    expect(sent).toEqual([1, 2]);
    // nothing left pending afterwards
    vi.advanceTimersByTime(500);
    expect(sent).toEqual([1, 2]);
  });
});
