// WebSocket client for the steering service, plus the outbound throttle
// that keeps drag events down to the service tick rate.

import { Frame, parseFrame } from "./protocol.js";

export interface Throttle<T> {
  submit(value: T): void;
  flush(): void;
}

/**
 * Coalesce a stream of values down to at most one sink call per interval.
 * The latest value always wins; a trailing call delivers whatever arrived
 * while the window was closed.
 */
export function makeThrottle<T>(intervalMs: number, sink: (value: T) => void): Throttle<T> {
  let last = 0;
  let pending: T | null = null;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const fire = (value: T) => {
    last = Date.now();
    sink(value);
  };

  const submit = (value: T) => {
    const now = Date.now();
    if (now - last >= intervalMs) {
      fire(value);
      return;
    }
    pending = value;
    if (timer === null) {
      timer = setTimeout(() => {
        timer = null;
        if (pending !== null) {
          const value = pending;
          pending = null;
          fire(value);
        }
      }, intervalMs - (now - last));
    }
  };

  const flush = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
    if (pending !== null) {
      const value = pending;
      pending = null;
      fire(value);
    }
  };

  return { submit, flush };
}

export interface ClientCallbacks {
  onFrame: (frame: Frame) => void;
  onStatus: (connected: boolean) => void;
}

export interface CreateParams {
  lengths: number[];
  angles: number[];
  speed_cap?: number;
  margin?: number;
  tick_rate?: number;
}

export class SteerClient {
  private ws: WebSocket | null = null;
  private closed = false;
  private targetThrottle: Throttle<[number, number]>;

  constructor(
    private readonly url: string,
    private readonly callbacks: ClientCallbacks,
    tickRate: number,
  ) {
    const interval = tickRate > 0 ? 1000 / tickRate : 33;
    this.targetThrottle = makeThrottle(interval, (p) =>
      this.send({ type: "set_target", point: p }),
    );
  }

  connect(create: CreateParams): void {
    this.closed = false;
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.callbacks.onStatus(true);
      this.send({
        type: "create",
        arm: { lengths: create.lengths, dim: 2 },
        q0: { angles: create.angles },
        speed_cap: create.speed_cap,
        margin: create.margin,
        tick_rate: create.tick_rate,
      });
    };
    ws.onmessage = (evt) => {
      const frame = parseFrame(String(evt.data));
      if (frame) this.callbacks.onFrame(frame);
    };
    ws.onclose = () => {
      this.callbacks.onStatus(false);
      this.ws = null;
      if (!this.closed) {
        // connection dropped underneath us: retry with the same session request
        setTimeout(() => {
          if (!this.closed) this.connect(create);
        }, 1000);
      }
    };
    ws.onerror = () => ws.close();
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }

  private send(payload: unknown): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(payload));
    }
  }

  dragTarget(x: number, y: number): void {
    this.targetThrottle.submit([x, y]);
  }

  releaseTarget(): void {
    this.targetThrottle.flush();
  }

  requestSnapshot(): void {
    this.send({ type: "snapshot_request" });
  }

  resetBaseline(): void {
    this.send({ type: "baseline_reset" });
  }

  setTickRate(value: number): void {
    this.send({ type: "tick_rate", value });
  }

  tick(dt: number): void {
    this.send({ type: "tick", dt });
  }
}
