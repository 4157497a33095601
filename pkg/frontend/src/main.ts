// Page wiring: one canvas, one panel, one WebSocket session. Arm and
// session parameters come from the query string; everything drawn comes
// from service frames.

import { SteerClient } from "./client.js";
import { Frame } from "./protocol.js";
import { buildScene, drawScene } from "./render.js";
import {
  applyHolonomy,
  applyState,
  attachMeta,
  createViewState,
  resetBaseline,
} from "./state.js";
import { makeViewport, screenToWorld, Viewport } from "./transform.js";

function numberList(raw: string | null, fallback: number[]): number[] {
  if (!raw) return fallback;
  const parsed = raw.split(",").map(Number);
  return parsed.every((x) => Number.isFinite(x)) && parsed.length > 0 ? parsed : fallback;
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const serviceUrl =
    params.get("service") ?? `ws://${window.location.hostname || "127.0.0.1"}:8723/stream`;
  const lengths = numberList(params.get("lengths"), [1.0, 1.0, 1.0]);
  const angles = numberList(params.get("angles"), [0.2, 1.1, 2.3]);
  const tickRate = Number(params.get("tick_rate") ?? "30");

  const canvas = document.getElementById("arm-canvas") as HTMLCanvasElement;
  const panelEl = document.getElementById("panel") as HTMLElement;
  const bannerEl = document.getElementById("banner") as HTMLElement;
  const snapshotBtn = document.getElementById("snapshot") as HTMLButtonElement;
  const baselineBtn = document.getElementById("baseline") as HTMLButtonElement;
  const holonomyEl = document.getElementById("holonomy") as HTMLElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  const view = createViewState();
  let viewport: Viewport | null = null;
  let dragging = false;

  const client = new SteerClient(
    serviceUrl,
    { onFrame: handleFrame, onStatus: handleStatus },
    tickRate,
  );

  function handleStatus(connected: boolean): void {
    view.connected = connected;
    bannerEl.textContent = connected ? "" : "connection lost, retrying";
    bannerEl.classList.toggle("visible", !connected);
    snapshotBtn.disabled = !connected;
    baselineBtn.disabled = !connected;
    redraw();
  }

  function handleFrame(frame: Frame): void {
    switch (frame.type) {
      case "created":
        attachMeta(view, frame.meta);
        viewport = makeViewport(canvas.width, canvas.height, frame.meta.total_length);
        resetBaseline(view);
        applyState(view, frame.state);
        break;
      case "state":
        applyState(view, frame);
        break;
      case "holonomy":
        applyHolonomy(view, frame);
        holonomyEl.textContent =
          `loop displacement ${frame.displacement_norm.toExponential(3)}` +
          (frame.gradient_alignment !== undefined
            ? `, gradient alignment ${frame.gradient_alignment.toFixed(5)}`
            : "");
        break;
      case "error":
        console.warn("service error:", frame.message);
        holonomyEl.textContent = frame.error === "NotAtBasepoint" ? frame.message : "";
        break;
    }
    redraw();
  }

  function redraw(): void {
    if (!viewport) return;
    const scene = buildScene(view, viewport);
    drawScene(ctx!, scene);
    renderPanel(scene.panel);
  }

  function renderPanel(panel: ReturnType<typeof buildScene>["panel"]): void {
    const rows: string[] = [
      `<div>t = ${panel.t}</div>`,
      `<div>det P = ${panel.detP}</div>`,
      `<div>angle sum = ${panel.rho}</div>`,
      `<div>tracking error = ${panel.trackingError}</div>`,
    ];
    for (const cr of panel.crossRatios) {
      const cls = cr.highlight ? "ratio drift" : "ratio";
      const delta = cr.delta === null ? "" : ` (Δ ${cr.delta.toExponential(2)})`;
      rows.push(
        `<div class="${cls}">[${cr.indices.join(",")}] = ${cr.value.toFixed(6)}${delta}</div>`,
      );
    }
    if (panel.coincidenceBadge) {
      const pairs = panel.coincident.map((p) => `(${p.join(",")})`).join(" ");
      rows.push(`<div class="badge coincidence">coincident ${pairs}</div>`);
    }
    if (panel.clamped) {
      rows.push(`<div class="badge clamped">clamped</div>`);
    }
    panelEl.innerHTML = rows.join("");
  }

  function pointerWorld(evt: PointerEvent): [number, number] | null {
    if (!viewport) return null;
    const rect = canvas.getBoundingClientRect();
    return screenToWorld(viewport, evt.clientX - rect.left, evt.clientY - rect.top);
  }

  canvas.addEventListener("pointerdown", (evt) => {
    dragging = true;
    canvas.setPointerCapture(evt.pointerId);
    const p = pointerWorld(evt);
    if (p) client.dragTarget(p[0], p[1]);
  });
  canvas.addEventListener("pointermove", (evt) => {
    if (!dragging) return;
    const p = pointerWorld(evt);
    if (p) client.dragTarget(p[0], p[1]);
  });
  canvas.addEventListener("pointerup", () => {
    dragging = false;
    client.releaseTarget();
  });

  snapshotBtn.addEventListener("click", () => client.requestSnapshot());
  baselineBtn.addEventListener("click", () => {
    resetBaseline(view);
    client.resetBaseline();
  });

  client.connect({ lengths, angles, tick_rate: tickRate });
}

main();
