// World/screen mapping. The arm lives in arm-length units centered on the
// origin; the scale is fixed so the fully stretched arm spans 40% of the
// smaller canvas dimension, which keeps the outer critical ring in view.

export interface Viewport {
  width: number;
  height: number;
  scale: number; // pixels per world unit
}

export function makeViewport(width: number, height: number, totalLength: number): Viewport {
  if (totalLength <= 0) throw new Error("total arm length must be positive");
  const scale = (0.4 * Math.min(width, height)) / totalLength;
  return { width, height, scale };
}

export function worldToScreen(vp: Viewport, x: number, y: number): [number, number] {
  // canvas y grows downward
  return [vp.width / 2 + x * vp.scale, vp.height / 2 - y * vp.scale];
}

export function screenToWorld(vp: Viewport, px: number, py: number): [number, number] {
  return [(px - vp.width / 2) / vp.scale, (vp.height / 2 - py) / vp.scale];
}
