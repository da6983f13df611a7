/**
 * Canvas painting plus the pure geometry helpers behind it. The painters
 * only visualize values already present in the session state; nothing here
 * derives a feature number.
 */
import type { SceneShape } from "./scene.js";
import { outlineAt } from "./scene.js";
import type { SessionState } from "./session.js";

export const GRASP_ANIMATION_MS = 600;

/** 0..1 progress of the grasp animation, or null when idle. */
export function animationProgress(nowMs: number, firedAt: number | null): number | null {
  if (firedAt === null) return null;
  const t = (nowMs - firedAt) / GRASP_ANIMATION_MS;
  return t >= 0 && t <= 1 ? t : null;
}

/** Bar heights (0..1) for the live feature display, shared scale per slot. */
export function barFractions(
  displayed: Map<string, { value: number }>,
  slots: readonly string[],
  fullScale: Record<string, number>,
): Record<string, number> {
  const out: Record<string, number> = {};
  for (const name of slots) {
    const entry = displayed.get(name);
    out[name] = entry === undefined ? 0 : Math.min(1, Math.max(0, entry.value / fullScale[name]));
  }
  return out;
}

const BAR_SLOTS = ["adf2c", "adf2i", "var"] as const; // the C4 members
const BAR_SCALE: Record<string, number> = { adf2c: 120, adf2i: 120, var: 400 };

export function draw(
  canvas: HTMLCanvasElement,
  state: SessionState,
  shape: SceneShape | null,
  center: [number, number],
  nowMs: number,
): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  ctx.fillStyle = "#111";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (shape === null) return;

  // shape outline + centroid + grasp markers (identical to the init context)
  const pts = outlineAt(shape, center);
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (const [x, y] of pts.slice(1)) ctx.lineTo(x, y);
  ctx.closePath();
  ctx.fillStyle = "#e8e8e8";
  ctx.fill();

  ctx.fillStyle = "#1565c0";
  dot(ctx, center[0], center[1], 5);
  ctx.strokeStyle = "#c62828";
  cross(ctx, center[0] + shape.grasp_thumb[0], center[1] + shape.grasp_thumb[1], 7);
  ctx.strokeStyle = "#2e7d32";
  cross(ctx, center[0] + shape.grasp_index[0], center[1] + shape.grasp_index[1], 7);

  // fixation circles, newest brightest
  state.fixations.forEach((f, i) => {
    const alpha = 0.25 + (0.75 * (i + 1)) / state.fixations.length;
    ctx.fillStyle = `rgba(255, 167, 38, ${alpha.toFixed(3)})`;
    dot(ctx, f.x, f.y, 4 + Math.min(6, f.duration_ms / 100));
  });

  // feature bars from service-sent values only
  const fractions = barFractions(state.displayed, BAR_SLOTS, BAR_SCALE);
  BAR_SLOTS.forEach((name, i) => {
    const x = 20 + i * 60;
    const h = fractions[name] * 120;
    ctx.fillStyle = "#455a64";
    ctx.fillRect(x, canvas.height - 20 - 120, 40, 120);
    ctx.fillStyle = "#80cbc4";
    ctx.fillRect(x, canvas.height - 20 - h, 40, h);
    ctx.fillStyle = "#eee";
    ctx.font = "12px sans-serif";
    ctx.fillText(name, x, canvas.height - 6);
    const entry = state.displayed.get(name);
    if (entry !== undefined) ctx.fillText(entry.value.toFixed(1), x, canvas.height - 148);
  });

  // verdict banner
  ctx.font = "20px sans-serif";
  const verdict = state.verdict?.label ?? "-";
  ctx.fillStyle = verdict === "GRASP" ? "#66bb6a" : verdict === "VIEW" ? "#64b5f6" : "#9e9e9e";
  ctx.fillText(`verdict: ${verdict}`, 20, 30);
  ctx.fillStyle = "#eee";
  ctx.font = "13px sans-serif";
  ctx.fillText(`session: ${state.phase}${state.lastError ? ` (${state.lastError})` : ""}`, 20, 52);

  // virtual grasp: two fingers closing on the grasp points
  const progress = animationProgress(nowMs, state.firedAt);
  if (progress !== null) {
    const reach = 60 * (1 - progress);
    ctx.strokeStyle = "#ffee58";
    ctx.lineWidth = 6;
    for (const g of [shape.grasp_thumb, shape.grasp_index]) {
      const gx = center[0] + g[0];
      const gy = center[1] + g[1];
      const nx = g[0] === 0 ? 0 : Math.sign(g[0]);
      const ny = g[1] === 0 ? 0 : Math.sign(g[1]);
      ctx.beginPath();
      ctx.moveTo(gx + nx * (reach + 30), gy + ny * (reach + 30));
      ctx.lineTo(gx + nx * reach, gy + ny * reach);
      ctx.stroke();
    }
    ctx.lineWidth = 1;
    ctx.fillStyle = "#ffee58";
    ctx.font = "24px sans-serif";
    ctx.fillText("GRASP!", center[0] - 40, center[1] - shape.half_extent - 20);
  }
}

function dot(ctx: CanvasRenderingContext2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, Math.PI * 2);
  ctx.fill();
}

function cross(ctx: CanvasRenderingContext2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.moveTo(x - r, y);
  ctx.lineTo(x + r, y);
  ctx.moveTo(x, y - r);
  ctx.lineTo(x, y + r);
  ctx.stroke();
}
