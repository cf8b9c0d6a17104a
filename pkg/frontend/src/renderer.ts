// Scene graphs render client-side: the engine ships placements plus portable
// fragment specs once (in hello), and the console rasterizes.  The pure part
// produces draw ops as data; only drawScene touches a canvas context.

import type { FragmentSpec, SceneGraph } from "./protocol";

export type Fill =
  | { kind: "solid"; color: [number, number, number, number] }
  | {
      kind: "gradient";
      axis: "x" | "y";
      from: [number, number, number, number];
      to: [number, number, number, number];
    }
  | { kind: "png"; data_b64: string };

export interface FragmentOp {
  op: "fragment";
  agent: number;
  x: number;
  y: number;
  width: number;
  height: number;
  opacity: number;
  fill: Fill;
}

export interface BackgroundOp {
  op: "background";
  width: number;
  height: number;
  color: [number, number, number];
}

export type DrawOp = BackgroundOp | FragmentOp;

function rgba(values: number[]): [number, number, number, number] {
  return [values[0] ?? 0, values[1] ?? 0, values[2] ?? 0, values[3] ?? 1];
}

function fragmentSize(spec: FragmentSpec): [number, number] | null {
  if (spec.kind === "solid" || spec.kind === "gradient") {
    const [w, h] = spec.size;
    if (w === undefined || h === undefined || w <= 0 || h <= 0) return null;
    return [w, h];
  }
  return null; // png size comes from the decoded bitmap at draw time
}

function fillOf(spec: FragmentSpec): Fill {
  if (spec.kind === "solid") return { kind: "solid", color: rgba(spec.color) };
  if (spec.kind === "gradient")
    return {
      kind: "gradient",
      axis: spec.axis ?? "x",
      from: rgba(spec.start),
      to: rgba(spec.stop),
    };
  return { kind: "png", data_b64: spec.data_b64 };
}

/**
 * Lower a scene graph to draw ops in paint order, or null when the graph is
 * unusable (the caller keeps the last good frame and shows a warning).
 */
export function sceneToDrawOps(
  scene: SceneGraph,
  fragmentsByAgent: Map<number, FragmentSpec>,
  pngSizes?: Map<number, [number, number]>,
): DrawOp[] | null {
  if (!scene.canvas || scene.canvas.width <= 0 || scene.canvas.height <= 0) return null;
  if (!Array.isArray(scene.items) || !Array.isArray(scene.background)) return null;
  const ops: DrawOp[] = [
    {
      op: "background",
      width: scene.canvas.width,
      height: scene.canvas.height,
      color: [scene.background[0] ?? 0, scene.background[1] ?? 0, scene.background[2] ?? 0],
    },
  ];
  const ordered = [...scene.items].sort((a, b) => a.agent - b.agent); // z = agent id
  for (const item of ordered) {
    const spec = fragmentsByAgent.get(item.agent);
    if (spec === undefined) return null;
    if (
      typeof item.x !== "number" ||
      typeof item.y !== "number" ||
      !(item.scale > 0) ||
      item.opacity < 0 ||
      item.opacity > 1
    )
      return null;
    const size = fragmentSize(spec) ?? pngSizes?.get(item.agent) ?? null;
    if (size === null && spec.kind !== "png") return null;
    const [w, h] = size ?? [0, 0]; // png without a known size yet draws at bitmap size
    ops.push({
      op: "fragment",
      agent: item.agent,
      x: item.x,
      y: item.y,
      width: w * item.scale,
      height: h * item.scale,
      opacity: item.opacity,
      fill: fillOf(spec),
    });
  }
  return ops;
}

export function cssColor(c: [number, number, number, number] | [number, number, number]): string {
  const [r, g, b] = c;
  const a = c.length > 3 ? (c as [number, number, number, number])[3] : 1;
  return `rgba(${Math.round(r * 255)}, ${Math.round(g * 255)}, ${Math.round(b * 255)}, ${a})`;
}

/** Paint ops onto a 2D context scaled by `scale` display pixels per canvas unit. */
export function drawScene(
  ctx: CanvasRenderingContext2D,
  ops: DrawOp[],
  scale: number,
  bitmaps: Map<number, ImageBitmap | HTMLImageElement>,
): void {
  ctx.save();
  ctx.imageSmoothingEnabled = false;
  ctx.scale(scale, scale);
  for (const op of ops) {
    if (op.op === "background") {
      ctx.globalAlpha = 1;
      ctx.fillStyle = cssColor(op.color);
      ctx.fillRect(0, 0, op.width, op.height);
      continue;
    }
    ctx.globalAlpha = op.opacity;
    if (op.fill.kind === "solid") {
      ctx.fillStyle = cssColor(op.fill.color);
      ctx.fillRect(op.x, op.y, op.width, op.height);
    } else if (op.fill.kind === "gradient") {
      const gradient =
        op.fill.axis === "x"
          ? ctx.createLinearGradient(op.x, op.y, op.x + op.width, op.y)
          : ctx.createLinearGradient(op.x, op.y, op.x, op.y + op.height);
      gradient.addColorStop(0, cssColor(op.fill.from));
      gradient.addColorStop(1, cssColor(op.fill.to));
      ctx.fillStyle = gradient;
      ctx.fillRect(op.x, op.y, op.width, op.height);
    } else {
      const bitmap = bitmaps.get(op.agent);
      if (bitmap !== undefined) {
        const w = op.width > 0 ? op.width : bitmap.width;
        const h = op.height > 0 ? op.height : bitmap.height;
        ctx.drawImage(bitmap, op.x, op.y, w, h);
      }
    }
  }
  ctx.restore();
}
