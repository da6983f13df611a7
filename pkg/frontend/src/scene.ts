/**
 * The shape catalog served by GET /scenes: the same geometry the data
 * generator uses, so on-canvas grasp markers agree with the object context
 * the session is initialized with.
 */
import type { ObjectContextRecord } from "./protocol.js";

export interface SceneShape {
  shape_id: string;
  role: "train" | "test";
  grasp_axis: "h" | "v";
  outline: [number, number][];
  grasp_thumb: [number, number];
  grasp_index: [number, number];
  half_extent: number;
}

export interface SceneCatalog {
  shapes: Record<string, SceneShape>;
  train_shapes: string[];
  test_shapes: string[];
}

export async function fetchScenes(baseUrl: string): Promise<SceneCatalog> {
  const res = await fetch(`${baseUrl}/scenes`);
  if (!res.ok) throw new Error(`GET /scenes failed: ${res.status}`);
  return (await res.json()) as SceneCatalog;
}

/** Place a catalog shape at a canvas position and get the init context. */
export function objectContextFor(
  shape: SceneShape,
  center: [number, number],
): ObjectContextRecord {
  return {
    centroid: [center[0], center[1]],
    grasp_thumb: [center[0] + shape.grasp_thumb[0], center[1] + shape.grasp_thumb[1]],
    grasp_index: [center[0] + shape.grasp_index[0], center[1] + shape.grasp_index[1]],
    shape_id: shape.shape_id,
  };
}

export function outlineAt(shape: SceneShape, center: [number, number]): [number, number][] {
  return shape.outline.map(([x, y]) => [center[0] + x, center[1] + y]);
}
