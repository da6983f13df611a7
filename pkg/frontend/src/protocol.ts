/**
 * The service wire protocol. JSON text frames, one message per frame:
 * {"v": 1, "seq": n, "type": ..., "payload": ...}. Client sequence numbers
 * must strictly increase; the server numbers its own stream independently.
 */

export const PROTOCOL_VERSION = 1;

export interface WireMessage {
  v: number;
  seq: number;
  type: string;
  payload: Record<string, unknown>;
}

export interface GazeSampleRecord {
  t_ms: number;
  x: number;
  y: number;
  confidence: number;
}

export interface ObjectContextRecord {
  centroid: [number, number];
  grasp_thumb: [number, number];
  grasp_index: [number, number];
  shape_id: string;
}

export interface FixationPayload {
  t_start_ms: number;
  duration_ms: number;
  x: number;
  y: number;
}

export interface FeaturesPayload {
  t_ms: number;
  adf2c: number;
  adf2t: number;
  adf2i: number;
  var: number;
  n_fix: number;
  vector: number[];
}

export interface IntentionPayload {
  t_ms: number;
  label: "GRASP" | "VIEW" | "INSUFFICIENT";
  fired: boolean;
}

export function encodeInit(
  seq: number,
  object: ObjectContextRecord,
  model?: string,
  window?: Record<string, number>,
): string {
  const payload: Record<string, unknown> = { object };
  if (model) payload.model = model;
  if (window) payload.window = window;
  return JSON.stringify({ v: PROTOCOL_VERSION, seq, type: "init", payload });
}

export function encodeSamples(seq: number, samples: GazeSampleRecord[]): string {
  return JSON.stringify({
    v: PROTOCOL_VERSION,
    seq,
    type: "samples",
    payload: { samples },
  });
}

const SERVER_TYPES = new Set(["ack", "fixation", "features", "intention", "error"]);

export function decodeServer(raw: string): WireMessage {
  let msg: WireMessage;
  try {
    msg = JSON.parse(raw) as WireMessage;
  } catch {
    throw new Error("server sent a frame that is not JSON");
  }
  if (msg.v !== PROTOCOL_VERSION) {
    throw new Error(`unsupported protocol version: ${msg.v}`);
  }
  if (typeof msg.seq !== "number" || !SERVER_TYPES.has(msg.type)) {
    throw new Error(`malformed server message: ${raw.slice(0, 80)}`);
  }
  return msg;
}

/** Guards the per-session ordering invariant on received messages. */
export class SeqValidator {
  private last = 0;

  check(seq: number): void {
    if (seq <= this.last) {
      throw new Error(`server seq went backwards: ${seq} after ${this.last}`);
    }
    this.last = seq;
  }
}
