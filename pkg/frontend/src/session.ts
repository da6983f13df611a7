/**
 * The live session driver: samples the pointer at a fixed rate as the gaze
 * proxy, streams batches to the service, and mirrors whatever the service
 * sends back. All displayed numbers come from service messages; this module
 * records their message seq so tests can prove no value was computed here.
 */
import {
  decodeServer,
  encodeInit,
  encodeSamples,
  SeqValidator,
  type FeaturesPayload,
  type FixationPayload,
  type GazeSampleRecord,
  type IntentionPayload,
  type ObjectContextRecord,
} from "./protocol.js";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SessionPhase = "disconnected" | "connecting" | "streaming";

export interface DisplayedValue {
  value: number;
  seq: number; // the server message that delivered it
}

export interface SessionState {
  phase: SessionPhase;
  verdict: IntentionPayload | null;
  features: FeaturesPayload | null;
  fixations: FixationPayload[];
  firedAt: number | null; // controller clock ms, for the grasp animation
  lastError: string | null;
  reconnects: number;
  /** every number shown in the UI, keyed by display slot */
  displayed: Map<string, DisplayedValue>;
}

export interface SessionOptions {
  url: string;
  object: ObjectContextRecord;
  model?: string;
  sampleRateHz?: number;
  jitterPx?: number;
  batchMs?: number;
  reconnectDelayMs?: number;
  maxFixations?: number;
  wsFactory?: (url: string) => WebSocketLike;
  random?: () => number;
}

interface TrialRecord {
  trial_id: string;
  participant_id: string;
  task_label: "GRASP" | "VIEW";
  fixations: FixationPayload[];
  object: ObjectContextRecord;
}

export class SessionController {
  readonly state: SessionState = {
    phase: "disconnected",
    verdict: null,
    features: null,
    fixations: [],
    firedAt: null,
    lastError: null,
    reconnects: 0,
    displayed: new Map(),
  };

  private readonly opts: Required<Omit<SessionOptions, "model">> & { model?: string };
  private ws: WebSocketLike | null = null;
  private seqOut = 0;
  private seqIn = new SeqValidator();
  private pointer: [number, number] | null = null;
  private pending: GazeSampleRecord[] = [];
  private sessionStartMs: number | null = null;
  private lastSampleMs = -Infinity;
  private lastFlushMs = -Infinity;
  private reconnectAtMs: number | null = null;
  private recording: TrialRecord | null = null;
  private recordedLines: string[] = [];
  private trialCounter = 0;
  private nowMs = 0;

  constructor(options: SessionOptions) {
    this.opts = {
      sampleRateHz: 60,
      jitterPx: 0,
      batchMs: 100,
      reconnectDelayMs: 1000,
      maxFixations: 40,
      wsFactory: (url: string) => new WebSocket(url) as unknown as WebSocketLike,
      random: Math.random,
      ...options,
    };
  }

  connect(nowMs: number): void {
    this.nowMs = nowMs;
    this.teardown();
    this.state.phase = "connecting";
    this.state.lastError = null;
    const ws = this.opts.wsFactory(this.opts.url);
    this.ws = ws;
    ws.onopen = () => {
      this.seqOut = 1;
      ws.send(encodeInit(1, this.opts.object, this.opts.model));
    };
    ws.onmessage = (ev) => this.handleMessage(ev.data);
    ws.onclose = () => this.scheduleReconnect("connection closed");
    ws.onerror = () => this.scheduleReconnect("connection error");
  }

  close(): void {
    this.teardown();
    this.state.phase = "disconnected";
  }

  /** Latest pointer position in scene coordinates (null = off-canvas). */
  setPointer(x: number | null, y: number | null): void {
    this.pointer = x === null || y === null ? null : [x, y];
  }

  /**
   * Drive the clock: samples the pointer at the configured rate, flushes
   * batches, and retries dropped connections. Call from an interval or rAF.
   */
  advance(nowMs: number): void {
    this.nowMs = nowMs;
    if (this.reconnectAtMs !== null && nowMs >= this.reconnectAtMs) {
      this.reconnectAtMs = null;
      this.state.reconnects += 1;
      this.connect(nowMs);
      return;
    }
    if (this.state.phase !== "streaming" || this.ws === null) return;
    if (this.sessionStartMs === null) this.sessionStartMs = nowMs;

    const period = 1000 / this.opts.sampleRateHz;
    while (this.lastSampleMs + period <= nowMs) {
      this.lastSampleMs = this.lastSampleMs === -Infinity ? nowMs : this.lastSampleMs + period;
      if (this.pointer !== null) {
        const j = this.opts.jitterPx;
        this.pending.push({
          t_ms: this.lastSampleMs - this.sessionStartMs,
          x: this.pointer[0] + (j ? (this.opts.random() * 2 - 1) * j : 0),
          y: this.pointer[1] + (j ? (this.opts.random() * 2 - 1) * j : 0),
          confidence: 1.0,
        });
      }
    }
    if (this.pending.length > 0 && nowMs - this.lastFlushMs >= this.opts.batchMs) {
      this.lastFlushMs = nowMs;
      this.seqOut += 1;
      this.ws.send(encodeSamples(this.seqOut, this.pending));
      this.pending = [];
    }
  }

  startRecording(label: "GRASP" | "VIEW"): void {
    this.trialCounter += 1;
    this.recording = {
      trial_id: `demo-${label.toLowerCase()}-${String(this.trialCounter).padStart(5, "0")}`,
      participant_id: "demo-pointer",
      task_label: label,
      fixations: [],
      object: this.opts.object,
    };
  }

  /** Finish the labeled trial; returns its dataset line (JSON) or null. */
  stopRecording(): string | null {
    if (this.recording === null) return null;
    const rec = this.recording;
    this.recording = null;
    if (rec.fixations.length === 0) return null;
    const line = JSON.stringify(rec);
    this.recordedLines.push(line);
    return line;
  }

  /** All recorded trials in the dataset file format, one object per line. */
  datasetText(): string {
    return this.recordedLines.map((l) => l + "\n").join("");
  }

  private handleMessage(raw: string): void {
    let msg;
    try {
      msg = decodeServer(raw);
      this.seqIn.check(msg.seq);
    } catch (err) {
      this.scheduleReconnect(String(err));
      return;
    }
    switch (msg.type) {
      case "ack":
        this.state.phase = "streaming";
        break;
      case "fixation": {
        const f = msg.payload as unknown as FixationPayload;
        this.state.fixations.push(f);
        if (this.state.fixations.length > this.opts.maxFixations) {
          this.state.fixations.shift();
        }
        if (this.recording) this.recording.fixations.push(f);
        break;
      }
      case "features": {
        const fv = msg.payload as unknown as FeaturesPayload;
        this.state.features = fv;
        for (const name of ["adf2c", "adf2i", "adf2t", "var"] as const) {
          this.state.displayed.set(name, { value: fv[name], seq: msg.seq });
        }
        break;
      }
      case "intention": {
        const verdict = msg.payload as unknown as IntentionPayload;
        this.state.verdict = verdict;
        this.state.displayed.set("verdict_t_ms", { value: verdict.t_ms, seq: msg.seq });
        if (verdict.fired) this.state.firedAt = this.nowMs;
        break;
      }
      case "error": {
        const p = msg.payload as { code?: string; message?: string };
        this.scheduleReconnect(`${p.code}: ${p.message}`);
        break;
      }
    }
  }

  private scheduleReconnect(reason: string): void {
    if (this.state.phase === "disconnected" && this.reconnectAtMs !== null) return;
    this.teardown();
    this.state.phase = "disconnected";
    this.state.lastError = reason;
    this.reconnectAtMs = this.nowMs + this.opts.reconnectDelayMs;
  }

  private teardown(): void {
    if (this.ws !== null) {
      this.ws.onopen = this.ws.onmessage = this.ws.onclose = this.ws.onerror = null;
      try {
        this.ws.close();
      } catch {
        // already closed
      }
      this.ws = null;
    }
    // a fresh session must not show stale state
    this.seqIn = new SeqValidator();
    this.seqOut = 0;
    this.pending = [];
    this.sessionStartMs = null;
    this.lastSampleMs = -Infinity;
    this.lastFlushMs = -Infinity;
    this.state.verdict = null;
    this.state.features = null;
    this.state.fixations = [];
    this.state.firedAt = null;
    this.state.displayed.clear();
  }
}
