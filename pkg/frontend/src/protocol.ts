// Wire protocol: JSON messages over the engine WebSocket, {tick, kind, payload}
// in both directions.  This module is the only place message shapes live.

export interface QualityReport {
  coverage: number;
  balance: number;
  palette_match: number;
  overlap_penalty: number;
}

export interface SceneItem {
  agent: number;
  fragment: string;
  x: number;
  y: number;
  scale: number;
  opacity: number;
}

export interface SceneGraph {
  canvas: { width: number; height: number };
  background: number[];
  items: SceneItem[];
}

export type FragmentSpec =
  | { kind: "solid"; color: number[]; size: number[] }
  | { kind: "gradient"; start: number[]; stop: number[]; size: number[]; axis?: "x" | "y" }
  | { kind: "png"; data_b64: string };

export interface AgentInfo {
  id: number;
  fragment: FragmentSpec;
}

export interface CueView {
  sequence: string;
  sequence_index: number;
  phrase_counter: number;
  terminal: boolean;
  values: Record<string, number>;
}

export interface HelloPayload {
  title: string;
  states: string[];
  sequences: string[];
  agents: AgentInfo[];
  canvas: { width: number; height: number; background: number[] };
  config: Record<string, unknown>;
  scene: SceneGraph;
  moods: Record<string, number>;
  cue: CueView;
  recognized_state: string | null;
  observer: QualityReport | null;
  snapshots: number[];
}

export type ServerMessage =
  | { tick: number; kind: "hello"; payload: HelloPayload }
  | { tick: number; kind: "scene"; payload: SceneGraph }
  | { tick: number; kind: "moods"; payload: { moods: Record<string, number> } }
  | { tick: number; kind: "cue"; payload: CueView }
  | { tick: number; kind: "state"; payload: { recognized_state: string | null } }
  | { tick: number; kind: "observer"; payload: { report: QualityReport | null } }
  | { tick: number; kind: "digest"; payload: { scene_sha256: string } }
  | { tick: number; kind: "snapshot"; payload: { id: number } }
  | { tick: number; kind: "restored"; payload: { id: number } }
  | { tick: number; kind: "error"; payload: { reason: string } };

const KNOWN_KINDS = new Set([
  "hello",
  "scene",
  "moods",
  "cue",
  "state",
  "observer",
  "digest",
  "snapshot",
  "restored",
  "error",
]);

/** Parse one inbound frame; null means "not a usable server message". */
export function parseServerMessage(text: string): ServerMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) return null;
  const msg = obj as { tick?: unknown; kind?: unknown; payload?: unknown };
  if (typeof msg.tick !== "number" || !Number.isFinite(msg.tick)) return null;
  if (typeof msg.kind !== "string" || !KNOWN_KINDS.has(msg.kind)) return null;
  if (typeof msg.payload !== "object" || msg.payload === null) return null;
  return msg as ServerMessage;
}

export type EventKind =
  | "state_override"
  | "cue_advance"
  | "param_update"
  | "phrase_features"
  | "snapshot";

/** Encode an input event exactly the way the engine's gate expects it. */
export function encodeEvent(kind: EventKind, payload: Record<string, unknown> = {}): string {
  return JSON.stringify({ kind, payload });
}

export function encodeStateOverride(state: string): string {
  return encodeEvent("state_override", { state });
}

export function encodeCueAdvance(): string {
  return encodeEvent("cue_advance");
}

export function encodeParamUpdate(path: string, value: number | boolean): string {
  return encodeEvent("param_update", { path, value });
}

export function encodeSnapshot(): string {
  return encodeEvent("snapshot");
}

/** Restore is a control message, not an input event: it rewinds the engine. */
export function encodeRestore(id: number): string {
  return JSON.stringify({ kind: "restore", payload: { id } });
}
