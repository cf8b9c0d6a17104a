import { describe, expect, it } from "vitest";

import type { HelloPayload, SceneGraph, ServerMessage } from "../src/protocol";
import { ConsoleStore } from "../src/store";

function sceneGraph(x: number): SceneGraph {
  return {
    canvas: { width: 8, height: 8 },
    background: [0, 0, 0],
    items: [{ agent: 0, fragment: "agent-0", x, y: 0, scale: 1, opacity: 1 }],
  };
}

function hello(tick = 0): ServerMessage {
  const payload: HelloPayload = {
    title: "t",
    states: ["neutral", "fear"],
    sequences: ["seq-a", "seq-b"],
    agents: [{ id: 0, fragment: { kind: "solid", color: [1, 0, 0, 1], size: [2, 2] } }],
    canvas: { width: 8, height: 8, background: [0, 0, 0] },
    config: {},
    scene: sceneGraph(0),
    moods: { "0": 0 },
    cue: { sequence: "seq-a", sequence_index: 0, phrase_counter: 0, terminal: false, values: {} },
    recognized_state: null,
    observer: null,
    snapshots: [],
  };
  return { tick, kind: "hello", payload };
}

function msg(tick: number, kind: string, payload: unknown): ServerMessage {
  return { tick, kind, payload } as ServerMessage;
}

describe("ConsoleStore", () => {
  it("hello initializes every panel at one tick", () => {
    const store = new ConsoleStore();
    store.apply(hello(5));
    expect(store.scene?.tick).toBe(5);
    expect(store.moods?.tick).toBe(5);
    expect(store.cue?.value.sequence).toBe("seq-a");
    expect(store.lastTick).toBe(5);
  });

  it("drops scene graphs older than the last rendered tick", () => {
    const store = new ConsoleStore();
    store.apply(hello(0));
    expect(store.apply(msg(10, "scene", sceneGraph(3)))).toBe(true);
    expect(store.apply(msg(7, "scene", sceneGraph(9)))).toBe(false); // stale
    expect(store.scene?.tick).toBe(10);
    expect(store.scene?.value.items[0]!.x).toBe(3);
  });

  it("restored lowers the render floor and marks the branch", () => {
    const store = new ConsoleStore();
    store.apply(hello(0));
    store.apply(msg(20, "scene", sceneGraph(1)));
    store.apply(msg(20, "snapshot", { id: 1 }));
    expect(store.snapshots).toEqual([1]);
    store.apply(msg(40, "moods", { moods: { "0": 2 } }));
    store.apply(msg(20, "restored", { id: 1 }));
    expect(store.branchMarks).toEqual([20]);
    // post-restore scene at an "older" tick now renders
    expect(store.apply(msg(25, "scene", sceneGraph(7)))).toBe(true);
    expect(store.scene?.value.items[0]!.x).toBe(7);
    // mood samples from the abandoned branch are trimmed
    expect(store.moodSeries(0).every((s) => s.tick <= 20)).toBe(true);
  });

  it("keeps a bounded per-agent mood history with tick stamps", () => {
    const store = new ConsoleStore();
    store.apply(hello(0));
    for (let t = 1; t <= 500; t++) store.apply(msg(t, "moods", { moods: { "0": t / 100 } }));
    const series = store.moodSeries(0);
    expect(series.length).toBeLessThanOrEqual(400);
    expect(series[series.length - 1]).toEqual({ tick: 500, mood: 5 });
    const ticks = series.map((s) => s.tick);
    expect([...ticks].sort((a, b) => a - b)).toEqual(ticks);
  });

  it("tracks error banner and clears it", () => {
    const store = new ConsoleStore();
    store.apply(msg(1, "error", { reason: "unknown snapshot id 9" }));
    expect(store.errorBanner).toContain("unknown snapshot");
    store.clearError();
    expect(store.errorBanner).toBeNull();
  });

  it("observer and digest panels carry their tick", () => {
    const store = new ConsoleStore();
    store.apply(
      msg(12, "observer", {
        report: { coverage: 0.5, balance: 1, palette_match: 0.25, overlap_penalty: 0 },
      }),
    );
    store.apply(msg(12, "digest", { scene_sha256: "feed" }));
    expect(store.observer?.tick).toBe(12);
    expect(store.lastDigest?.value).toBe("feed");
  });

  it("a fresh store holds no stale engine state", () => {
    const a = new ConsoleStore();
    a.apply(hello(0));
    a.apply(msg(9, "scene", sceneGraph(4)));
    const b = new ConsoleStore(); // "reconnect after engine restart"
    expect(b.scene).toBeNull();
    expect(b.snapshots).toEqual([]);
    expect(b.lastTick).toBe(0);
  });

  it("caps the raw message log", () => {
    const store = new ConsoleStore();
    for (let i = 0; i < 500; i++) store.logInbound(`m${i}`);
    expect(store.log.length).toBeLessThanOrEqual(200);
    expect(store.log[store.log.length - 1]!.text).toBe("m499");
  });
});
