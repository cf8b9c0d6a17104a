// Console session state.  One reducer applies inbound messages in arrival
// order; every displayed quantity keeps the tick that produced it, and scene
// graphs never render backwards (a restore explicitly lowers the floor).

import type {
  AgentInfo,
  CueView,
  QualityReport,
  SceneGraph,
  ServerMessage,
} from "./protocol";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface Stamped<T> {
  tick: number;
  value: T;
}

export interface MoodSample {
  tick: number;
  mood: number;
}

export interface LogLine {
  direction: "in" | "out" | "note";
  text: string;
}

const MOOD_HISTORY_LIMIT = 400;
const LOG_LIMIT = 200;

export class ConsoleStore {
  status: ConnectionStatus = "connecting";
  lastTick = 0;
  hello: { title: string; states: string[]; sequences: string[]; agents: AgentInfo[] } | null =
    null;
  scene: Stamped<SceneGraph> | null = null;
  moods: Stamped<Record<string, number>> | null = null;
  cue: Stamped<CueView> | null = null;
  recognized: Stamped<string | null> | null = null;
  observer: Stamped<QualityReport | null> | null = null;
  lastDigest: Stamped<string> | null = null;
  moodHistory = new Map<number, MoodSample[]>();
  branchMarks: number[] = [];
  snapshots: number[] = [];
  pendingSnapshot: number | null = null;
  errorBanner: string | null = null;
  log: LogLine[] = [];

  private sceneTickFloor = 0;

  /** True when the message changed something a panel shows. */
  apply(msg: ServerMessage): boolean {
    this.lastTick = Math.max(this.lastTick, msg.tick);
    switch (msg.kind) {
      case "hello": {
        const p = msg.payload;
        this.hello = {
          title: p.title,
          states: p.states,
          sequences: p.sequences,
          agents: p.agents,
        };
        this.scene = { tick: msg.tick, value: p.scene };
        this.sceneTickFloor = msg.tick;
        this.moods = { tick: msg.tick, value: p.moods };
        this.cue = { tick: msg.tick, value: p.cue };
        this.recognized = { tick: msg.tick, value: p.recognized_state };
        this.observer = { tick: msg.tick, value: p.observer };
        this.snapshots = [...p.snapshots];
        this.recordMoods(msg.tick, p.moods);
        return true;
      }
      case "scene":
        // no backward flicker: drop graphs older than the last rendered one
        if (msg.tick < this.sceneTickFloor) return false;
        this.scene = { tick: msg.tick, value: msg.payload };
        this.sceneTickFloor = msg.tick;
        return true;
      case "moods":
        this.moods = { tick: msg.tick, value: msg.payload.moods };
        this.recordMoods(msg.tick, msg.payload.moods);
        return true;
      case "cue":
        this.cue = { tick: msg.tick, value: msg.payload };
        return true;
      case "state":
        this.recognized = { tick: msg.tick, value: msg.payload.recognized_state };
        return true;
      case "observer":
        this.observer = { tick: msg.tick, value: msg.payload.report };
        return true;
      case "digest":
        this.lastDigest = { tick: msg.tick, value: msg.payload.scene_sha256 };
        return true;
      case "snapshot":
        if (!this.snapshots.includes(msg.payload.id)) this.snapshots.push(msg.payload.id);
        this.pendingSnapshot = msg.payload.id;
        this.note(`snapshot ${msg.payload.id} taken at tick ${msg.tick}`);
        return true;
      case "restored":
        // the engine rewound: lower the render floor and mark the branch
        this.sceneTickFloor = msg.tick;
        this.branchMarks.push(msg.tick);
        this.trimHistoryAfter(msg.tick);
        this.note(`restored snapshot ${msg.payload.id} at tick ${msg.tick}`);
        return true;
      case "error":
        this.errorBanner = msg.payload.reason;
        this.note(`engine error: ${msg.payload.reason}`);
        return true;
    }
  }

  clearError(): void {
    this.errorBanner = null;
  }

  note(text: string): void {
    this.pushLog({ direction: "note", text });
  }

  logInbound(text: string): void {
    this.pushLog({ direction: "in", text });
  }

  logOutbound(text: string): void {
    this.pushLog({ direction: "out", text });
  }

  moodSeries(agentId: number): MoodSample[] {
    return this.moodHistory.get(agentId) ?? [];
  }

  private pushLog(line: LogLine): void {
    this.log.push(line);
    if (this.log.length > LOG_LIMIT) this.log.splice(0, this.log.length - LOG_LIMIT);
  }

  private recordMoods(tick: number, moods: Record<string, number>): void {
    for (const [key, mood] of Object.entries(moods)) {
      const id = Number(key);
      let series = this.moodHistory.get(id);
      if (series === undefined) {
        series = [];
        this.moodHistory.set(id, series);
      }
      const last = series[series.length - 1];
      if (last !== undefined && last.tick === tick) {
        last.mood = mood;
      } else {
        series.push({ tick, mood });
      }
      if (series.length > MOOD_HISTORY_LIMIT) series.splice(0, series.length - MOOD_HISTORY_LIMIT);
    }
  }

  private trimHistoryAfter(tick: number): void {
    // samples from the abandoned branch would draw a false future
    for (const series of this.moodHistory.values()) {
      while (series.length > 0 && series[series.length - 1]!.tick > tick) series.pop();
    }
  }
}
