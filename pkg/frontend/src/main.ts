// The rehearsal console: one WebSocket to the engine, one panel per outbound
// stream.  All engine truth lives server-side; this file only wires DOM.

import { Connection } from "./connection";
import {
  encodeCueAdvance,
  encodeParamUpdate,
  encodeRestore,
  encodeSnapshot,
  encodeStateOverride,
  parseServerMessage,
  type FragmentSpec,
} from "./protocol";
import { drawScene, sceneToDrawOps } from "./renderer";
import { sparklinePath } from "./sparkline";
import { ConsoleStore } from "./store";

const MOOD_BOUND = 10;
const TICK_WINDOW = 240;
const AGENT_COLORS = ["#e4573d", "#3d9be4", "#e4c43d", "#9b3de4", "#3de48c", "#e43db0"];

const store = new ConsoleStore();
const fragmentsByAgent = new Map<number, FragmentSpec>();
const pngBitmaps = new Map<number, HTMLImageElement>();
const pngSizes = new Map<number, [number, number]>();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

const statusEl = el<HTMLSpanElement>("status");
const tickEl = el<HTMLSpanElement>("tick");
const titleEl = el<HTMLSpanElement>("title");
const cueStrip = el<HTMLDivElement>("cue-strip");
const cueTick = el<HTMLSpanElement>("cue-tick");
const sceneCanvas = el<HTMLCanvasElement>("scene");
const sceneTick = el<HTMLSpanElement>("scene-tick");
const moodSvg = el<HTMLElement>("mood-svg");
const moodTick = el<HTMLSpanElement>("mood-tick");
const observerEl = el<HTMLDivElement>("observer");
const observerTick = el<HTMLSpanElement>("observer-tick");
const stateButtons = el<HTMLDivElement>("state-buttons");
const recognizedEl = el<HTMLSpanElement>("recognized");
const slidersEl = el<HTMLDivElement>("sliders");
const sensAgent = el<HTMLSelectElement>("sens-agent");
const sensState = el<HTMLSelectElement>("sens-state");
const sensSlider = el<HTMLInputElement>("sens-slider");
const sensValue = el<HTMLSpanElement>("sens-value");
const snapshotList = el<HTMLDivElement>("snapshot-list");
const errorBanner = el<HTMLDivElement>("error-banner");
const rawLog = el<HTMLPreElement>("raw-log");

function send(frame: string): void {
  if (connection.send(frame)) store.logOutbound(frame);
  else store.note("not connected; frame dropped");
  renderLog();
}

// ---------------------------------------------------------------------------
// panels
// ---------------------------------------------------------------------------

function renderStatus(): void {
  statusEl.textContent = store.status;
  statusEl.className = `status status-${store.status}`;
  tickEl.textContent = String(store.lastTick);
}

function renderCue(): void {
  if (store.hello === null || store.cue === null) return;
  const cue = store.cue.value;
  cueTick.textContent = `@${store.cue.tick}`;
  cueStrip.replaceChildren(
    ...store.hello.sequences.map((seq, index) => {
      const box = document.createElement("span");
      box.className = "cue-box" + (index === cue.sequence_index ? " cue-active" : "");
      box.textContent = seq;
      if (index === cue.sequence_index) {
        const phrase = document.createElement("small");
        phrase.textContent = ` phrase ${cue.phrase_counter}`;
        box.appendChild(phrase);
      }
      return box;
    }),
  );
  if (cue.terminal) {
    const badge = document.createElement("span");
    badge.className = "cue-box cue-terminal";
    badge.textContent = "terminal";
    cueStrip.appendChild(badge);
  }
}

function renderScene(): void {
  if (store.scene === null) return;
  const graph = store.scene.value;
  const ops = sceneToDrawOps(graph, fragmentsByAgent, pngSizes);
  if (ops === null) {
    store.note("malformed scene graph; keeping last good frame");
    renderLog();
    return;
  }
  const scale = Math.max(1, Math.floor(640 / graph.canvas.width));
  sceneCanvas.width = graph.canvas.width * scale;
  sceneCanvas.height = graph.canvas.height * scale;
  const ctx = sceneCanvas.getContext("2d");
  if (ctx === null) return;
  drawScene(ctx, ops, scale, pngBitmaps);
  sceneTick.textContent = `@${store.scene.tick}`;
}

function renderMoods(): void {
  if (store.hello === null || store.moods === null) return;
  moodTick.textContent = `@${store.moods.tick}`;
  const width = 320;
  const height = 90;
  const parts: string[] = [
    `<line x1="0" y1="${height / 2}" x2="${width}" y2="${height / 2}" class="axis"/>`,
  ];
  for (const agent of store.hello.agents) {
    const geometry = sparklinePath(
      store.moodSeries(agent.id),
      width,
      height,
      MOOD_BOUND,
      TICK_WINDOW,
      store.lastTick,
      store.branchMarks,
    );
    const color = AGENT_COLORS[agent.id % AGENT_COLORS.length];
    if (geometry.path !== "")
      parts.push(`<path d="${geometry.path}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    for (const x of geometry.marks)
      parts.push(`<line x1="${x}" y1="0" x2="${x}" y2="${height}" class="branch-mark"/>`);
  }
  moodSvg.innerHTML = parts.join("");
  const legend = store.hello.agents
    .map((a) => {
      const mood = store.moods?.value[String(a.id)] ?? 0;
      const color = AGENT_COLORS[a.id % AGENT_COLORS.length];
      return `<span style="color:${color}">a${a.id} ${mood.toFixed(2)}</span>`;
    })
    .join(" ");
  el<HTMLDivElement>("mood-legend").innerHTML = legend;
}

function renderObserver(): void {
  if (store.observer === null) return;
  observerTick.textContent = `@${store.observer.tick}`;
  const report = store.observer.value;
  if (report === null) {
    observerEl.textContent = "no report yet";
    return;
  }
  observerEl.replaceChildren(
    ...(
      [
        ["coverage", report.coverage],
        ["balance", report.balance],
        ["palette", report.palette_match],
        ["overlap", report.overlap_penalty],
      ] as const
    ).map(([name, value]) => {
      const row = document.createElement("div");
      row.className = "gauge";
      const label = document.createElement("span");
      label.textContent = `${name} ${value.toFixed(3)}`;
      const bar = document.createElement("div");
      bar.className = "gauge-bar";
      const fill = document.createElement("div");
      fill.className = "gauge-fill" + (name === "overlap" ? " gauge-bad" : "");
      fill.style.width = `${Math.round(value * 100)}%`;
      bar.appendChild(fill);
      row.append(label, bar);
      return row;
    }),
  );
}

function renderRecognized(): void {
  if (store.recognized === null) return;
  recognizedEl.textContent = `${store.recognized.value ?? "none"} @${store.recognized.tick}`;
}

function renderSnapshots(): void {
  snapshotList.replaceChildren(
    ...store.snapshots.map((id) => {
      const button = document.createElement("button");
      button.textContent = `restore #${id}`;
      button.onclick = () => send(encodeRestore(id));
      return button;
    }),
  );
}

function renderError(): void {
  if (store.errorBanner === null) {
    errorBanner.hidden = true;
  } else {
    errorBanner.hidden = false;
    errorBanner.textContent = store.errorBanner;
  }
}

function renderLog(): void {
  rawLog.textContent = store.log
    .slice(-25)
    .map((l) => `${l.direction === "in" ? "<-" : l.direction === "out" ? "->" : "--"} ${l.text}`)
    .join("\n");
  rawLog.scrollTop = rawLog.scrollHeight;
}

function renderAll(): void {
  renderStatus();
  renderCue();
  renderScene();
  renderMoods();
  renderObserver();
  renderRecognized();
  renderSnapshots();
  renderError();
  renderLog();
}

// ---------------------------------------------------------------------------
// controls built after hello
// ---------------------------------------------------------------------------

function slider(
  label: string,
  min: number,
  max: number,
  step: number,
  initial: number,
  path: string,
): HTMLElement {
  const row = document.createElement("label");
  row.className = "slider-row";
  const value = document.createElement("span");
  value.textContent = initial.toFixed(2);
  const input = document.createElement("input");
  input.type = "range";
  input.min = String(min);
  input.max = String(max);
  input.step = String(step);
  input.value = String(initial);
  input.oninput = () => {
    value.textContent = Number(input.value).toFixed(2);
  };
  input.onchange = () => send(encodeParamUpdate(path, Number(input.value)));
  const name = document.createElement("span");
  name.textContent = label;
  row.append(name, input, value);
  return row;
}

function buildControls(): void {
  if (store.hello === null) return;
  const hello = store.hello;

  stateButtons.replaceChildren(
    ...hello.states.map((state) => {
      const button = document.createElement("button");
      button.textContent = state;
      button.onclick = () => send(encodeStateOverride(state));
      return button;
    }),
  );

  const currentSeq = () => store.cue?.value.sequence ?? hello.sequences[0];
  slidersEl.replaceChildren(
    slider("kappa", 0.01, 1, 0.01, 0.5, "troupe.kappa"),
    slider("theta+", 0, 10, 0.25, 5, "troupe.theta_plus"),
    slider("theta-", -10, 0, 0.25, -5, "troupe.theta_minus"),
    slider("decay", 0, 1, 0.01, 0.9, "troupe.decay"),
  );
  for (const weight of ["w_cov", "w_bal", "w_pal", "w_ovl"]) {
    const row = slider(`${weight}`, 0, 3, 0.05, 1, "placeholder");
    const input = row.querySelector("input")!;
    input.onchange = () =>
      send(encodeParamUpdate(`sequence.${currentSeq()}.${weight}`, Number(input.value)));
    slidersEl.appendChild(row);
  }

  sensAgent.replaceChildren(
    ...hello.agents.map((a) => new Option(`agent ${a.id}`, String(a.id))),
  );
  sensState.replaceChildren(...hello.states.map((s) => new Option(s, s)));
  sensSlider.oninput = () => {
    sensValue.textContent = Number(sensSlider.value).toFixed(1);
  };
  sensSlider.onchange = () =>
    send(
      encodeParamUpdate(
        `sensitivity.${sensAgent.value}.${currentSeq()}.${sensState.value}`,
        Number(sensSlider.value),
      ),
    );

  el<HTMLButtonElement>("cue-advance").onclick = () => send(encodeCueAdvance());
  el<HTMLButtonElement>("snapshot").onclick = () => send(encodeSnapshot());

  fragmentsByAgent.clear();
  pngBitmaps.clear();
  pngSizes.clear();
  for (const agent of hello.agents) {
    fragmentsByAgent.set(agent.id, agent.fragment);
    if (agent.fragment.kind === "png") {
      const image = new Image();
      image.onload = () => {
        pngSizes.set(agent.id, [image.naturalWidth, image.naturalHeight]);
        pngBitmaps.set(agent.id, image);
        renderScene();
      };
      image.src = `data:image/png;base64,${agent.fragment.data_b64}`;
    }
  }
  titleEl.textContent = hello.title;
}

// ---------------------------------------------------------------------------
// connection
// ---------------------------------------------------------------------------

const wsUrl = `ws://${location.host}/ws`;
const connection = new Connection(wsUrl, {
  onStatus(status) {
    store.status = status;
    renderStatus();
  },
  onMessage(text) {
    const msg = parseServerMessage(text);
    if (msg === null) {
      store.note(`unparseable frame: ${text.slice(0, 120)}`);
      renderLog();
      return;
    }
    store.logInbound(`${msg.kind} @${msg.tick}`);
    const changed = store.apply(msg);
    if (msg.kind === "hello") buildControls();
    if (changed) renderAll();
  },
});

el<HTMLButtonElement>("clear-error").onclick = () => {
  store.clearError();
  renderError();
};

connection.open();
renderAll();
