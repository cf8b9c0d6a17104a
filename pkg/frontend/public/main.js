// src/connection.ts
var RETRY_MS = [1e3, 2e3, 4e3, 5e3];
var Connection = class {
  constructor(url, callbacks, factory = (u) => new WebSocket(u)) {
    this.url = url;
    this.callbacks = callbacks;
    this.factory = factory;
    this.socket = null;
    this.attempts = 0;
    this.closed = false;
    this.timer = null;
  }
  open() {
    if (this.closed) return;
    this.callbacks.onStatus("connecting");
    let socket;
    try {
      socket = this.factory(this.url);
    } catch {
      this.scheduleRetry();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.callbacks.onStatus("connected");
    };
    socket.onmessage = (ev) => {
      if (typeof ev.data === "string") this.callbacks.onMessage(ev.data);
    };
    socket.onclose = () => {
      this.socket = null;
      if (!this.closed) {
        this.callbacks.onStatus("disconnected");
        this.scheduleRetry();
      }
    };
    socket.onerror = () => {
    };
  }
  send(text) {
    if (this.socket === null) return false;
    try {
      this.socket.send(text);
      return true;
    } catch {
      return false;
    }
  }
  close() {
    this.closed = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.socket?.close();
    this.socket = null;
  }
  scheduleRetry() {
    const delay = RETRY_MS[Math.min(this.attempts, RETRY_MS.length - 1)];
    this.attempts += 1;
    this.timer = setTimeout(() => this.open(), delay);
  }
};

// src/protocol.ts
var KNOWN_KINDS = /* @__PURE__ */ new Set([
  "hello",
  "scene",
  "moods",
  "cue",
  "state",
  "observer",
  "digest",
  "snapshot",
  "restored",
  "error"
]);
function parseServerMessage(text) {
  let obj;
  try {
    obj = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) return null;
  const msg = obj;
  if (typeof msg.tick !== "number" || !Number.isFinite(msg.tick)) return null;
  if (typeof msg.kind !== "string" || !KNOWN_KINDS.has(msg.kind)) return null;
  if (typeof msg.payload !== "object" || msg.payload === null) return null;
  return msg;
}
function encodeEvent(kind, payload = {}) {
  return JSON.stringify({ kind, payload });
}
function encodeStateOverride(state) {
  return encodeEvent("state_override", { state });
}
function encodeCueAdvance() {
  return encodeEvent("cue_advance");
}
function encodeParamUpdate(path, value) {
  return encodeEvent("param_update", { path, value });
}
function encodeSnapshot() {
  return encodeEvent("snapshot");
}
function encodeRestore(id) {
  return JSON.stringify({ kind: "restore", payload: { id } });
}

// src/renderer.ts
function rgba(values) {
  return [values[0] ?? 0, values[1] ?? 0, values[2] ?? 0, values[3] ?? 1];
}
function fragmentSize(spec) {
  if (spec.kind === "solid" || spec.kind === "gradient") {
    const [w, h] = spec.size;
    if (w === void 0 || h === void 0 || w <= 0 || h <= 0) return null;
    return [w, h];
  }
  return null;
}
function fillOf(spec) {
  if (spec.kind === "solid") return { kind: "solid", color: rgba(spec.color) };
  if (spec.kind === "gradient")
    return {
      kind: "gradient",
      axis: spec.axis ?? "x",
      from: rgba(spec.start),
      to: rgba(spec.stop)
    };
  return { kind: "png", data_b64: spec.data_b64 };
}
function sceneToDrawOps(scene, fragmentsByAgent2, pngSizes2) {
  if (!scene.canvas || scene.canvas.width <= 0 || scene.canvas.height <= 0) return null;
  if (!Array.isArray(scene.items) || !Array.isArray(scene.background)) return null;
  const ops = [
    {
      op: "background",
      width: scene.canvas.width,
      height: scene.canvas.height,
      color: [scene.background[0] ?? 0, scene.background[1] ?? 0, scene.background[2] ?? 0]
    }
  ];
  const ordered = [...scene.items].sort((a, b) => a.agent - b.agent);
  for (const item of ordered) {
    const spec = fragmentsByAgent2.get(item.agent);
    if (spec === void 0) return null;
    if (typeof item.x !== "number" || typeof item.y !== "number" || !(item.scale > 0) || item.opacity < 0 || item.opacity > 1)
      return null;
    const size = fragmentSize(spec) ?? pngSizes2?.get(item.agent) ?? null;
    if (size === null && spec.kind !== "png") return null;
    const [w, h] = size ?? [0, 0];
    ops.push({
      op: "fragment",
      agent: item.agent,
      x: item.x,
      y: item.y,
      width: w * item.scale,
      height: h * item.scale,
      opacity: item.opacity,
      fill: fillOf(spec)
    });
  }
  return ops;
}
function cssColor(c) {
  const [r, g, b] = c;
  const a = c.length > 3 ? c[3] : 1;
  return `rgba(${Math.round(r * 255)}, ${Math.round(g * 255)}, ${Math.round(b * 255)}, ${a})`;
}
function drawScene(ctx, ops, scale, bitmaps) {
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
      const gradient = op.fill.axis === "x" ? ctx.createLinearGradient(op.x, op.y, op.x + op.width, op.y) : ctx.createLinearGradient(op.x, op.y, op.x, op.y + op.height);
      gradient.addColorStop(0, cssColor(op.fill.from));
      gradient.addColorStop(1, cssColor(op.fill.to));
      ctx.fillStyle = gradient;
      ctx.fillRect(op.x, op.y, op.width, op.height);
    } else {
      const bitmap = bitmaps.get(op.agent);
      if (bitmap !== void 0) {
        const w = op.width > 0 ? op.width : bitmap.width;
        const h = op.height > 0 ? op.height : bitmap.height;
        ctx.drawImage(bitmap, op.x, op.y, w, h);
      }
    }
  }
  ctx.restore();
}

// src/sparkline.ts
function sparklinePath(samples, width, height, moodBound, tickWindow, lastTick, branchMarks = []) {
  const t0 = Math.max(0, lastTick - tickWindow);
  const xOf = (tick) => (tick - t0) / Math.max(1, tickWindow) * width;
  const yOf = (mood) => {
    const clamped = Math.max(-moodBound, Math.min(moodBound, mood));
    return height / 2 - clamped / moodBound * (height / 2);
  };
  const visible = samples.filter((s) => s.tick >= t0 && s.tick <= lastTick);
  let path = "";
  for (const [i, s] of visible.entries()) {
    const cmd = i === 0 ? "M" : "L";
    path += `${cmd}${xOf(s.tick).toFixed(2)},${yOf(s.mood).toFixed(2)}`;
  }
  const marks = branchMarks.filter((t) => t >= t0 && t <= lastTick).map((t) => xOf(t));
  return { path, marks };
}

// src/store.ts
var MOOD_HISTORY_LIMIT = 400;
var LOG_LIMIT = 200;
var ConsoleStore = class {
  constructor() {
    this.status = "connecting";
    this.lastTick = 0;
    this.hello = null;
    this.scene = null;
    this.moods = null;
    this.cue = null;
    this.recognized = null;
    this.observer = null;
    this.lastDigest = null;
    this.moodHistory = /* @__PURE__ */ new Map();
    this.branchMarks = [];
    this.snapshots = [];
    this.pendingSnapshot = null;
    this.errorBanner = null;
    this.log = [];
    this.sceneTickFloor = 0;
  }
  /** True when the message changed something a panel shows. */
  apply(msg) {
    this.lastTick = Math.max(this.lastTick, msg.tick);
    switch (msg.kind) {
      case "hello": {
        const p = msg.payload;
        this.hello = {
          title: p.title,
          states: p.states,
          sequences: p.sequences,
          agents: p.agents
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
  clearError() {
    this.errorBanner = null;
  }
  note(text) {
    this.pushLog({ direction: "note", text });
  }
  logInbound(text) {
    this.pushLog({ direction: "in", text });
  }
  logOutbound(text) {
    this.pushLog({ direction: "out", text });
  }
  moodSeries(agentId) {
    return this.moodHistory.get(agentId) ?? [];
  }
  pushLog(line) {
    this.log.push(line);
    if (this.log.length > LOG_LIMIT) this.log.splice(0, this.log.length - LOG_LIMIT);
  }
  recordMoods(tick, moods) {
    for (const [key, mood] of Object.entries(moods)) {
      const id = Number(key);
      let series = this.moodHistory.get(id);
      if (series === void 0) {
        series = [];
        this.moodHistory.set(id, series);
      }
      const last = series[series.length - 1];
      if (last !== void 0 && last.tick === tick) {
        last.mood = mood;
      } else {
        series.push({ tick, mood });
      }
      if (series.length > MOOD_HISTORY_LIMIT) series.splice(0, series.length - MOOD_HISTORY_LIMIT);
    }
  }
  trimHistoryAfter(tick) {
    for (const series of this.moodHistory.values()) {
      while (series.length > 0 && series[series.length - 1].tick > tick) series.pop();
    }
  }
};

// src/main.ts
var MOOD_BOUND = 10;
var TICK_WINDOW = 240;
var AGENT_COLORS = ["#e4573d", "#3d9be4", "#e4c43d", "#9b3de4", "#3de48c", "#e43db0"];
var store = new ConsoleStore();
var fragmentsByAgent = /* @__PURE__ */ new Map();
var pngBitmaps = /* @__PURE__ */ new Map();
var pngSizes = /* @__PURE__ */ new Map();
function el(id) {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node;
}
var statusEl = el("status");
var tickEl = el("tick");
var titleEl = el("title");
var cueStrip = el("cue-strip");
var cueTick = el("cue-tick");
var sceneCanvas = el("scene");
var sceneTick = el("scene-tick");
var moodSvg = el("mood-svg");
var moodTick = el("mood-tick");
var observerEl = el("observer");
var observerTick = el("observer-tick");
var stateButtons = el("state-buttons");
var recognizedEl = el("recognized");
var slidersEl = el("sliders");
var sensAgent = el("sens-agent");
var sensState = el("sens-state");
var sensSlider = el("sens-slider");
var sensValue = el("sens-value");
var snapshotList = el("snapshot-list");
var errorBanner = el("error-banner");
var rawLog = el("raw-log");
function send(frame) {
  if (connection.send(frame)) store.logOutbound(frame);
  else store.note("not connected; frame dropped");
  renderLog();
}
function renderStatus() {
  statusEl.textContent = store.status;
  statusEl.className = `status status-${store.status}`;
  tickEl.textContent = String(store.lastTick);
}
function renderCue() {
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
    })
  );
  if (cue.terminal) {
    const badge = document.createElement("span");
    badge.className = "cue-box cue-terminal";
    badge.textContent = "terminal";
    cueStrip.appendChild(badge);
  }
}
function renderScene() {
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
function renderMoods() {
  if (store.hello === null || store.moods === null) return;
  moodTick.textContent = `@${store.moods.tick}`;
  const width = 320;
  const height = 90;
  const parts = [
    `<line x1="0" y1="${height / 2}" x2="${width}" y2="${height / 2}" class="axis"/>`
  ];
  for (const agent of store.hello.agents) {
    const geometry = sparklinePath(
      store.moodSeries(agent.id),
      width,
      height,
      MOOD_BOUND,
      TICK_WINDOW,
      store.lastTick,
      store.branchMarks
    );
    const color = AGENT_COLORS[agent.id % AGENT_COLORS.length];
    if (geometry.path !== "")
      parts.push(`<path d="${geometry.path}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    for (const x of geometry.marks)
      parts.push(`<line x1="${x}" y1="0" x2="${x}" y2="${height}" class="branch-mark"/>`);
  }
  moodSvg.innerHTML = parts.join("");
  const legend = store.hello.agents.map((a) => {
    const mood = store.moods?.value[String(a.id)] ?? 0;
    const color = AGENT_COLORS[a.id % AGENT_COLORS.length];
    return `<span style="color:${color}">a${a.id} ${mood.toFixed(2)}</span>`;
  }).join(" ");
  el("mood-legend").innerHTML = legend;
}
function renderObserver() {
  if (store.observer === null) return;
  observerTick.textContent = `@${store.observer.tick}`;
  const report = store.observer.value;
  if (report === null) {
    observerEl.textContent = "no report yet";
    return;
  }
  observerEl.replaceChildren(
    ...[
      ["coverage", report.coverage],
      ["balance", report.balance],
      ["palette", report.palette_match],
      ["overlap", report.overlap_penalty]
    ].map(([name, value]) => {
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
    })
  );
}
function renderRecognized() {
  if (store.recognized === null) return;
  recognizedEl.textContent = `${store.recognized.value ?? "none"} @${store.recognized.tick}`;
}
function renderSnapshots() {
  snapshotList.replaceChildren(
    ...store.snapshots.map((id) => {
      const button = document.createElement("button");
      button.textContent = `restore #${id}`;
      button.onclick = () => send(encodeRestore(id));
      return button;
    })
  );
}
function renderError() {
  if (store.errorBanner === null) {
    errorBanner.hidden = true;
  } else {
    errorBanner.hidden = false;
    errorBanner.textContent = store.errorBanner;
  }
}
function renderLog() {
  rawLog.textContent = store.log.slice(-25).map((l) => `${l.direction === "in" ? "<-" : l.direction === "out" ? "->" : "--"} ${l.text}`).join("\n");
  rawLog.scrollTop = rawLog.scrollHeight;
}
function renderAll() {
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
function slider(label, min, max, step, initial, path) {
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
function buildControls() {
  if (store.hello === null) return;
  const hello = store.hello;
  stateButtons.replaceChildren(
    ...hello.states.map((state) => {
      const button = document.createElement("button");
      button.textContent = state;
      button.onclick = () => send(encodeStateOverride(state));
      return button;
    })
  );
  const currentSeq = () => store.cue?.value.sequence ?? hello.sequences[0];
  slidersEl.replaceChildren(
    slider("kappa", 0.01, 1, 0.01, 0.5, "troupe.kappa"),
    slider("theta+", 0, 10, 0.25, 5, "troupe.theta_plus"),
    slider("theta-", -10, 0, 0.25, -5, "troupe.theta_minus"),
    slider("decay", 0, 1, 0.01, 0.9, "troupe.decay")
  );
  for (const weight of ["w_cov", "w_bal", "w_pal", "w_ovl"]) {
    const row = slider(`${weight}`, 0, 3, 0.05, 1, "placeholder");
    const input = row.querySelector("input");
    input.onchange = () => send(encodeParamUpdate(`sequence.${currentSeq()}.${weight}`, Number(input.value)));
    slidersEl.appendChild(row);
  }
  sensAgent.replaceChildren(
    ...hello.agents.map((a) => new Option(`agent ${a.id}`, String(a.id)))
  );
  sensState.replaceChildren(...hello.states.map((s) => new Option(s, s)));
  sensSlider.oninput = () => {
    sensValue.textContent = Number(sensSlider.value).toFixed(1);
  };
  sensSlider.onchange = () => send(
    encodeParamUpdate(
      `sensitivity.${sensAgent.value}.${currentSeq()}.${sensState.value}`,
      Number(sensSlider.value)
    )
  );
  el("cue-advance").onclick = () => send(encodeCueAdvance());
  el("snapshot").onclick = () => send(encodeSnapshot());
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
var wsUrl = `ws://${location.host}/ws`;
var connection = new Connection(wsUrl, {
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
  }
});
el("clear-error").onclick = () => {
  store.clearError();
  renderError();
};
connection.open();
renderAll();
