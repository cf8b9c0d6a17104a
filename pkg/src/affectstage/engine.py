"""The closed loop at desk scale.

A fixed logical clock drives: event ingestion (phrase features are classified
into a recognized state), mood stimulus, fixed-period mood compensation,
greedy agent steps in id order, periodic observer reports, and periodic scene
digests.  Every input is event-sourced into a session log whose digests make
replay bit-exact verifiable.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import canvas as cv
from .audio import AudioClip
from .emotion import EmotionNet, classify, model_to_text
from .features import (
    FeatureConfig,
    FeatureVector12,
    SegmentationConfig,
    phrase_vector,
    segment_phrases,
)
from .score import CueState, Script, SequenceDef, advance_cue, script_to_json
from .seeds import derive_seed
from .troupe import (
    Agent,
    Environment,
    Troupe,
    agent_step,
    apply_stimulus,
    compensation_round,
    observer_report,
)

log = logging.getLogger(__name__)

EVENT_KINDS = ("phrase_features", "state_override", "cue_advance", "param_update", "snapshot")

SESSION_FORMAT = "affectstage-session"
SESSION_VERSION = 1
DEFAULT_RUN_TICKS = 100


class EngineError(ValueError):
    """Raised for invalid engine configuration or rejected events."""


class ReplayRefused(EngineError):
    """Raised when a session log does not match the supplied artifacts."""


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def script_hash(script: Script) -> str:
    """Hash of the canonical script JSON (formatting-insensitive)."""
    return sha256_text(canonical_json(script_to_json(script)))


def model_hash(net: EmotionNet) -> str:
    """Hash of the canonical flat-text model serialization."""
    return sha256_text(model_to_text(net))


# ---------------------------------------------------------------------------
# Events and the session log
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InputEvent:
    """One time-stamped engine input."""

    tick: int
    kind: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"tick": self.tick, "kind": self.kind, "payload": self.payload}


def event_from_json(obj, default_tick: int = 0) -> InputEvent:
    """Parse and syntactically validate one event message.

    Raises EngineError on anything malformed; semantic checks (state names,
    parameter paths) happen when the engine applies the event.
    """
    if not isinstance(obj, dict):
        raise EngineError("event must be a JSON object")
    kind = obj.get("kind")
    if kind not in EVENT_KINDS:
        raise EngineError(f"unknown event kind {kind!r}")
    payload = obj.get("payload", {})
    if not isinstance(payload, dict):
        raise EngineError("event payload must be an object")
    tick = obj.get("tick", default_tick)
    if not isinstance(tick, int) or isinstance(tick, bool) or tick < 0:
        raise EngineError("event tick must be a non-negative integer")

    expected_keys = {
        "phrase_features": {"vector"},
        "state_override": {"state"},
        "cue_advance": set(),
        "param_update": {"path", "value"},
        "snapshot": set(),
    }[kind]
    if set(payload) != expected_keys:
        raise EngineError(
            f"{kind} payload must have exactly the keys {sorted(expected_keys)}"
        )

    if kind == "phrase_features":
        vector = payload["vector"]
        if not isinstance(vector, list) or len(vector) != 12:
            raise EngineError("phrase_features payload needs a 12-component vector")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vector):
            raise EngineError("phrase_features vector components must be numbers")
        try:
            FeatureVector12.from_values(vector)
        except ValueError as exc:
            raise EngineError(f"bad feature vector: {exc}") from exc
        payload = {"vector": [float(v) for v in vector]}
    elif kind == "state_override":
        state = payload["state"]
        if not isinstance(state, str) or not state:
            raise EngineError("state_override payload needs a state name")
        payload = {"state": state}
    elif kind == "param_update":
        path = payload["path"]
        value = payload["value"]
        if not isinstance(path, str) or not path:
            raise EngineError("param_update payload needs a path")
        if isinstance(value, bool):
            pass
        elif not isinstance(value, (int, float)):
            raise EngineError("param_update value must be a number or boolean")
        payload = {"path": path, "value": value}
    return InputEvent(tick=tick, kind=kind, payload=payload)


@dataclass
class SessionLog:
    """Header plus the ordered stream of applied events and scene digests."""

    header: dict
    entries: list = field(default_factory=list)

    def append_event(self, event: InputEvent) -> None:
        self.entries.append({"type": "event", **event.to_json()})

    def append_digest(self, tick: int, digest: str, moods: dict | None = None) -> None:
        entry = {"type": "digest", "tick": tick, "scene_sha256": digest}
        if moods is not None:
            entry["moods"] = moods  # troupe state snapshot, informational
        self.entries.append(entry)

    def events(self) -> list[InputEvent]:
        return [
            InputEvent(tick=e["tick"], kind=e["kind"], payload=e["payload"])
            for e in self.entries
            if e["type"] == "event"
        ]

    def digests(self) -> list[tuple[int, str]]:
        return [(e["tick"], e["scene_sha256"]) for e in self.entries if e["type"] == "digest"]

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(canonical_json({"type": "header", **self.header}) + "\n")
            for entry in self.entries:
                fh.write(canonical_json(entry) + "\n")

    @classmethod
    def read(cls, path) -> "SessionLog":
        with open(path) as fh:
            lines = [ln for ln in (raw.strip() for raw in fh) if ln]
        if not lines:
            raise EngineError("empty session log")
        header = json.loads(lines[0])
        if header.get("type") != "header" or header.get("format") != SESSION_FORMAT:
            raise EngineError("not a session log (missing header)")
        header.pop("type")
        entries = [json.loads(ln) for ln in lines[1:]]
        last_tick = -1
        for entry in entries:
            if entry.get("type") not in ("event", "digest"):
                raise EngineError(f"unknown log entry type {entry.get('type')!r}")
            if entry["tick"] < last_tick:
                raise EngineError("log entries out of tick order")
            last_tick = entry["tick"]
        return cls(header=header, entries=entries)


# ---------------------------------------------------------------------------
# Engine configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EngineConfig:
    """Logical-clock and budget settings; paths stay outside the config hash."""

    tick_rate: float = 10.0
    base_budget: int = 8
    master_seed: int = 0
    digest_period: int = 10
    observer_period: int | None = None  # defaults to the troupe compensation period
    run_ticks: int | None = None

    def __post_init__(self):
        if not self.tick_rate > 0:
            raise EngineError("tick rate must be positive")
        if self.base_budget < 1:
            raise EngineError("base action budget must be >= 1")
        if self.digest_period < 1:
            raise EngineError("digest period must be >= 1")
        if self.observer_period is not None and self.observer_period < 1:
            raise EngineError("observer period must be >= 1")

    def to_json(self) -> dict:
        return {
            "tick_rate": self.tick_rate,
            "base_budget": self.base_budget,
            "master_seed": self.master_seed,
            "digest_period": self.digest_period,
            "observer_period": self.observer_period,
            "run_ticks": self.run_ticks,
        }

    def hash(self) -> str:
        core = self.to_json()
        core.pop("run_ticks")  # run length does not alter per-tick dynamics
        return sha256_text(canonical_json(core))


def build_troupe(script: Script) -> Troupe:
    """Instantiate agents with sensitivity tables merged across all sequences."""
    agents = []
    for agent_def in script.troupe.agents:
        sensitivity = {}
        for seq in script.sequences:
            for row in seq.sensitivity:
                if row.agent_id == agent_def.id:
                    sensitivity[(seq.id, row.state)] = row.weight
        agents.append(
            Agent(
                id=agent_def.id,
                fragment=agent_def.build_fragment(),
                placement=agent_def.start,
                sensitivity=sensitivity,
                mood=agent_def.mood,
            )
        )
    return Troupe(
        agents=tuple(agents),
        states=script.states.states,
        mood_bound=script.troupe.mood_bound,
        decay=script.troupe.decay,
        compensation=script.troupe.compensation,
    )


def build_scene(script: Script) -> cv.Scene:
    items = tuple(
        (a.id, a.build_fragment(), a.start) for a in script.troupe.agents
    )
    return cv.Scene(
        width=script.canvas.width,
        height=script.canvas.height,
        background=script.canvas.background,
        items=items,
    )


# ---------------------------------------------------------------------------
# The engine
# ---------------------------------------------------------------------------


@dataclass
class _Snapshot:
    troupe: Troupe
    scene: cv.Scene
    cue: CueState
    env: Environment
    seq_configs: dict
    base_budget: int
    rng_states: dict
    tick_count: int
    log_len: int


class Engine:
    """Single-writer engine state; all mutation happens on the tick thread."""

    def __init__(self, script: Script, net: EmotionNet, config: EngineConfig):
        if script.states != net.states:
            raise EngineError(
                "model states do not match script states: "
                f"{list(net.states.states)} vs {list(script.states.states)}"
            )
        self.script = script
        self.net = net
        self.config = config
        self.troupe = build_troupe(script)
        self.scene = build_scene(script)
        self.cue = CueState()
        first = script.sequences[0]
        self.env = Environment(
            recognized_state=None,
            cue_sequence=first.id,
            cue_position=0,
            sequence_values=first.config.values_dict(),
            observer_report=None,
        )
        self.seq_configs = {seq.id: seq.config for seq in script.sequences}
        self.base_budget = config.base_budget
        self.observer_period = config.observer_period or script.troupe.compensation.period
        self.streams = {
            a.id: random.Random(derive_seed(config.master_seed, f"agent:{a.id}"))
            for a in self.troupe.agents
        }
        self.tick_count = 0
        self.snapshots: dict[int, _Snapshot] = {}
        self._next_snapshot_id = 1
        self.session_log = SessionLog(
            header={
                "format": SESSION_FORMAT,
                "version": SESSION_VERSION,
                "config": config.to_json(),
                "config_sha256": config.hash(),
                "script_sha256": script_hash(script),
                "model_sha256": model_hash(net),
                "master_seed": config.master_seed,
            }
        )

    # -- state inspection ---------------------------------------------------

    def current_sequence(self) -> SequenceDef:
        return self.script.sequences[self.cue.sequence_index]

    def current_seq_config(self) -> cv.SequenceConfig:
        return self.seq_configs[self.current_sequence().id]

    def scene_digest(self) -> str:
        return cv.render(self.scene).digest()

    def moods_payload(self) -> dict:
        return {"moods": {str(a.id): a.mood for a in self.troupe.agents}}

    def cue_payload(self) -> dict:
        return {
            "sequence": self.current_sequence().id,
            "sequence_index": self.cue.sequence_index,
            "phrase_counter": self.cue.phrase_counter,
            "terminal": self.cue.terminal,
            "values": dict(self.env.sequence_values),
        }

    def state_payload(self) -> dict:
        return {"recognized_state": self.env.recognized_state}

    def observer_payload(self) -> dict:
        report = self.env.observer_report
        return {"report": report.as_dict() if report is not None else None}

    def hello_payload(self) -> dict:
        """Everything a console needs to render from scratch."""
        return {
            "title": self.script.title,
            "states": list(self.script.states.states),
            "sequences": self.script.sequence_ids(),
            "agents": [
                {
                    "id": a.id,
                    "fragment": a.fragment.portable_spec(),
                }
                for a in self.troupe.agents
            ],
            "canvas": {
                "width": self.scene.width,
                "height": self.scene.height,
                "background": list(self.scene.background),
            },
            "config": self.config.to_json(),
            "scene": cv.scene_graph(self.scene),
            **self.moods_payload(),
            "cue": self.cue_payload(),
            **self.state_payload(),
            "observer": self.observer_payload()["report"],
            "snapshots": sorted(self.snapshots),
        }

    # -- event application ----------------------------------------------------

    def _apply_param(self, path: str, value) -> None:
        parts = path.split(".")
        try:
            if parts[0] == "troupe" and len(parts) == 2:
                name = parts[1]
                if name == "decay":
                    self.troupe = replace(self.troupe, decay=float(value))
                elif name in ("kappa", "theta_plus", "theta_minus", "gates_enabled", "period"):
                    comp = self.troupe.compensation
                    if name == "gates_enabled":
                        comp = replace(comp, gates_enabled=bool(value))
                    elif name == "period":
                        comp = replace(comp, period=int(value))
                    else:
                        comp = replace(comp, **{name: float(value)})
                    self.troupe = replace(self.troupe, compensation=comp)
                else:
                    raise EngineError(f"unknown parameter path {path!r}")
            elif parts[0] == "engine" and len(parts) == 2 and parts[1] == "base_budget":
                budget = int(value)
                if budget < 1:
                    raise EngineError("base budget must be >= 1")
                self.base_budget = budget
            elif parts[0] == "sequence" and len(parts) == 3:
                seq_id, weight = parts[1], parts[2]
                if seq_id not in self.seq_configs:
                    raise EngineError(f"unknown sequence {seq_id!r}")
                if weight not in ("w_cov", "w_bal", "w_pal", "w_ovl"):
                    raise EngineError(f"unknown utility weight {weight!r}")
                self.seq_configs[seq_id] = replace(
                    self.seq_configs[seq_id], **{weight: float(value)}
                )
            elif parts[0] == "sensitivity" and len(parts) == 4:
                agent_id = int(parts[1])
                seq_id, state = parts[2], parts[3]
                if seq_id not in self.seq_configs:
                    raise EngineError(f"unknown sequence {seq_id!r}")
                if state not in self.script.states.states:
                    raise EngineError(f"unknown emotional state {state!r}")
                if not 0 <= agent_id < len(self.troupe.agents):
                    raise EngineError(f"unknown agent {agent_id}")
                agents = list(self.troupe.agents)
                agent = agents[agent_id]
                table = dict(agent.sensitivity)
                table[(seq_id, state)] = float(value)
                agents[agent_id] = replace(agent, sensitivity=table)
                self.troupe = replace(self.troupe, agents=tuple(agents))
            else:
                raise EngineError(f"unknown parameter path {path!r}")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, EngineError):
                raise
            raise EngineError(f"bad value for {path!r}: {exc}") from exc

    def _apply_event(self, event: InputEvent) -> bool:
        """Apply one event; returns True when it is a mood stimulus."""
        if event.kind == "phrase_features":
            vector = FeatureVector12.from_values(event.payload["vector"])
            state = classify(self.net, vector)
            self.env.recognized_state = state
            self.cue = replace(self.cue, phrase_counter=self.cue.phrase_counter + 1)
            self.env.cue_position = self.cue.phrase_counter
            return True
        if event.kind == "state_override":
            state = event.payload["state"]
            if state not in self.script.states.states:
                raise EngineError(f"unknown emotional state {state!r}")
            self.env.recognized_state = state
            return True
        if event.kind == "cue_advance":
            self.cue = advance_cue(self.cue, self.script)
            seq = self.current_sequence()
            self.env.cue_sequence = seq.id
            self.env.cue_position = self.cue.phrase_counter
            self.env.sequence_values = self.seq_configs[seq.id].values_dict()
            return False
        if event.kind == "param_update":
            self._apply_param(event.payload["path"], event.payload["value"])
            return False
        if event.kind == "snapshot":
            return False  # snapshot creation handled by process_tick for output
        raise EngineError(f"unknown event kind {event.kind!r}")

    # -- snapshots ------------------------------------------------------------

    def snapshot(self) -> int:
        sid = self._next_snapshot_id
        self._next_snapshot_id += 1
        self.snapshots[sid] = _Snapshot(
            troupe=self.troupe,
            scene=self.scene,
            cue=self.cue,
            env=copy.deepcopy(self.env),
            seq_configs=dict(self.seq_configs),
            base_budget=self.base_budget,
            rng_states={aid: rng.getstate() for aid, rng in self.streams.items()},
            tick_count=self.tick_count,
            log_len=len(self.session_log.entries),
        )
        return sid

    def restore(self, snapshot_id: int) -> None:
        """Rewind to a snapshot; the log is truncated so the session stays replayable."""
        snap = self.snapshots.get(snapshot_id)
        if snap is None:
            raise EngineError(f"unknown snapshot id {snapshot_id}")
        self.troupe = snap.troupe
        self.scene = snap.scene
        self.cue = snap.cue
        self.env = copy.deepcopy(snap.env)
        self.seq_configs = dict(snap.seq_configs)
        self.base_budget = snap.base_budget
        for aid, state in snap.rng_states.items():
            self.streams[aid].setstate(state)
        self.tick_count = snap.tick_count
        del self.session_log.entries[snap.log_len:]

    # -- the tick -------------------------------------------------------------

    def process_tick(self, events: list[InputEvent] = ()) -> list[dict]:
        """One logical tick; the in-tick order is fixed and observable.

        1. ingest events (phrase features run the classifier), 2. apply the
        stimulus if one arrived, 3. compensation round on period, 4. agent
        steps in id order, 5. observer refresh on period, 6. digest + emit.
        """
        tick = self.tick_count
        outputs: list[dict] = []
        stimulus = False
        applied_any = False
        log.debug("tick %d step=1 ingest (%d events)", tick, len(events))
        for event in events:
            try:
                is_stimulus = self._apply_event(event)
            except (ValueError, KeyError) as exc:
                log.warning("tick %d: rejected event %s: %s", tick, event.kind, exc)
                outputs.append(
                    {"tick": tick, "kind": "error", "payload": {"reason": str(exc)}}
                )
                continue
            self.session_log.append_event(replace(event, tick=tick))
            applied_any = True
            stimulus = stimulus or is_stimulus
            if event.kind == "snapshot":
                sid = self.snapshot()
                outputs.append({"tick": tick, "kind": "snapshot", "payload": {"id": sid}})

        if stimulus:
            log.debug("tick %d step=2 stimulus state=%s", tick, self.env.recognized_state)
            self.troupe = apply_stimulus(self.troupe, self.env)

        if tick % self.troupe.compensation.period == 0:
            log.debug("tick %d step=3 compensation", tick)
            self.troupe = compensation_round(self.troupe, tick, self.config.master_seed)

        log.debug("tick %d step=4 agent steps", tick)
        seq_cfg = self.current_seq_config()
        agents = list(self.troupe.agents)
        scene = self.scene
        for i, agent in enumerate(agents):
            agents[i], scene, _ = agent_step(
                agent,
                scene,
                seq_cfg,
                self.streams[agent.id],
                base_budget=self.base_budget,
                mood_bound=self.troupe.mood_bound,
            )
        self.scene = scene
        self.troupe = replace(self.troupe, agents=tuple(agents))

        if tick % self.observer_period == 0:
            log.debug("tick %d step=5 observer", tick)
            self.env.observer_report = observer_report(self.scene, seq_cfg)

        if tick % self.config.digest_period == 0:
            log.debug("tick %d step=6 digest", tick)
            digest = self.scene_digest()
            self.session_log.append_digest(tick, digest, moods=self.moods_payload()["moods"])
            outputs.append({"tick": tick, "kind": "scene", "payload": cv.scene_graph(self.scene)})
            outputs.append({"tick": tick, "kind": "moods", "payload": self.moods_payload()})
            outputs.append({"tick": tick, "kind": "cue", "payload": self.cue_payload()})
            outputs.append({"tick": tick, "kind": "state", "payload": self.state_payload()})
            outputs.append({"tick": tick, "kind": "observer", "payload": self.observer_payload()})
            outputs.append({"tick": tick, "kind": "digest", "payload": {"scene_sha256": digest}})
        elif applied_any:
            outputs.append({"tick": tick, "kind": "moods", "payload": self.moods_payload()})
            outputs.append({"tick": tick, "kind": "cue", "payload": self.cue_payload()})
            outputs.append({"tick": tick, "kind": "state", "payload": self.state_payload()})

        self.tick_count += 1
        return outputs

    def run(self, events: list[InputEvent], total_ticks: int) -> list[dict]:
        """Drive the engine from a pre-stamped event list for total_ticks ticks."""
        by_tick: dict[int, list[InputEvent]] = {}
        for event in events:
            by_tick.setdefault(event.tick, []).append(event)
        outputs = []
        for _ in range(total_ticks):
            outputs.extend(self.process_tick(by_tick.get(self.tick_count, ())))
        return outputs


# ---------------------------------------------------------------------------
# Offline runs and replay
# ---------------------------------------------------------------------------


def events_from_audio(
    clip: AudioClip,
    config: EngineConfig,
    seg_cfg: SegmentationConfig = SegmentationConfig(),
    feat_cfg: FeatureConfig = FeatureConfig(),
) -> list[InputEvent]:
    """One phrase_features event per detected phrase, stamped at phrase end time."""
    events = []
    for span in segment_phrases(clip, seg_cfg):
        vector = phrase_vector(clip, span, feat_cfg)
        tick = int(span.end / clip.sample_rate * config.tick_rate)
        events.append(
            InputEvent(tick=tick, kind="phrase_features", payload={"vector": vector.values})
        )
    return events


def default_total_ticks(events: list[InputEvent], config: EngineConfig) -> int:
    """Run past the last event and land on a digest tick."""
    if config.run_ticks is not None:
        return config.run_ticks
    last = max((e.tick for e in events), default=-1)
    base = max(last + 1, DEFAULT_RUN_TICKS)
    period = config.digest_period
    return ((base + period - 1) // period) * period + 1


@dataclass
class OfflineResult:
    session_log: SessionLog
    final_raster: cv.Raster
    frames_dir: Path | None
    frame_count: int


def run_offline(
    script: Script,
    net: EmotionNet,
    config: EngineConfig,
    events: list[InputEvent],
    out_dir: Path | None = None,
) -> OfflineResult:
    """Batch run: executes events on a fresh engine, writing frames at digest ticks."""
    engine = Engine(script, net, config)
    total = default_total_ticks(events, config)
    frames_dir = None
    frame_count = 0
    if out_dir is not None:
        out_dir = Path(out_dir)
        frames_dir = out_dir / "frames"
        frames_dir.mkdir(parents=True, exist_ok=True)
    by_tick: dict[int, list[InputEvent]] = {}
    for event in events:
        by_tick.setdefault(event.tick, []).append(event)
    final_raster = cv.render(engine.scene)
    for _ in range(total):
        tick = engine.tick_count
        outputs = engine.process_tick(by_tick.get(tick, ()))
        if any(o["kind"] == "digest" for o in outputs):
            final_raster = cv.render(engine.scene)
            if frames_dir is not None:
                cv.write_png(final_raster, frames_dir / f"frame_{tick:06d}.png")
                frame_count += 1
    if out_dir is not None:
        engine.session_log.write(out_dir / "session.log")
        cv.write_png(final_raster, out_dir / "final.png")
        cv.write_ppm(final_raster, out_dir / "final.ppm")
    return OfflineResult(
        session_log=engine.session_log,
        final_raster=final_raster,
        frames_dir=frames_dir,
        frame_count=frame_count,
    )


@dataclass(frozen=True)
class ReplayReport:
    identical: bool
    first_divergence_tick: int | None
    message: str


def replay_session(session: SessionLog, script: Script, net: EmotionNet) -> ReplayReport:
    """Re-execute a session log and compare every recorded scene digest.

    Refuses to run when the artifact hashes in the header do not match the
    supplied script/model/config.
    """
    header = session.header
    expected_script = script_hash(script)
    if header.get("script_sha256") != expected_script:
        raise ReplayRefused(
            f"script hash mismatch: log has {header.get('script_sha256')}, artifacts give {expected_script}"
        )
    expected_model = model_hash(net)
    if header.get("model_sha256") != expected_model:
        raise ReplayRefused(
            f"model hash mismatch: log has {header.get('model_sha256')}, artifacts give {expected_model}"
        )
    try:
        config = EngineConfig(**header["config"])
    except (KeyError, TypeError) as exc:
        raise ReplayRefused(f"unusable config in log header: {exc}") from exc
    if config.hash() != header.get("config_sha256"):
        raise ReplayRefused("config hash mismatch between header fields")

    recorded = session.digests()
    events = session.events()
    if recorded:
        total = recorded[-1][0] + 1
    else:
        total = max((e.tick for e in events), default=-1) + 1
    engine = Engine(script, net, config)
    engine.run(events, total)
    computed = engine.session_log.digests()

    for (rec_tick, rec_digest), (got_tick, got_digest) in zip(recorded, computed):
        if rec_tick != got_tick or rec_digest != got_digest:
            tick = min(rec_tick, got_tick)
            return ReplayReport(
                identical=False,
                first_divergence_tick=tick,
                message=f"divergence at tick {tick}: recorded {rec_digest[:12]} vs computed {got_digest[:12]}",
            )
    if len(recorded) != len(computed):
        tick = (recorded + computed)[min(len(recorded), len(computed))][0]
        return ReplayReport(
            identical=False,
            first_divergence_tick=tick,
            message=f"digest count mismatch at tick {tick}",
        )
    return ReplayReport(identical=True, first_divergence_tick=None, message="identical")
