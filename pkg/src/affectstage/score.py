"""The play's structure: ordered sequences, sensitivity tables, troupe declaration.

A script is a single versioned JSON document, the rehearsal artifact that
everything else cross-references.  All validation happens at load time; the
engine never re-checks references during a tick.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .canvas import (
    DEFAULT_CANVAS_HEIGHT,
    DEFAULT_CANVAS_WIDTH,
    Fragment,
    Placement,
    SequenceConfig,
)
from .emotion import EmotionStateList
from .troupe import CompensationParams, DEFAULT_DECAY, DEFAULT_MOOD_BOUND

SCRIPT_VERSION = 1


class ScriptError(ValueError):
    """Raised for unparseable or inconsistent script files."""


@dataclass(frozen=True)
class SensitivityRow:
    agent_id: int
    state: str
    weight: float


@dataclass(frozen=True)
class SequenceDef:
    """One sequence of the text: its utility, scalar values, sensitivity rows."""

    id: str
    config: SequenceConfig
    sensitivity: tuple[SensitivityRow, ...] = ()
    phrase_hint: int | None = None


@dataclass(frozen=True)
class AgentDef:
    id: int
    fragment_spec: dict
    start: Placement
    mood: float = 0.0

    def build_fragment(self) -> Fragment:
        return Fragment(id=f"agent-{self.id}", spec=self.fragment_spec)


@dataclass(frozen=True)
class TroupeDef:
    agents: tuple[AgentDef, ...]
    mood_bound: float = DEFAULT_MOOD_BOUND
    decay: float = DEFAULT_DECAY
    compensation: CompensationParams = CompensationParams()


@dataclass(frozen=True)
class CanvasDef:
    width: int = DEFAULT_CANVAS_WIDTH
    height: int = DEFAULT_CANVAS_HEIGHT
    background: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Script:
    title: str
    states: EmotionStateList
    sequences: tuple[SequenceDef, ...]
    troupe: TroupeDef
    canvas: CanvasDef = CanvasDef()

    def sequence_ids(self) -> list[str]:
        return [s.id for s in self.sequences]

    def sequence(self, index: int) -> SequenceDef:
        return self.sequences[index]


@dataclass(frozen=True)
class CueState:
    """Where we are in the play: sequence index plus a phrase counter."""

    sequence_index: int = 0
    phrase_counter: int = 0
    terminal: bool = False


def advance_cue(cue: CueState, script: Script) -> CueState:
    """Move to the next sequence; at the last one, raise the terminal flag."""
    if cue.sequence_index + 1 >= len(script.sequences):
        return replace(cue, terminal=True)
    return CueState(sequence_index=cue.sequence_index + 1, phrase_counter=0, terminal=False)


# ---------------------------------------------------------------------------
# Validation + (de)serialization
# ---------------------------------------------------------------------------


def _validate(script: Script) -> Script:
    if not script.sequences:
        raise ScriptError("script has no sequences")
    seen = set()
    for seq in script.sequences:
        if seq.id in seen:
            raise ScriptError(f"duplicate sequence id {seq.id!r}")
        seen.add(seq.id)
    if not script.troupe.agents:
        raise ScriptError("script declares no agents")
    ids = [a.id for a in script.troupe.agents]
    if ids != list(range(len(ids))):
        raise ScriptError("agent ids must be contiguous from 0")
    states = set(script.states.states)
    for seq in script.sequences:
        for row in seq.sensitivity:
            if row.state not in states:
                raise ScriptError(
                    f"sequence {seq.id!r} sensitivity row references undeclared state {row.state!r}"
                )
            if not 0 <= row.agent_id < len(ids):
                raise ScriptError(
                    f"sequence {seq.id!r} sensitivity row references undeclared agent {row.agent_id}"
                )
    return script


def script_from_json(doc: dict) -> Script:
    if doc.get("version") != SCRIPT_VERSION:
        raise ScriptError(f"unsupported script version {doc.get('version')!r}")
    try:
        states = EmotionStateList(tuple(doc["states"]))
        sequences = []
        for s in doc["sequences"]:
            util = s.get("utility", {})
            cfg = SequenceConfig(
                w_cov=util.get("w_cov", 1.0),
                w_bal=util.get("w_bal", 0.0),
                w_pal=util.get("w_pal", 0.0),
                w_ovl=util.get("w_ovl", 0.0),
                target_centroid=tuple(s.get("target_centroid", (0.5, 0.5))),
                target_palette=tuple(s["target_palette"])
                if "target_palette" in s
                else SequenceConfig().target_palette,
                values=tuple(sorted(s.get("values", {}).items())),
            )
            rows = tuple(
                SensitivityRow(agent_id=int(r["agent"]), state=str(r["state"]), weight=float(r["weight"]))
                for r in s.get("sensitivity", [])
            )
            sequences.append(
                SequenceDef(
                    id=str(s["id"]),
                    config=cfg,
                    sensitivity=rows,
                    phrase_hint=int(s["phrase_hint"]) if "phrase_hint" in s else None,
                )
            )
        tr = doc["troupe"]
        comp = tr.get("compensation", {})
        agents = tuple(
            AgentDef(
                id=int(a["id"]),
                fragment_spec=dict(a["fragment"]),
                start=Placement(
                    x=float(a["start"]["x"]),
                    y=float(a["start"]["y"]),
                    scale=float(a["start"].get("scale", 1.0)),
                    opacity=float(a["start"].get("opacity", 1.0)),
                ),
                mood=float(a.get("mood", 0.0)),
            )
            for a in tr["agents"]
        )
        troupe = TroupeDef(
            agents=agents,
            mood_bound=float(tr.get("mood_bound", DEFAULT_MOOD_BOUND)),
            decay=float(tr.get("decay", DEFAULT_DECAY)),
            compensation=CompensationParams(
                period=int(comp.get("period", 8)),
                kappa=float(comp.get("kappa", 0.5)),
                theta_plus=float(comp.get("theta_plus", 5.0)),
                theta_minus=float(comp.get("theta_minus", -5.0)),
                gates_enabled=bool(comp.get("gates_enabled", True)),
            ),
        )
        cv = doc.get("canvas", {})
        canvas = CanvasDef(
            width=int(cv.get("width", DEFAULT_CANVAS_WIDTH)),
            height=int(cv.get("height", DEFAULT_CANVAS_HEIGHT)),
            background=tuple(cv.get("background", (0.0, 0.0, 0.0))),
        )
        script = Script(
            title=str(doc.get("title", "")),
            states=states,
            sequences=tuple(sequences),
            troupe=troupe,
            canvas=canvas,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScriptError):
            raise
        raise ScriptError(f"malformed script: {exc}") from exc
    return _validate(script)


def script_to_json(script: Script) -> dict:
    return {
        "version": SCRIPT_VERSION,
        "title": script.title,
        "states": list(script.states.states),
        "sequences": [
            {
                "id": seq.id,
                "utility": {
                    "w_cov": seq.config.w_cov,
                    "w_bal": seq.config.w_bal,
                    "w_pal": seq.config.w_pal,
                    "w_ovl": seq.config.w_ovl,
                },
                "target_centroid": list(seq.config.target_centroid),
                "target_palette": list(seq.config.target_palette),
                "values": seq.config.values_dict(),
                **({"phrase_hint": seq.phrase_hint} if seq.phrase_hint is not None else {}),
                "sensitivity": [
                    {"agent": r.agent_id, "state": r.state, "weight": r.weight}
                    for r in seq.sensitivity
                ],
            }
            for seq in script.sequences
        ],
        "troupe": {
            "mood_bound": script.troupe.mood_bound,
            "decay": script.troupe.decay,
            "compensation": {
                "period": script.troupe.compensation.period,
                "kappa": script.troupe.compensation.kappa,
                "theta_plus": script.troupe.compensation.theta_plus,
                "theta_minus": script.troupe.compensation.theta_minus,
                "gates_enabled": script.troupe.compensation.gates_enabled,
            },
            "agents": [
                {
                    "id": a.id,
                    "fragment": a.fragment_spec,
                    "start": {
                        "x": a.start.x,
                        "y": a.start.y,
                        "scale": a.start.scale,
                        "opacity": a.start.opacity,
                    },
                    "mood": a.mood,
                }
                for a in script.troupe.agents
            ],
        },
        "canvas": {
            "width": script.canvas.width,
            "height": script.canvas.height,
            "background": list(script.canvas.background),
        },
    }


def load_script(path) -> Script:
    """Load and fully validate a script file; errors carry line info when parsing fails."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return script_from_json(doc)


def write_script(script: Script, path) -> None:
    with open(path, "w") as fh:
        json.dump(script_to_json(script), fh, indent=2, sort_keys=True)
        fh.write("\n")
