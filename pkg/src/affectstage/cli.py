"""Command line entry points: train, run, serve, replay, validate.

Every engine flag can also come from the environment with the AFFECTSTAGE_
prefix (e.g. AFFECTSTAGE_TICK_RATE=25); explicit flags win.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .audio import read_wav
from .emotion import (
    EmotionError,
    TrainingSet,
    accuracy,
    init_network,
    load_model,
    save_model,
    train,
)
from .engine import (
    EngineConfig,
    EngineError,
    SessionLog,
    events_from_audio,
    replay_session,
    run_offline,
)
from .features import read_feature_csv
from .score import ScriptError, load_script

ENV_PREFIX = "AFFECTSTAGE_"


def _env_default(name: str, fallback, cast):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return fallback
    return cast(raw)


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--tick-rate", type=float, default=_env_default("tick_rate", 10.0, float),
        help="logical ticks per second (default 10)",
    )
    parser.add_argument(
        "--base-budget", type=int, default=_env_default("base_budget", 8, int),
        help="per-agent action budget at peak mood (default 8)",
    )
    parser.add_argument(
        "--seed", type=int, default=_env_default("seed", 0, int),
        help="master seed deriving all agent streams (default 0)",
    )
    parser.add_argument(
        "--digest-period", type=int, default=_env_default("digest_period", 10, int),
        help="ticks between scene digests (default 10)",
    )
    parser.add_argument(
        "--observer-period", type=int, default=_env_default("observer_period", None, int),
        help="ticks between observer reports (default: compensation period)",
    )
    parser.add_argument(
        "--ticks", type=int, default=_env_default("ticks", None, int),
        help="total ticks to run (default: past the last event)",
    )


def _config_from_args(args) -> EngineConfig:
    return EngineConfig(
        tick_rate=args.tick_rate,
        base_budget=args.base_budget,
        master_seed=args.seed,
        digest_period=args.digest_period,
        observer_period=args.observer_period,
        run_ticks=args.ticks,
    )


def _load_events_file(path: Path, config: EngineConfig):
    """Accept either a full session log or a bare JSON-lines event file."""
    import json

    from .engine import InputEvent, event_from_json

    with open(path) as fh:
        first = fh.readline()
    try:
        head = json.loads(first) if first.strip() else {}
    except json.JSONDecodeError:
        head = {}
    if isinstance(head, dict) and head.get("type") == "header":
        return SessionLog.read(path).events()
    events = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            events.append(event_from_json(json.loads(line)))
    return events


def cmd_train(args) -> int:
    script = load_script(args.script)
    rows = read_feature_csv(args.corpus)
    labeled = [r for r in rows if r.label is not None]
    if not labeled:
        print("error: corpus has no labeled rows", file=sys.stderr)
        return 1
    try:
        labels = np.array([script.states.index(r.label) for r in labeled])
    except EmotionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    vectors = np.array([r.vector.values for r in labeled])
    net = init_network(script.states, hidden=args.hidden, seed=args.seed)
    data = TrainingSet(
        vectors=vectors,
        labels=labels,
        learning_rate=args.lr,
        momentum=args.momentum,
        epochs=args.epochs,
        batch_size=args.batch_size,
        rng_seed=args.seed,
    )
    trained, curve = train(net, data)
    save_model(trained, args.out)
    print(
        f"trained on {len(labeled)} rows: loss {curve[0]:.4f} -> {curve[-1]:.4f}, "
        f"accuracy {accuracy(trained, data):.3f}, model written to {args.out}"
    )
    return 0


def cmd_run(args) -> int:
    config = _config_from_args(args)
    script = load_script(args.script)
    net = load_model(args.model)
    if args.audio:
        clip = read_wav(args.audio)
        events = events_from_audio(clip, config)
    elif args.events:
        events = _load_events_file(Path(args.events), config)
    else:
        events = []
    out_dir = Path(args.out)
    result = run_offline(script, net, config, events, out_dir=out_dir)
    digests = result.session_log.digests()
    print(
        f"{len(events)} events, {len(digests)} digests, {result.frame_count} frames -> {out_dir}"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .engine import Engine
    from .server import create_app

    config = _config_from_args(args)
    script = load_script(args.script)
    net = load_model(args.model)
    engine = Engine(script, net, config)
    log_path = Path(args.log) if args.log else None
    static_dir = Path(args.static_dir) if args.static_dir else None
    app = create_app(engine, log_path=log_path, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_replay(args) -> int:
    script = load_script(args.script)
    net = load_model(args.model)
    session = SessionLog.read(args.log)
    try:
        report = replay_session(session, script, net)
    except EngineError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    print(report.message)
    return 0 if report.identical else 1


def cmd_validate(args) -> int:
    try:
        script = load_script(args.script)
    except (ScriptError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    print(
        f"ok: {script.title!r}, {len(script.sequences)} sequences, "
        f"{len(script.troupe.agents)} agents, {len(script.states)} states"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affectstage")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the emotion classifier on a feature CSV")
    p_train.add_argument("--script", required=True, help="script JSON (supplies the state list)")
    p_train.add_argument("--corpus", required=True, help="feature CSV with a label column")
    p_train.add_argument("--out", required=True, help="model file to write")
    p_train.add_argument("--hidden", type=int, default=16)
    p_train.add_argument("--lr", type=float, default=0.05)
    p_train.add_argument("--momentum", type=float, default=0.9)
    p_train.add_argument("--epochs", type=int, default=200)
    p_train.add_argument("--batch-size", type=int, default=16)
    p_train.add_argument("--seed", type=int, default=_env_default("seed", 0, int))
    p_train.set_defaults(func=cmd_train)

    p_run = sub.add_parser("run", help="offline batch run from audio or an event log")
    p_run.add_argument("--script", required=True)
    p_run.add_argument("--model", required=True)
    p_run.add_argument("--audio", help="mono 16-bit WAV input")
    p_run.add_argument("--events", help="session log or JSON-lines event file")
    p_run.add_argument("--out", required=True, help="output directory")
    _add_engine_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_serve = sub.add_parser("serve", help="run the live control endpoint")
    p_serve.add_argument("--script", required=True)
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--log", help="write the session log here on shutdown")
    p_serve.add_argument("--static-dir", help="serve the rehearsal console from this directory")
    _add_engine_flags(p_serve)
    p_serve.set_defaults(func=cmd_serve)

    p_replay = sub.add_parser("replay", help="verify a session log digest-by-digest")
    p_replay.add_argument("--log", required=True)
    p_replay.add_argument("--script", required=True)
    p_replay.add_argument("--model", required=True)
    p_replay.set_defaults(func=cmd_replay)

    p_validate = sub.add_parser("validate", help="check a script file")
    p_validate.add_argument("script")
    p_validate.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EngineError, ScriptError, EmotionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
