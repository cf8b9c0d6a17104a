import json

import numpy as np
import pytest

from affectstage.audio import write_wav
from affectstage.cli import main
from affectstage.corpus import (
    cluster_training_set,
    demo_clip,
    demo_script,
    synth_vowel,
    VOWELS,
    clip_of,
)
from affectstage.emotion import init_network, save_model
from affectstage.features import FeatureRow, FeatureVector12, write_feature_csv
from affectstage.score import write_script


@pytest.fixture
def workdir(tmp_path):
    script_path = tmp_path / "script.json"
    write_script(demo_script(), script_path)
    model_path = tmp_path / "model.txt"
    save_model(init_network(demo_script().states, hidden=8, seed=1), model_path)
    return tmp_path, script_path, model_path


def test_validate_ok(workdir, capsys):
    _, script_path, _ = workdir
    assert main(["validate", str(script_path)]) == 0
    assert "2 sequences" in capsys.readouterr().out


def test_validate_bad_script(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1, "states": ["a", "b"], "sequences": [], "troupe": {"agents": []}}')
    assert main(["validate", str(bad)]) == 1
    assert "invalid" in capsys.readouterr().err


def test_train_run_replay_round_trip(workdir, capsys):
    tmp_path, script_path, model_path = workdir

    # build a small labeled corpus aligned with the script's 6 states
    data, _ = cluster_training_set(n_states=6, rows=90, seed=2)
    states = demo_script().states.states
    rows = [
        FeatureRow(f"clip{i}", 0, 1000, FeatureVector12.from_values(v), label=states[l])
        for i, (v, l) in enumerate(zip(data.vectors, data.labels))
    ]
    corpus_path = tmp_path / "corpus.csv"
    write_feature_csv(corpus_path, rows)

    trained_path = tmp_path / "trained.txt"
    rc = main(
        [
            "train",
            "--script",
            str(script_path),
            "--corpus",
            str(corpus_path),
            "--out",
            str(trained_path),
            "--epochs",
            "40",
            "--seed",
            "5",
        ]
    )
    assert rc == 0
    assert trained_path.exists()

    wav_path = tmp_path / "demo.wav"
    write_wav(wav_path, clip_of(synth_vowel(VOWELS["a"], duration=0.6)))
    out_dir = tmp_path / "run-out"
    rc = main(
        [
            "run",
            "--script",
            str(script_path),
            "--model",
            str(trained_path),
            "--audio",
            str(wav_path),
            "--out",
            str(out_dir),
            "--ticks",
            "21",
            "--seed",
            "9",
        ]
    )
    assert rc == 0
    assert (out_dir / "session.log").exists()
    assert (out_dir / "final.png").exists()

    rc = main(
        [
            "replay",
            "--log",
            str(out_dir / "session.log"),
            "--script",
            str(script_path),
            "--model",
            str(trained_path),
        ]
    )
    assert rc == 0
    assert "identical" in capsys.readouterr().out


def test_replay_detects_tampering(workdir, capsys):
    tmp_path, script_path, model_path = workdir
    out_dir = tmp_path / "out"
    events_path = tmp_path / "events.jsonl"
    events_path.write_text(
        "\n".join(
            json.dumps({"tick": t, "kind": "state_override", "payload": {"state": s}})
            for t, s in ((1, "fear"), (4, "anger"))
        )
    )
    rc = main(
        [
            "run",
            "--script",
            str(script_path),
            "--model",
            str(model_path),
            "--events",
            str(events_path),
            "--out",
            str(out_dir),
            "--ticks",
            "21",
        ]
    )
    assert rc == 0
    log_path = out_dir / "session.log"
    lines = log_path.read_text().splitlines()
    tampered = []
    for line in lines:
        entry = json.loads(line)
        if entry.get("type") == "event" and entry.get("tick") == 4:
            entry["payload"] = {"state": "tenderness"}
        tampered.append(json.dumps(entry))
    log_path.write_text("\n".join(tampered) + "\n")
    rc = main(
        ["replay", "--log", str(log_path), "--script", str(script_path), "--model", str(model_path)]
    )
    assert rc == 1
    assert "divergence" in capsys.readouterr().out


def test_replay_refuses_foreign_model(workdir, capsys, tmp_path):
    tmp_path_w, script_path, model_path = workdir
    out_dir = tmp_path_w / "out2"
    rc = main(
        [
            "run",
            "--script",
            str(script_path),
            "--model",
            str(model_path),
            "--out",
            str(out_dir),
            "--ticks",
            "11",
        ]
    )
    assert rc == 0
    other_model = tmp_path_w / "other.txt"
    save_model(init_network(demo_script().states, hidden=8, seed=99), other_model)
    rc = main(
        [
            "replay",
            "--log",
            str(out_dir / "session.log"),
            "--script",
            str(script_path),
            "--model",
            str(other_model),
        ]
    )
    assert rc == 2
    assert "refused" in capsys.readouterr().err


def test_run_twice_same_digests(workdir):
    tmp_path, script_path, model_path = workdir
    digests = []
    for name in ("a", "b"):
        out_dir = tmp_path / f"run-{name}"
        rc = main(
            [
                "run",
                "--script",
                str(script_path),
                "--model",
                str(model_path),
                "--out",
                str(out_dir),
                "--ticks",
                "21",
                "--seed",
                "13",
            ]
        )
        assert rc == 0
        lines = (out_dir / "session.log").read_text().splitlines()
        digests.append([json.loads(l) for l in lines if json.loads(l).get("type") == "digest"])
    assert digests[0] == digests[1]


def test_env_var_overrides(workdir, monkeypatch):
    tmp_path, script_path, model_path = workdir
    monkeypatch.setenv("AFFECTSTAGE_TICKS", "11")
    monkeypatch.setenv("AFFECTSTAGE_DIGEST_PERIOD", "5")
    out_dir = tmp_path / "env-out"
    rc = main(
        ["run", "--script", str(script_path), "--model", str(model_path), "--out", str(out_dir)]
    )
    assert rc == 0
    lines = (out_dir / "session.log").read_text().splitlines()
    digest_ticks = [json.loads(l)["tick"] for l in lines if json.loads(l).get("type") == "digest"]
    assert digest_ticks == [0, 5, 10]


def test_missing_file_is_reported(capsys):
    assert main(["validate", "/nonexistent/script.json"]) == 1
