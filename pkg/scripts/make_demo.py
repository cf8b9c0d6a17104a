#!/usr/bin/env python3
"""Build the demo assets: script JSON, 10 s WAV, labeled feature CSV, trained model.

Usage: python scripts/make_demo.py [outdir]   (default: demo/)
"""

import sys
from pathlib import Path

import numpy as np

from affectstage import corpus
from affectstage.audio import write_wav
from affectstage.emotion import TrainingSet, accuracy, init_network, save_model, train
from affectstage.features import FeatureRow, FeatureVector12, write_feature_csv
from affectstage.score import write_script


def main() -> int:
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo")
    out.mkdir(parents=True, exist_ok=True)

    script = corpus.demo_script()
    write_script(script, out / "script.json")

    clip = corpus.demo_clip()
    write_wav(out / "demo.wav", clip)

    # labeled synthetic corpus for the 6 demo states
    states = script.states.states
    data, _ = corpus.cluster_training_set(n_states=len(states), rows=240, seed=7, epochs=150)
    rows = [
        FeatureRow(f"synthetic-{i}", 0, 8000, FeatureVector12.from_values(v), label=states[l])
        for i, (v, l) in enumerate(zip(data.vectors, data.labels))
    ]
    write_feature_csv(out / "corpus.csv", rows)

    net = init_network(script.states, hidden=16, seed=42)
    trained, curve = train(net, data)
    save_model(trained, out / "model.txt")

    print(f"wrote {out}/script.json, demo.wav ({clip.duration:.1f}s), corpus.csv ({len(rows)} rows)")
    print(f"model.txt: loss {curve[0]:.4f} -> {curve[-1]:.4f}, accuracy {accuracy(trained, data):.3f}")
    print(f"next: affectstage run --script {out}/script.json --model {out}/model.txt "
          f"--audio {out}/demo.wav --out {out}/run")
    return 0


if __name__ == "__main__":
    sys.exit(main())
