"""Deterministic synthetic fixtures: clips, vowels, scripts, training sets.

Everything here is generated from explicit seeds so tests and demos never
depend on bundled binary assets.
"""

from __future__ import annotations

import numpy as np
from scipy import signal as sp_signal

from .audio import AudioClip
from .emotion import EmotionStateList, TrainingSet
from .score import (
    AgentDef,
    CanvasDef,
    Script,
    SensitivityRow,
    SequenceDef,
    TroupeDef,
)
from .canvas import Placement, SequenceConfig
from .troupe import CompensationParams

DEFAULT_SR = 16000

DEFAULT_STATES = ("neutral", "fear", "grief", "anger", "tenderness", "exaltation")

# formant targets (Hz) for the synthetic vowel oracle
VOWELS = {
    "a": (700.0, 1220.0, 2600.0, 3300.0),
    "u": (300.0, 870.0, 2240.0, 3100.0),
    "i": (390.0, 1990.0, 2550.0, 3600.0),
    "e": (530.0, 1840.0, 2480.0, 3400.0),
    "ae": (660.0, 1720.0, 2410.0, 3300.0),
}
VOWEL_BANDWIDTHS = (80.0, 90.0, 120.0, 150.0)


# ---------------------------------------------------------------------------
# Signal builders
# ---------------------------------------------------------------------------


def tone(freq: float, duration: float, sr: int = DEFAULT_SR, amp: float = 0.3) -> np.ndarray:
    t = np.arange(int(duration * sr)) / sr
    return amp * np.sin(2.0 * np.pi * freq * t)


def silence(duration: float, sr: int = DEFAULT_SR) -> np.ndarray:
    return np.zeros(int(duration * sr))


def white_noise(duration: float, seed: int, sr: int = DEFAULT_SR, amp: float = 0.3) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return amp * rng.uniform(-1.0, 1.0, int(duration * sr))


def synth_vowel(
    formants,
    bandwidths=VOWEL_BANDWIDTHS,
    f0: float = 120.0,
    duration: float = 0.5,
    sr: int = DEFAULT_SR,
    amp: float = 0.3,
    seed: int = 0,
) -> np.ndarray:
    """Excite a cascade of two-pole resonators with an impulse train.

    This is the independent oracle for formant estimation: the resonance
    frequencies go in, the estimator must get them back out.  A trace of
    noise dithers the line spectrum so prediction stays well conditioned.
    """
    n = int(duration * sr)
    period = int(round(sr / f0))
    x = np.zeros(n)
    x[::period] = 1.0
    rng = np.random.default_rng(seed)
    x = x + rng.normal(0.0, 1e-4, n)
    for f, bw in zip(formants, bandwidths):
        r = np.exp(-np.pi * bw / sr)
        b = [1.0 - r]
        a = [1.0, -2.0 * r * np.cos(2.0 * np.pi * f / sr), r * r]
        x = sp_signal.lfilter(b, a, x)
    return amp * x / np.max(np.abs(x))


def apply_envelope(x: np.ndarray, shape: str) -> np.ndarray:
    """Impose an amplitude curve: 'flat', 'rise', 'fall', or 'triangle'."""
    n = x.size
    t = np.linspace(0.0, 1.0, n)
    if shape == "flat":
        env = np.ones(n)
    elif shape == "rise":
        env = t
    elif shape == "fall":
        env = 1.0 - t
    elif shape == "triangle":
        env = 1.0 - np.abs(2.0 * t - 1.0)
    else:
        raise ValueError(f"unknown envelope shape {shape!r}")
    return x * env


def clip_of(*parts: np.ndarray, sr: int = DEFAULT_SR) -> AudioClip:
    samples = np.concatenate(parts) if parts else np.zeros(0)
    return AudioClip(samples=np.clip(samples, -1.0, 1.0), sample_rate=sr)


# ---------------------------------------------------------------------------
# Corpora
# ---------------------------------------------------------------------------


def feature_corpus(sr: int = DEFAULT_SR) -> list[tuple[str, AudioClip]]:
    """At least 20 deterministic clips spanning vowels, tones, noise, mixtures."""
    clips: list[tuple[str, AudioClip]] = []
    for name, formants in VOWELS.items():
        clips.append((f"vowel-{name}", clip_of(synth_vowel(formants, sr=sr), sr=sr)))
    for i, freq in enumerate((220.0, 440.0, 880.0, 1760.0)):
        clips.append((f"tone-{int(freq)}", clip_of(tone(freq, 0.6, sr), sr=sr)))
    for i in range(4):
        clips.append((f"noise-{i}", clip_of(white_noise(0.6, seed=100 + i, sr=sr), sr=sr)))
    base = tone(330.0, 0.6, sr)
    for i, alpha in enumerate((0.0, 0.25, 0.5, 1.0)):
        mix = base + alpha * white_noise(0.6, seed=200 + i, sr=sr)
        peak = np.max(np.abs(mix))
        clips.append((f"mix-{i}", clip_of(mix / peak * 0.4, sr=sr)))
    for shape in ("rise", "fall", "triangle"):
        clips.append(
            (f"env-{shape}", clip_of(apply_envelope(tone(275.0, 0.7, sr), shape), sr=sr))
        )
    clips.append(
        (
            "two-phrases",
            clip_of(
                tone(260.0, 0.5, sr), silence(0.5, sr), synth_vowel(VOWELS["a"], sr=sr), sr=sr
            ),
        )
    )
    return clips


def demo_clip(sr: int = DEFAULT_SR, seed: int = 7) -> AudioClip:
    """A ten-second mock performance: vowel phrases with varied envelopes."""
    rng = np.random.default_rng(seed)
    names = list(VOWELS)
    parts = [silence(0.4, sr)]
    shapes = ("flat", "rise", "fall", "triangle")
    for i in range(6):
        vowel = synth_vowel(
            VOWELS[names[int(rng.integers(len(names)))]],
            f0=float(rng.uniform(100.0, 180.0)),
            duration=float(rng.uniform(0.5, 0.9)),
            sr=sr,
            seed=int(rng.integers(1 << 30)),
        )
        parts.append(apply_envelope(vowel, shapes[int(rng.integers(len(shapes)))]))
        parts.append(silence(float(rng.uniform(0.6, 0.9)), sr))
    total = sum(p.size for p in parts)
    want = int(10.0 * sr)
    parts.append(silence(max(0, want - total) / sr, sr))
    return clip_of(*parts, sr=sr)


def cluster_training_set(
    n_states: int = 4,
    rows: int = 200,
    seed: int = 7,
    spread: float = 0.05,
    **hyper,
) -> tuple[TrainingSet, np.ndarray]:
    """Well-separated Gaussian clusters in the 12-D feature cube.

    Returns the training set and the class centers (for nearest-centroid
    separability checks).
    """
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.2, 0.8, size=(n_states, 12))
    # push centers apart pairwise to guarantee separation
    for _ in range(50):
        moved = False
        for i in range(n_states):
            for j in range(i + 1, n_states):
                gap = centers[i] - centers[j]
                dist = np.linalg.norm(gap)
                if dist < 1.0:
                    shift = gap / max(dist, 1e-9) * (1.0 - dist) / 2.0
                    centers[i] = np.clip(centers[i] + shift, 0.05, 0.95)
                    centers[j] = np.clip(centers[j] - shift, 0.05, 0.95)
                    moved = True
        if not moved:
            break
    labels = rng.integers(0, n_states, size=rows)
    vectors = np.clip(centers[labels] + rng.normal(0.0, spread, size=(rows, 12)), 0.0, 1.0)
    return TrainingSet(vectors=vectors, labels=labels, rng_seed=seed, **hyper), centers


def demo_states() -> EmotionStateList:
    return EmotionStateList(DEFAULT_STATES)


def demo_script() -> Script:
    """Two sequences, four agents; the bundled rehearsal fixture."""
    states = demo_states()
    palette_warm = [0.0] * 24
    # mass in the upper red bins, mid green, low blue
    palette_warm[6] = palette_warm[7] = 3.0
    palette_warm[11] = 2.0
    palette_warm[16] = 2.0
    sequences = (
        SequenceDef(
            id="seq-dark",
            config=SequenceConfig(
                w_cov=1.0,
                w_bal=0.5,
                w_pal=0.0,
                w_ovl=0.5,
                target_centroid=(0.3, 0.5),
                values=(("tension", 0.8),),
            ),
            sensitivity=(
                SensitivityRow(0, "fear", 2.5),
                SensitivityRow(0, "tenderness", -1.5),
                SensitivityRow(1, "fear", -2.0),
                SensitivityRow(1, "grief", 1.5),
                SensitivityRow(2, "anger", 3.0),
                SensitivityRow(3, "neutral", 0.5),
                SensitivityRow(3, "exaltation", 2.0),
            ),
            phrase_hint=4,
        ),
        SequenceDef(
            id="seq-light",
            config=SequenceConfig(
                w_cov=0.6,
                w_bal=1.0,
                w_pal=0.8,
                w_ovl=0.2,
                target_centroid=(0.6, 0.4),
                target_palette=tuple(palette_warm),
                values=(("tension", 0.2),),
            ),
            sensitivity=(
                SensitivityRow(0, "tenderness", 2.0),
                SensitivityRow(1, "exaltation", 2.5),
                SensitivityRow(2, "grief", -2.5),
                SensitivityRow(3, "fear", -1.0),
            ),
            phrase_hint=3,
        ),
    )
    agents = (
        AgentDef(
            id=0,
            fragment_spec={"kind": "solid", "color": [0.9, 0.2, 0.15, 0.9], "size": [28, 20]},
            start=Placement(x=20.0, y=18.0),
        ),
        AgentDef(
            id=1,
            fragment_spec={
                "kind": "gradient",
                "start": [0.1, 0.3, 0.8, 1.0],
                "stop": [0.0, 0.7, 0.7, 0.4],
                "size": [32, 24],
                "axis": "x",
            },
            start=Placement(x=90.0, y=40.0),
        ),
        AgentDef(
            id=2,
            fragment_spec={"kind": "solid", "color": [0.95, 0.8, 0.2, 0.7], "size": [22, 22]},
            start=Placement(x=60.0, y=10.0),
        ),
        AgentDef(
            id=3,
            fragment_spec={
                "kind": "gradient",
                "start": [0.8, 0.8, 0.85, 1.0],
                "stop": [0.3, 0.1, 0.4, 0.8],
                "size": [26, 18],
                "axis": "y",
            },
            start=Placement(x=118.0, y=60.0),
        ),
    )
    return Script(
        title="rehearsal demo",
        states=states,
        sequences=sequences,
        troupe=TroupeDef(
            agents=agents,
            mood_bound=10.0,
            decay=0.9,
            compensation=CompensationParams(
                period=8, kappa=0.5, theta_plus=5.0, theta_minus=-5.0, gates_enabled=True
            ),
        ),
        canvas=CanvasDef(width=160, height=90, background=(0.02, 0.02, 0.05)),
    )

