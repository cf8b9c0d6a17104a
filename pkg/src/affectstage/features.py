"""Phrase segmentation and the 12-component voice feature vector.

The input voice is handled phrase by phrase.  Each phrase yields four formant
components (vowel quality), four noisiness components (consonant character),
and four prosody components (the amplitude curve of the phrase), every one
normalized into [0, 1].
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .audio import AudioClip

# Spectral flatness is mapped from log domain onto [0, 1]: raw flatness 1.0
# maps to 1.0 and anything below 10^-FLATNESS_DECADES maps to 0.  Calibrated
# so a pure tone sits near 0, dense noise above 0.8, and harmonic (voiced)
# frames below the 0.3 voicing gate.
FLATNESS_DECADES = 4.0


class FeatureError(ValueError):
    """Raised for invalid audio spans or feature configuration."""


# ---------------------------------------------------------------------------
# Configuration and value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SegmentationConfig:
    """Energy-gate segmentation parameters (all durations in milliseconds)."""

    silence_threshold: float = 0.01  # frame RMS gate
    min_phrase_ms: float = 150.0
    min_gap_ms: float = 100.0
    frame_ms: float = 25.0
    hop_ms: float = 10.0

    def __post_init__(self):
        values = (
            self.silence_threshold,
            self.min_phrase_ms,
            self.min_gap_ms,
            self.frame_ms,
            self.hop_ms,
        )
        if any(not (v > 0 and math.isfinite(v)) for v in values) or self.hop_ms > self.frame_ms:
            raise FeatureError("bad segmentation config")


@dataclass(frozen=True)
class PhraseSpan:
    """Half-open sample range of one phrase plus its mean energy."""

    start: int
    end: int
    rms: float

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise FeatureError(f"invalid span [{self.start}, {self.end})")


@dataclass(frozen=True)
class FeatureConfig:
    """Analysis parameters for the three feature blocks."""

    frame_ms: float = 25.0
    hop_ms: float = 10.0
    # Hz ranges mapped onto [0, 1] for F1..F4
    formant_ranges: tuple[tuple[float, float], ...] = (
        (200.0, 1000.0),
        (500.0, 2500.0),
        (1500.0, 3500.0),
        (2500.0, 4500.0),
    )
    formant_bw_max: float = 400.0
    formant_fmin: float = 150.0
    voiced_rms: float = 0.01
    voiced_flatness_max: float = 0.3
    neutral: float = 0.5
    high_band_hz: float = 4000.0
    slope_ref: float = 2.0  # rms units per second; signed slopes squash through tanh


@dataclass(frozen=True)
class FeatureVector12:
    """The per-phrase voice descriptor: formants(4) | noisiness(4) | prosody(4)."""

    formants: tuple[float, float, float, float]
    noisiness: tuple[float, float, float, float]
    prosody: tuple[float, float, float, float]

    def __post_init__(self):
        for name in ("formants", "noisiness", "prosody"):
            block = tuple(float(v) for v in getattr(self, name))
            if len(block) != 4:
                raise FeatureError(f"{name} block must have 4 components")
            if any(not (0.0 <= v <= 1.0) or not math.isfinite(v) for v in block):
                raise FeatureError(f"{name} components must be finite and within [0, 1]")
            object.__setattr__(self, name, block)

    @property
    def values(self) -> list[float]:
        return list(self.formants) + list(self.noisiness) + list(self.prosody)

    @classmethod
    def from_values(cls, values) -> "FeatureVector12":
        vals = [float(v) for v in values]
        if len(vals) != 12:
            raise FeatureError(f"expected 12 components, got {len(vals)}")
        return cls(tuple(vals[0:4]), tuple(vals[4:8]), tuple(vals[8:12]))


# ---------------------------------------------------------------------------
# Framing helpers
# ---------------------------------------------------------------------------


def _frame_params(sample_rate: int, frame_ms: float, hop_ms: float) -> tuple[int, int]:
    frame = max(2, int(round(sample_rate * frame_ms / 1000.0)))
    hop = max(1, int(round(sample_rate * hop_ms / 1000.0)))
    return frame, hop


def _frames(x: np.ndarray, frame: int, hop: int) -> np.ndarray:
    """(n, frame) view of x; a short input becomes a single whole frame."""
    if x.size < frame:
        return x[None, :] if x.size >= 2 else np.empty((0, 0))
    view = np.lib.stride_tricks.sliding_window_view(x, frame)
    return view[::hop]


def _frame_rms(frames: np.ndarray) -> np.ndarray:
    if frames.size == 0:
        return np.empty(0)
    return np.sqrt(np.mean(frames**2, axis=1))


def _span_samples(clip: AudioClip, span: PhraseSpan) -> np.ndarray:
    if span.end > len(clip):
        raise FeatureError(f"span [{span.start}, {span.end}) exceeds clip length {len(clip)}")
    return clip.samples[span.start:span.end]


def spectral_flatness(frame: np.ndarray) -> float:
    """Normalized flatness of one frame: 0 for a pure line, near 1 for noise."""
    w = np.hanning(frame.size)
    power = np.abs(np.fft.rfft(frame * w)) ** 2
    power = power[1:]  # exclude DC
    total = power.sum()
    if total <= 0.0:
        return 0.0
    power = np.maximum(power / total, 1e-12)
    raw = float(np.exp(np.mean(np.log(power))) / np.mean(power))
    return min(1.0, max(0.0, 1.0 + math.log10(max(raw, 1e-300)) / FLATNESS_DECADES))


# ---------------------------------------------------------------------------
# Segmentation
# ---------------------------------------------------------------------------


def segment_phrases(clip: AudioClip, cfg: SegmentationConfig = SegmentationConfig()) -> list[PhraseSpan]:
    """Split a clip into phrases by frame-RMS energy gating.

    Active regions separated by less than ``min_gap_ms`` merge; anything
    shorter than ``min_phrase_ms`` is dropped.  Pure function of its inputs.
    """
    if len(clip) == 0:
        raise FeatureError("empty audio")
    sr = clip.sample_rate
    frame, hop = _frame_params(sr, cfg.frame_ms, cfg.hop_ms)
    frames = _frames(clip.samples, frame, hop)
    energies = _frame_rms(frames)
    active = energies > cfg.silence_threshold
    if not active.any():
        return []

    frame_len = frames.shape[1]
    regions: list[list[int]] = []  # [start_sample, end_sample)
    for k in np.flatnonzero(active):
        start = int(k) * hop
        end = start + frame_len
        if regions and start <= regions[-1][1]:
            regions[-1][1] = max(regions[-1][1], end)
        else:
            regions.append([start, end])

    min_gap = sr * cfg.min_gap_ms / 1000.0
    merged: list[list[int]] = []
    for region in regions:
        if merged and region[0] - merged[-1][1] < min_gap:
            merged[-1][1] = region[1]
        else:
            merged.append(region)

    min_len = sr * cfg.min_phrase_ms / 1000.0
    spans = []
    for start, end in merged:
        end = min(end, len(clip))
        if end - start < min_len:
            continue
        seg = clip.samples[start:end]
        spans.append(PhraseSpan(start=start, end=end, rms=float(np.sqrt(np.mean(seg**2)))))
    return spans


# ---------------------------------------------------------------------------
# Formant block
# ---------------------------------------------------------------------------


def lpc_coefficients(frame: np.ndarray, order: int) -> np.ndarray | None:
    """Autocorrelation-method linear prediction via Levinson-Durbin.

    Returns the prediction polynomial [1, a1, ..., a_order], or None when the
    recursion is numerically unusable (silent or degenerate frame).
    """
    n = frame.size
    if n <= order:
        return None
    r = np.correlate(frame, frame, "full")[n - 1 : n + order]
    if r[0] <= 0.0:
        return None
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1 : 0 : -1])
        k = -acc / err
        new = a.copy()
        new[1:i] = a[1:i] + k * a[i - 1 : 0 : -1]
        new[i] = k
        a = new
        err *= 1.0 - k * k
        if err <= 0.0:
            return None
    return a


def _formants_from_lpc(a: np.ndarray, sample_rate: int, cfg: FeatureConfig) -> np.ndarray:
    """Resonance frequencies from prediction-polynomial roots, low to high.

    Only roots with bandwidth under ``formant_bw_max`` and frequency inside
    (formant_fmin, nyquist - 100) count as formants.
    """
    roots = np.roots(a)
    roots = roots[np.imag(roots) > 1e-9]
    freqs = np.angle(roots) * sample_rate / (2.0 * np.pi)
    bws = -np.log(np.maximum(np.abs(roots), 1e-12)) * sample_rate / np.pi
    keep = (bws < cfg.formant_bw_max) & (freqs > cfg.formant_fmin) & (freqs < sample_rate / 2 - 100.0)
    return np.sort(freqs[keep])


def estimate_formants_hz(
    clip: AudioClip, span: PhraseSpan, cfg: FeatureConfig = FeatureConfig()
) -> tuple[np.ndarray | None, int]:
    """Median F1..F4 in Hz over voiced frames of the span.

    A frame is voiced when its RMS clears ``voiced_rms`` and its normalized
    flatness stays below ``voiced_flatness_max``.  Returns (None, 0) when no
    frame is voiced.
    """
    x = _span_samples(clip, span)
    sr = clip.sample_rate
    frame, hop = _frame_params(sr, cfg.frame_ms, cfg.hop_ms)
    frames = _frames(x, frame, hop)
    if frames.size == 0:
        return None, 0
    order = int(round(2 + sr / 1000.0))
    window = np.hamming(frames.shape[1])
    per_formant: list[list[float]] = [[], [], [], []]
    voiced = 0
    for fr in frames:
        if np.sqrt(np.mean(fr**2)) <= cfg.voiced_rms:
            continue
        if spectral_flatness(fr) >= cfg.voiced_flatness_max:
            continue
        a = lpc_coefficients(fr * window, order)
        if a is None:
            continue
        voiced += 1
        found = _formants_from_lpc(a, sr, cfg)
        for i in range(min(4, found.size)):
            per_formant[i].append(float(found[i]))
    if voiced == 0:
        return None, 0
    medians = np.array(
        [np.median(vals) if vals else np.nan for vals in per_formant], dtype=np.float64
    )
    return medians, voiced


def formant_block(
    clip: AudioClip, span: PhraseSpan, cfg: FeatureConfig = FeatureConfig()
) -> tuple[np.ndarray, bool]:
    """Normalized F1..F4 plus a low-confidence flag.

    Each formant maps linearly from its configured Hz range onto [0, 1] and is
    clamped.  A fully unvoiced span (or a missing formant slot) yields the
    neutral value and sets the flag.
    """
    medians, voiced = estimate_formants_hz(clip, span, cfg)
    out = np.full(4, cfg.neutral, dtype=np.float64)
    if voiced == 0:
        return out, True
    low_confidence = False
    for i, (lo, hi) in enumerate(cfg.formant_ranges):
        if medians is None or math.isnan(medians[i]):
            low_confidence = True
            continue
        out[i] = min(1.0, max(0.0, (medians[i] - lo) / (hi - lo)))
    return out, low_confidence


# ---------------------------------------------------------------------------
# Noisiness block
# ---------------------------------------------------------------------------


def noisiness_block(
    clip: AudioClip, span: PhraseSpan, cfg: FeatureConfig = FeatureConfig()
) -> np.ndarray:
    """[mean flatness, flatness variance, mean zero-crossing rate, high-band ratio].

    Flatness statistics come from the normalized per-frame measure; the
    variance is scaled by 4 (its maximum for values in [0, 1]).  The
    zero-crossing rate is crossings per sample.  The high band starts at
    ``high_band_hz`` capped below Nyquist.
    """
    x = _span_samples(clip, span)
    sr = clip.sample_rate
    frame, hop = _frame_params(sr, cfg.frame_ms, cfg.hop_ms)
    frames = _frames(x, frame, hop)
    if frames.size == 0:
        frames = x[None, :]

    flats = np.array([spectral_flatness(fr) for fr in frames])
    mean_flat = float(np.mean(flats))
    var_flat = min(1.0, 4.0 * float(np.var(flats)))

    signs = np.signbit(frames)
    zcr = float(np.mean(np.mean(signs[:, 1:] != signs[:, :-1], axis=1)))

    power = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(x.size, d=1.0 / sr)
    cutoff = min(cfg.high_band_hz, 0.9 * sr / 2.0)
    total = power.sum()
    high = float(power[freqs > cutoff].sum() / total) if total > 0 else 0.0

    out = np.array([mean_flat, var_flat, zcr, high], dtype=np.float64)
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Prosody block
# ---------------------------------------------------------------------------


def _squash_slope(slope: float, slope_ref: float) -> float:
    # signed rms/second slope -> [0, 1] with 0 mapping to 0.5
    return 0.5 * (1.0 + math.tanh(slope / slope_ref))


def prosody_block(
    clip: AudioClip, span: PhraseSpan, cfg: FeatureConfig = FeatureConfig()
) -> np.ndarray:
    """Amplitude-curve summary: [peak position, mean level, attack, decay].

    The envelope is the per-frame RMS.  Peak position is the relative index of
    the loudest frame; attack and decay are the signed slopes from span start
    to the peak and from the peak to span end, squashed so flat is 0.5.
    """
    x = _span_samples(clip, span)
    sr = clip.sample_rate
    frame, hop = _frame_params(sr, cfg.frame_ms, cfg.hop_ms)
    frames = _frames(x, frame, hop)
    if frames.size == 0:
        frames = x[None, :]
    env = _frame_rms(frames)
    n = env.size
    peak = int(np.argmax(env))
    peak_pos = (peak + 0.5) / n
    mean_level = float(np.mean(env))
    hop_s = hop / sr
    attack = (env[peak] - env[0]) / max(peak * hop_s, hop_s)
    decay = (env[-1] - env[peak]) / max((n - 1 - peak) * hop_s, hop_s)
    out = np.array(
        [
            peak_pos,
            mean_level,
            _squash_slope(float(attack), cfg.slope_ref),
            _squash_slope(float(decay), cfg.slope_ref),
        ],
        dtype=np.float64,
    )
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# The 12-component vector and CSV interchange
# ---------------------------------------------------------------------------


def phrase_vector(
    clip: AudioClip, span: PhraseSpan, cfg: FeatureConfig = FeatureConfig()
) -> FeatureVector12:
    """Concatenate [formants | noisiness | prosody] for one phrase."""
    formants, _ = formant_block(clip, span, cfg)
    noisiness = noisiness_block(clip, span, cfg)
    prosody = prosody_block(clip, span, cfg)
    return FeatureVector12(tuple(formants), tuple(noisiness), tuple(prosody))


@dataclass(frozen=True)
class FeatureRow:
    """One CSV row: provenance, span, vector, optional training label."""

    clip_id: str
    span_start: int
    span_end: int
    vector: FeatureVector12
    label: str | None = None


CSV_COLUMNS = (
    ["clip_id", "span_start", "span_end"]
    + [f"f{i}" for i in range(1, 5)]
    + [f"n{i}" for i in range(1, 5)]
    + [f"p{i}" for i in range(1, 5)]
    + ["label"]
)


def write_feature_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [row.clip_id, row.span_start, row.span_end]
                + [repr(v) for v in row.vector.values]
                + [row.label if row.label is not None else ""]
            )


def read_feature_csv(path) -> list[FeatureRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS[:-1]) - set(reader.fieldnames or [])
        if missing:
            raise FeatureError(f"feature CSV missing columns: {sorted(missing)}")
        for record in reader:
            vector = FeatureVector12.from_values(
                [record[c] for c in CSV_COLUMNS[3:-1]]
            )
            label = record.get("label") or None
            rows.append(
                FeatureRow(
                    clip_id=record["clip_id"],
                    span_start=int(record["span_start"]),
                    span_end=int(record["span_end"]),
                    vector=vector,
                    label=label,
                )
            )
    return rows
