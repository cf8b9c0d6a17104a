"""Mono audio clips and 16-bit PCM WAV ingestion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile


class AudioError(ValueError):
    """Raised for unreadable or out-of-contract audio input."""


@dataclass(frozen=True)
class AudioClip:
    """A mono signal with amplitudes in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise AudioError("clip samples must be one-dimensional (mono)")
        if samples.size and (not np.all(np.isfinite(samples)) or np.abs(samples).max() > 1.0):
            raise AudioError("clip samples must be finite and within [-1, 1]")
        if int(self.sample_rate) < 8000:
            raise AudioError(f"sample rate {self.sample_rate} below 8000 Hz minimum")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def read_wav(path) -> AudioClip:
    """Read a 16-bit PCM mono WAV file. Stereo or non-int16 input is rejected."""
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:  # scipy raises ValueError on malformed RIFF
        raise AudioError(f"unreadable WAV file {path}: {exc}") from exc
    if data.ndim != 1:
        raise AudioError(f"stereo input not supported ({data.shape[1]} channels); supply mono WAV")
    if data.dtype != np.int16:
        raise AudioError(f"expected 16-bit PCM WAV, got dtype {data.dtype}")
    return AudioClip(samples=data.astype(np.float64) / 32768.0, sample_rate=rate)


def write_wav(path, clip: AudioClip) -> None:
    """Write a clip as 16-bit PCM mono WAV."""
    pcm = np.clip(np.rint(clip.samples * 32767.0), -32768, 32767).astype(np.int16)
    wavfile.write(path, clip.sample_rate, pcm)
