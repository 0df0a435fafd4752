"""Synthetic desk-scale audio corpus: four separable clip families.

Class 0: low steady tone, class 1: high steady tone, class 2: rising
chirp, class 3: filtered noise. Frequencies, amplitudes, and phases jitter
per clip so classes form clusters rather than duplicates. Clips are long
enough for the tonnetz CQT front end after resampling to 22.05 kHz.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import ManifestEntry, write_manifest
from .errors import ConfigError
from .signal import Waveform, write_wav

CLASS_NAMES = ("low_tone", "high_tone", "chirp", "noise")


def synth_clip(label: int, rng: np.random.Generator, sample_rate: int, duration_s: float) -> Waveform:
    n = int(sample_rate * duration_s)
    t = np.arange(n) / sample_rate
    amp = rng.uniform(0.4, 0.8)
    phase = rng.uniform(0, 2 * np.pi)
    if label == 0:
        f0 = rng.uniform(250.0, 350.0)
        sig = np.sin(2 * np.pi * f0 * t + phase)
    elif label == 1:
        f0 = rng.uniform(1000.0, 1400.0)
        sig = np.sin(2 * np.pi * f0 * t + phase)
    elif label == 2:
        f_lo = rng.uniform(250.0, 400.0)
        f_hi = rng.uniform(1200.0, 1600.0)
        freq = f_lo + (f_hi - f_lo) * t / duration_s
        sig = np.sin(2 * np.pi * np.cumsum(freq) / sample_rate + phase)
    elif label == 3:
        white = rng.normal(size=n)
        kernel = np.ones(8) / 8.0  # crude low-pass so it is not full-band
        sig = np.convolve(white, kernel, mode="same")
        sig = sig / np.abs(sig).max()
    else:
        raise ConfigError(f"toy corpus has 4 classes, got label {label}")
    sig = amp * sig + rng.normal(scale=0.01, size=n)
    peak = np.abs(sig).max()
    if peak > 1.0:
        sig = sig / peak
    return Waveform(sig, sample_rate, source_id=f"toy_{CLASS_NAMES[label]}")


def make_toy_corpus(
    out_dir,
    clips_per_class: int = 12,
    seed: int = 0,
    sample_rate: int = 8000,
    duration_s: float = 1.2,
) -> Path:
    """Write WAV clips plus a manifest; returns the manifest path."""
    if clips_per_class < 1:
        raise ConfigError(f"clips_per_class must be >= 1, got {clips_per_class}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    entries = []
    for label in range(4):
        for i in range(clips_per_class):
            w = synth_clip(label, rng, sample_rate, duration_s)
            name = f"{CLASS_NAMES[label]}_{i:03d}.wav"
            write_wav(out / name, w)
            entries.append(ManifestEntry(name, label, fold=i % 5))
    manifest = out / "clips.jsonl"
    write_manifest(manifest, entries)
    return manifest
