"""Pitch-shift augmentation: resample for the shift, overlap-add to restore duration."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .wav import Waveform

DEFAULT_SCALES = (0.75, 0.9, 1.15, 1.5)

_OLA_FRAME = 1024


def time_stretch_ola(samples: np.ndarray, out_len: int, frame: int = _OLA_FRAME) -> np.ndarray:
    """Stretch/compress to out_len samples at constant pitch (Hann OLA)."""
    n = samples.size
    if out_len == n:
        return samples.copy()
    frame = min(frame, n)
    hop = max(1, frame // 2)
    win = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(frame) / frame)
    out = np.zeros(out_len)
    weight = np.zeros(out_len)
    pos = 0
    while pos < out_len:
        src = int(round(pos * n / out_len))
        src = min(max(src, 0), n - frame)
        chunk = min(frame, out_len - pos)
        out[pos : pos + chunk] += samples[src : src + chunk] * win[:chunk]
        weight[pos : pos + chunk] += win[:chunk]
        pos += hop
    return out / np.maximum(weight, 1e-8)


def pitch_shift(w: Waveform, scale: float) -> Waveform:
    """Shift all frequencies by `scale` while keeping the original length."""
    if scale <= 0:
        raise ConfigError(f"pitch-shift scale must be positive, got {scale}")
    n = w.samples.size
    if scale == 1.0:
        shifted = time_stretch_ola(w.samples, n)
    else:
        # speed change by `scale` multiplies frequencies and divides duration
        m = max(2, int(round(n / scale)))
        sped = np.interp(np.arange(m) * scale, np.arange(n), w.samples)
        shifted = time_stretch_ola(sped, n)
    shifted = np.clip(shifted, -1.0, 1.0)
    return Waveform(shifted, w.sample_rate_hz, source_id=f"{w.source_id}~ps{scale:g}")


def pitch_shift_augment(w: Waveform, scales=DEFAULT_SCALES) -> list[Waveform]:
    """One shifted copy per scale; the original is not included."""
    scales = list(scales)
    for s in scales:
        if s <= 0:
            raise ConfigError(f"pitch-shift scale must be positive, got {s}")
    return [pitch_shift(w, s) for s in scales]
