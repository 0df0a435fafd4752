"""Short-time Fourier transform and its power spectrogram."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, InputError
from .spectrogram import Kind, Spectrogram
from .wav import Waveform

LOG_FLOOR = 1e-10


@dataclass
class StftConfig:
    """Frame layout and DFT size.

    ``hop_length`` is the authoritative frame step; ``overlap_ratio`` is a
    derivation aid used only when ``hop_length`` is None. ``window_fn`` is
    "hann" in production; "rect" exists for debugging frame plumbing.
    """

    window_size: int = 2048
    hop_length: int | None = 512
    num_filters: int = 2048
    overlap_ratio: float = 0.5
    pad_mode: str = "zero"
    window_fn: str = "hann"

    def __post_init__(self):
        if self.window_size < 2:
            raise ConfigError(f"window_size must be >= 2, got {self.window_size}")
        if not 0.0 <= self.overlap_ratio < 1.0:
            raise ConfigError(f"overlap_ratio must be in [0, 1), got {self.overlap_ratio}")
        if self.hop_length is None:
            self.hop_length = max(1, round(self.window_size * (1.0 - self.overlap_ratio)))
        if not 1 <= self.hop_length <= self.window_size:
            raise ConfigError(f"hop_length must be in [1, window_size], got {self.hop_length}")
        if self.num_filters < self.window_size / 2:
            raise ConfigError(f"num_filters must be >= window_size/2, got {self.num_filters}")
        if self.pad_mode not in ("zero", "reflect"):
            raise ConfigError(f"pad_mode must be zero or reflect, got {self.pad_mode}")
        if self.window_fn not in ("hann", "rect"):
            raise ConfigError(f"window_fn must be hann or rect, got {self.window_fn}")

    def window(self) -> np.ndarray:
        if self.window_fn == "rect":
            return np.ones(self.window_size)
        # periodic Hann: exact 3-tap spectrum at integer bins
        k = np.arange(self.window_size)
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * k / self.window_size)

    def snapshot(self) -> dict:
        return {
            "window_size": self.window_size,
            "hop_length": self.hop_length,
            "num_filters": self.num_filters,
            "overlap_ratio": self.overlap_ratio,
            "pad_mode": self.pad_mode,
            "window_fn": self.window_fn,
        }


def pad_to_frames(samples: np.ndarray, window: int, hop: int, mode: str) -> np.ndarray:
    """Symmetric padding so frames of `window` every `hop` tile the signal."""
    n = samples.size
    frames = 1 + max(0, math.ceil((n - window) / hop))
    target = window + (frames - 1) * hop
    padding = target - n
    if padding <= 0:
        return samples
    left = padding // 2
    right = padding - left
    if mode == "reflect" and n > 1:
        return np.pad(samples, (left, right), mode="reflect")
    return np.pad(samples, (left, right))


def frame_signal(samples: np.ndarray, window: int, hop: int) -> np.ndarray:
    n = samples.size
    count = 1 + (n - window) // hop
    idx = np.arange(window)[None, :] + hop * np.arange(count)[:, None]
    return samples[idx]


def stft(w: Waveform, cfg: StftConfig) -> np.ndarray:
    """Complex STFT matrix, one-sided: (num_filters//2 + 1) rows x frame cols.

    Entry (f, m) is the windowed DFT of the frame starting at m*hop after
    symmetric padding; 50% frame overlap at the default layout.
    """
    if w.samples.size == 0:
        raise InputError("empty waveform")
    padded = pad_to_frames(w.samples, cfg.window_size, cfg.hop_length, cfg.pad_mode)
    frames = frame_signal(padded, cfg.window_size, cfg.hop_length)
    spectra = np.fft.rfft(frames * cfg.window()[None, :], n=cfg.num_filters, axis=1)
    return spectra.T


def stft_spectrogram(w: Waveform, cfg: StftConfig, log_view: bool = False) -> Spectrogram:
    """Squared-magnitude STFT spectrogram, optionally 10*log10 scaled."""
    power = np.abs(stft(w, cfg)) ** 2
    if log_view:
        power = 10.0 * np.log10(power + LOG_FLOOR)
    meta = {
        "config": cfg.snapshot(),
        "source_id": w.source_id,
        "sample_rate_hz": w.sample_rate_hz,
        "log_view": bool(log_view),
    }
    return Spectrogram(power, Kind.STFT, meta)
