"""Continuous wavelet scalograms on a geometric scale ladder.

The transform follows the analytic form: row (scale s), column (shift tau)
holds |(1/sqrt(s)) * sum_t a[t] * conj(psi)((t - tau)/s)|, evaluated by FFT
convolution at chunk-center shifts. Scales are laid out geometrically so
mother-function center frequencies cover [fmin, Nyquist].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .spectrogram import Kind, Spectrogram
from .stft import LOG_FLOOR, pad_to_frames
from .wav import Waveform, resample

# Envelope support half-width in units of the scale; exp(-t^2/2) is below
# 3.4e-4 beyond |t| = 4.
_SUPPORT = 4.0

# Finer than this many voices per octave adds no Nyquist-meaningful
# resolution to the ladder.
_MAX_VOICES_PER_OCTAVE = 64


@dataclass
class DwtConfig:
    mother: str = "complex_morlet"
    sampling_rate_hz: int = 16000
    num_scales: int = 128
    overlap_ratio: float = 0.5
    log_view: bool = True
    morlet_omega: float = 6.0
    fmin_hz: float = 50.0
    chunk_size: int = 1024

    def __post_init__(self):
        if self.mother not in ("complex_morlet", "haar", "mexican_hat"):
            raise ConfigError(f"unknown mother function {self.mother!r}")
        if self.sampling_rate_hz <= 0:
            raise ConfigError(f"sampling_rate_hz must be positive, got {self.sampling_rate_hz}")
        if self.num_scales < 2:
            raise ConfigError(f"num_scales must be >= 2, got {self.num_scales}")
        if not 0.0 <= self.overlap_ratio < 1.0:
            raise ConfigError(f"overlap_ratio must be in [0, 1), got {self.overlap_ratio}")
        if self.morlet_omega <= 0:
            raise ConfigError(f"morlet_omega must be positive, got {self.morlet_omega}")
        if not 0.0 < self.fmin_hz < self.sampling_rate_hz / 2:
            raise ConfigError(f"fmin_hz must lie in (0, Nyquist), got {self.fmin_hz}")
        if self.chunk_size < 2:
            raise ConfigError(f"chunk_size must be >= 2, got {self.chunk_size}")
        octaves = math.log2((self.sampling_rate_hz / 2) / self.fmin_hz)
        cap = math.ceil(octaves * _MAX_VOICES_PER_OCTAVE)
        if self.num_scales > cap:
            raise ConfigError(
                f"num_scales {self.num_scales} exceeds the Nyquist-meaningful "
                f"range ({cap} for {self.fmin_hz} Hz..Nyquist)"
            )

    def snapshot(self) -> dict:
        return {
            "mother": self.mother,
            "sampling_rate_hz": self.sampling_rate_hz,
            "num_scales": self.num_scales,
            "overlap_ratio": self.overlap_ratio,
            "log_view": self.log_view,
            "morlet_omega": self.morlet_omega,
            "fmin_hz": self.fmin_hz,
            "chunk_size": self.chunk_size,
        }


def morlet_kernel(t_grid, omega: float) -> np.ndarray:
    """Complex Morlet mother function sampled on t_grid."""
    if omega <= 0:
        raise ConfigError(f"omega must be positive, got {omega}")
    t = np.asarray(t_grid, dtype=np.float64)
    return (1.0 / math.sqrt(2.0 * math.pi)) * np.exp(-1j * omega * t) * np.exp(-0.5 * t * t)


def haar_kernel(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=np.float64)
    return np.where((t >= 0) & (t < 0.5), 1.0, 0.0) - np.where((t >= 0.5) & (t < 1.0), 1.0, 0.0)


def mexican_hat_kernel(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=np.float64)
    norm = 2.0 / (math.sqrt(3.0) * math.pi**0.25)
    return norm * (1.0 - t * t) * np.exp(-0.5 * t * t)


def mother_center_frequency(cfg: DwtConfig) -> float:
    """Oscillation frequency of the mother function, cycles per unit t."""
    if cfg.mother == "complex_morlet":
        return cfg.morlet_omega / (2.0 * math.pi)
    if cfg.mother == "mexican_hat":
        return math.sqrt(2.5) / (2.0 * math.pi)
    return 1.0  # haar, approximate


def scale_ladder(cfg: DwtConfig) -> np.ndarray:
    """Geometric scales (in samples), largest first so rows run low->high Hz."""
    fc = mother_center_frequency(cfg)
    s_min = fc * cfg.sampling_rate_hz / (cfg.sampling_rate_hz / 2.0)
    s_max = fc * cfg.sampling_rate_hz / cfg.fmin_hz
    return np.geomspace(s_max, s_min, cfg.num_scales)


def center_frequencies(cfg: DwtConfig) -> np.ndarray:
    """Center frequency in Hz for each scalogram row."""
    fc = mother_center_frequency(cfg)
    return fc * cfg.sampling_rate_hz / scale_ladder(cfg)


def _mother(cfg: DwtConfig, t: np.ndarray) -> np.ndarray:
    if cfg.mother == "complex_morlet":
        return morlet_kernel(t, cfg.morlet_omega)
    if cfg.mother == "mexican_hat":
        return mexican_hat_kernel(t).astype(complex)
    return haar_kernel(t).astype(complex)


def _half_support(cfg: DwtConfig, s: float) -> int:
    if cfg.mother == "haar":
        return int(math.ceil(s)) + 1
    return int(math.ceil(_SUPPORT * s))


def cwt_matrix(samples: np.ndarray, cfg: DwtConfig) -> np.ndarray:
    """Magnitude CWT at every sample shift: (num_scales, len(samples))."""
    n = samples.size
    scales = scale_ladder(cfg)
    half_max = _half_support(cfg, scales.max())
    nfft = 1
    while nfft < n + 2 * half_max + 1:
        nfft *= 2
    sig_f = np.fft.fft(samples, nfft)
    out = np.empty((cfg.num_scales, n), dtype=np.float64)
    for row, s in enumerate(scales):
        half = _half_support(cfg, s)
        d = np.arange(-half, half + 1)
        # convolution kernel v[d] = conj(psi)(-d/s)/sqrt(s), so (a * v)[tau]
        # equals the correlation sum_t a[t] conj(psi)((t - tau)/s)/sqrt(s)
        v = np.conj(_mother(cfg, -d / s)) / math.sqrt(s)
        ker_f = np.fft.fft(np.roll(np.pad(v, (0, nfft - v.size)), -half), nfft)
        conv = np.fft.ifft(sig_f * ker_f)
        out[row] = np.abs(conv[:n])
    return out


def dwt_spectrogram(w: Waveform, cfg: DwtConfig) -> Spectrogram:
    """Wavelet scalogram sampled at 50%-overlapping chunk centers."""
    w = resample(w, cfg.sampling_rate_hz)
    hop = max(1, round(cfg.chunk_size * (1.0 - cfg.overlap_ratio)))
    padded = pad_to_frames(w.samples, cfg.chunk_size, hop, "zero")
    count = 1 + (padded.size - cfg.chunk_size) // hop
    centers = cfg.chunk_size // 2 + hop * np.arange(count)
    mags = cwt_matrix(padded, cfg)[:, centers]
    if cfg.log_view:
        mags = 10.0 * np.log10(mags + LOG_FLOOR)
    meta = {
        "config": cfg.snapshot(),
        "source_id": w.source_id,
        "sample_rate_hz": w.sample_rate_hz,
        "log_view": bool(cfg.log_view),
    }
    return Spectrogram(mags, Kind.DWT, meta)
