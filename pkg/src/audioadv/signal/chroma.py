"""Harmonic-change features: CQT pitch classes and 6-d tonal centroids.

Four stages: (1) constant-Q log-frequency spectrum, (2) fold into 12
quantized pitch-class bins with L1 column normalization, (3) project each
column through the fixed 6x12 tonal-centroid transform (circle-of-fifths
and minor/major-third sin-cos pairs), (4) moving-average smoothing along
time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError
from .wav import Waveform, resample

CHROMA_RATE_HZ = 22050
CQT_FMIN_HZ = 65.40639  # C2
CQT_BINS_PER_OCTAVE = 12
CQT_OCTAVES = 5
CQT_HOP = 1024
SMOOTHING_FRAMES = 5

# Window-length multiplier over the canonical constant-Q length. Semitone
# classes must stay separable after folding: at 1.0 the Hann mainlobe
# swallows neighboring semitones and octave equivalence degrades to ~1e-2.
CQT_FILTER_SCALE = 3.0

# Radii of the three interval circles (fifths, minor thirds, major thirds).
_R_FIFTHS = 1.0
_R_MINOR = 1.0
_R_MAJOR = 0.5


def tonal_centroid_matrix() -> np.ndarray:
    """Fixed 6x12 projection from pitch classes to tonal centroids."""
    l = np.arange(12, dtype=np.float64)
    return np.stack(
        [
            _R_FIFTHS * np.sin(l * 7.0 * np.pi / 6.0),
            _R_FIFTHS * np.cos(l * 7.0 * np.pi / 6.0),
            _R_MINOR * np.sin(l * 3.0 * np.pi / 2.0),
            _R_MINOR * np.cos(l * 3.0 * np.pi / 2.0),
            _R_MAJOR * np.sin(l * 2.0 * np.pi / 3.0),
            _R_MAJOR * np.cos(l * 2.0 * np.pi / 3.0),
        ]
    )


@dataclass
class Chromagram:
    """6-row tonal-centroid track plus the intermediate pitch-class matrix."""

    values: np.ndarray
    pitch_classes: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.pitch_classes = np.asarray(self.pitch_classes, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != 6:
            raise InputError(f"chromagram needs 6 centroid rows, got {self.values.shape}")
        if self.pitch_classes.shape != (12, self.values.shape[1]):
            raise InputError("pitch-class matrix must be 12 x frames")
        sums = self.pitch_classes.sum(axis=0)
        ok = np.isclose(sums, 1.0, atol=1e-6) | np.isclose(sums, 0.0, atol=1e-12)
        if not ok.all():
            raise InputError("pitch-class columns must be L1-normalized or all-zero")


def _cqt_frequencies() -> np.ndarray:
    k = np.arange(CQT_BINS_PER_OCTAVE * CQT_OCTAVES)
    return CQT_FMIN_HZ * 2.0 ** (k / CQT_BINS_PER_OCTAVE)


def _cqt_magnitudes(samples: np.ndarray, fs: int) -> tuple[np.ndarray, int]:
    """Constant-Q magnitudes per frame; unit sine at a bin center reads ~1."""
    q = CQT_FILTER_SCALE / (2.0 ** (1.0 / CQT_BINS_PER_OCTAVE) - 1.0)
    freqs = _cqt_frequencies()
    lengths = np.round(q * fs / freqs).astype(int)
    n_max = int(lengths.max())
    n = samples.size
    if n < n_max:
        raise InputError(f"waveform too short for one CQT frame ({n} < {n_max} samples)")

    first = n_max // 2
    last = n - (n_max - n_max // 2)
    centers = np.arange(first, last + 1, CQT_HOP)
    mags = np.empty((freqs.size, centers.size))
    for k, (f, nk) in enumerate(zip(freqs, lengths)):
        win = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(nk) / nk)
        probe = win * np.exp(-2j * np.pi * f * np.arange(nk) / fs)
        gain = win.sum() / 2.0
        starts = centers - nk // 2
        idx = starts[:, None] + np.arange(nk)[None, :]
        mags[k] = np.abs(samples[idx] @ probe) / gain
    return mags, centers.size


def _smooth(values: np.ndarray, width: int) -> np.ndarray:
    if width <= 1 or values.shape[1] == 1:
        return values
    pad = width // 2
    padded = np.pad(values, ((0, 0), (pad, pad)), mode="edge")
    kernel = np.ones(width) / width
    out = np.empty_like(values)
    for row in range(values.shape[0]):
        out[row] = np.convolve(padded[row], kernel, mode="valid")[: values.shape[1]]
    return out


def tonnetz_chromagram(w: Waveform, smoothing: int = SMOOTHING_FRAMES) -> Chromagram:
    """Smoothed 6-d tonal centroids for a waveform (resampled to 22.05 kHz)."""
    w = resample(w, CHROMA_RATE_HZ)
    mags, _ = _cqt_magnitudes(w.samples, CHROMA_RATE_HZ)

    folded = np.zeros((12, mags.shape[1]))
    for k in range(mags.shape[0]):
        folded[k % 12] += mags[k]
    sums = folded.sum(axis=0)
    nonzero = sums > 0
    normed = np.zeros_like(folded)
    normed[:, nonzero] = folded[:, nonzero] / sums[nonzero]

    centroids = tonal_centroid_matrix() @ normed
    centroids = _smooth(centroids, smoothing)
    meta = {
        "source_id": w.source_id,
        "sample_rate_hz": CHROMA_RATE_HZ,
        "cqt": {
            "fmin_hz": CQT_FMIN_HZ,
            "bins_per_octave": CQT_BINS_PER_OCTAVE,
            "octaves": CQT_OCTAVES,
            "hop": CQT_HOP,
        },
        "smoothing_frames": smoothing,
    }
    return Chromagram(centroids, normed, meta)
