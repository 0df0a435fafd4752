"""Mono waveform type plus a minimal RIFF/WAVE reader and writer.

Supported codecs: 16-bit integer PCM (format tag 1) and 32-bit IEEE float
(format tag 3), one or two channels. Stereo is averaged to mono at load
time and integer samples are scaled by 1/32768 so the domain invariant
(amplitudes within [-1, 1]) holds for every loaded file.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, FormatError, InputError, UnsupportedError

_PCM_INT = 1
_PCM_FLOAT = 3


@dataclass
class Waveform:
    """Mono audio signal with amplitudes in [-1, 1]."""

    samples: np.ndarray
    sample_rate_hz: int
    source_id: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise InputError("waveform needs a non-empty 1-d sample array")
        if not np.all(np.isfinite(self.samples)):
            raise InputError("waveform contains non-finite samples")
        peak = np.abs(self.samples).max()
        if peak > 1.0:
            raise InputError(f"waveform amplitudes exceed [-1, 1] (peak {peak:.4g})")
        if int(self.sample_rate_hz) <= 0:
            raise ConfigError(f"sample rate must be positive, got {self.sample_rate_hz}")
        self.sample_rate_hz = int(self.sample_rate_hz)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def load_wav(path) -> Waveform:
    """Read a RIFF/WAVE file into a mono waveform.

    Raises FormatError for malformed containers and UnsupportedError for
    codecs outside {PCM16, float32} or channel counts outside {1, 2}.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 or blob[0:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise FormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(blob):
        cid = blob[pos : pos + 4]
        (size,) = struct.unpack_from("<I", blob, pos + 4)
        body = blob[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise FormatError(f"{path}: truncated {cid!r} chunk")
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data":
            data = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or data is None:
        raise FormatError(f"{path}: missing fmt/data chunk")
    if len(fmt) < 16:
        raise FormatError(f"{path}: fmt chunk too short")
    tag, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)

    if channels not in (1, 2):
        raise UnsupportedError(f"{path}: {channels} channels unsupported")
    if tag == _PCM_INT and bits == 16:
        raw = np.frombuffer(data[: len(data) - len(data) % (2 * channels)], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif tag == _PCM_FLOAT and bits == 32:
        raw = np.frombuffer(data[: len(data) - len(data) % (4 * channels)], dtype="<f4")
        samples = raw.astype(np.float64)
        if samples.size and not np.all(np.isfinite(samples)):
            raise FormatError(f"{path}: non-finite float samples")
        peak = np.abs(samples).max() if samples.size else 0.0
        if peak > 1.0:
            samples = samples / peak
    else:
        raise UnsupportedError(f"{path}: codec tag {tag} / {bits} bits unsupported")

    if samples.size == 0:
        raise FormatError(f"{path}: empty data chunk")
    if channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    return Waveform(samples, rate, source_id=str(path))


def write_wav(path, w: Waveform, bits: int = 16) -> None:
    """Write a waveform as mono PCM16 (default) or float32 WAVE."""
    if bits == 16:
        tag, sampwidth = _PCM_INT, 2
        payload = np.clip(np.round(w.samples * 32768.0), -32768, 32767).astype("<i2").tobytes()
    elif bits == 32:
        tag, sampwidth = _PCM_FLOAT, 4
        payload = w.samples.astype("<f4").tobytes()
    else:
        raise ConfigError(f"write_wav supports 16 or 32 bits, got {bits}")
    byte_rate = w.sample_rate_hz * sampwidth
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, tag, 1, w.sample_rate_hz, byte_rate, sampwidth, bits)
    header += b"data" + struct.pack("<I", len(payload))
    with open(path, "wb") as fh:
        fh.write(header + payload)


def resample(w: Waveform, target_rate_hz: int) -> Waveform:
    """Linear-interpolation resampling (quality beyond linear is out of scope)."""
    if target_rate_hz <= 0:
        raise ConfigError(f"target rate must be positive, got {target_rate_hz}")
    if target_rate_hz == w.sample_rate_hz:
        return w
    n_out = max(1, int(round(w.samples.size * target_rate_hz / w.sample_rate_hz)))
    t_out = np.arange(n_out) * (w.sample_rate_hz / target_rate_hz)
    samples = np.interp(t_out, np.arange(w.samples.size), w.samples)
    return Waveform(samples, target_rate_hz, source_id=w.source_id)
