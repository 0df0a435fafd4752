"""Spectrogram container, tonnetz appending, and the on-disk ASPC format.

ASPC layout (all integers little-endian):

    magic "ASPC" | u8 version=1 | u8 kind | u16 reserved | u32 rows | u32 cols
    rows*cols float32, row-major | u32 metadata length | UTF-8 JSON metadata

Values are held as float32 in memory so write -> read round-trips are
bit-exact.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import ConfigError, FormatError, StateError

_MAGIC = b"ASPC"
_VERSION = 1

# Ratio of the chroma block height to the base spectrogram height in the
# full-scale layout (540 chroma rows under a 768-row base).
_CHROMA_ROW_RATIO = 540.0 / 768.0


class Kind(str, Enum):
    STFT = "stft"
    DWT = "dwt"
    STFT_TONNETZ = "stft_tonnetz"
    DWT_TONNETZ = "dwt_tonnetz"

    @property
    def code(self) -> int:
        return _KIND_CODES[self]

    @property
    def with_tonnetz(self) -> "Kind":
        if self is Kind.STFT:
            return Kind.STFT_TONNETZ
        if self is Kind.DWT:
            return Kind.DWT_TONNETZ
        raise StateError(f"{self.value} already carries tonnetz rows")


_KIND_CODES = {Kind.STFT: 1, Kind.DWT: 2, Kind.STFT_TONNETZ: 3, Kind.DWT_TONNETZ: 4}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}


@dataclass
class Spectrogram:
    """2-d time-frequency matrix (rows = frequency/scale bins, cols = frames)."""

    values: np.ndarray
    kind: Kind
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float32))
        if arr.ndim != 2 or arr.size == 0:
            raise ConfigError(f"spectrogram values must be a non-empty 2-d matrix, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError("spectrogram contains non-finite entries")
        self.values = arr
        self.kind = Kind(self.kind)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def nn_resize(matrix: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Nearest-neighbor resize of a 2-d matrix."""
    if rows < 1 or cols < 1:
        raise ConfigError(f"resize target must be positive, got {rows}x{cols}")
    src = np.asarray(matrix)
    ri = np.minimum(((np.arange(rows) + 0.5) * src.shape[0] / rows).astype(int), src.shape[0] - 1)
    ci = np.minimum(((np.arange(cols) + 0.5) * src.shape[1] / cols).astype(int), src.shape[1] - 1)
    return src[np.ix_(ri, ci)]


def resize_spectrogram(sp: Spectrogram, rows: int, cols: int) -> Spectrogram:
    meta = dict(sp.meta)
    meta["resized_from"] = [sp.rows, sp.cols]
    return Spectrogram(nn_resize(sp.values, rows, cols), sp.kind, meta)


def default_chroma_rows(base_rows: int) -> int:
    """Chroma block height for a given base height, multiple of 6.

    Scales the full-size 540:768 block ratio down to the working size, so a
    768-row base gets the full 540-row block.
    """
    return 6 * max(1, round(base_rows * _CHROMA_ROW_RATIO / 6.0))


def append_tonnetz(sp: Spectrogram, ch, target_cols: int | None = None, chroma_rows: int | None = None) -> Spectrogram:
    """Stack a resized tonal-centroid block below a base spectrogram.

    The chromagram is resampled along time (nearest neighbor) to the base
    width and its 6 centroid rows are replicated up to ``chroma_rows``. The
    append axis is the feature axis: output rows = base rows + chroma rows.
    """
    if sp.kind not in (Kind.STFT, Kind.DWT):
        raise StateError(f"cannot append tonnetz to kind {sp.kind.value}")
    cols = sp.cols if target_cols is None else int(target_cols)
    if cols != sp.cols:
        sp = resize_spectrogram(sp, sp.rows, cols)
    rows = default_chroma_rows(sp.rows) if chroma_rows is None else int(chroma_rows)
    if rows < 6:
        raise ConfigError(f"chroma block needs at least 6 rows, got {rows}")
    block = nn_resize(np.asarray(ch.values, dtype=np.float32), rows, cols)
    meta = dict(sp.meta)
    meta["tonnetz"] = {"chroma_rows": rows, "append_axis": "feature"}
    return Spectrogram(np.vstack([sp.values, block]), sp.kind.with_tonnetz, meta)


def write_spectrogram(sp: Spectrogram, path) -> None:
    meta_json = json.dumps(sp.meta, sort_keys=True, separators=(",", ":")).encode("utf-8")
    header = struct.pack(
        "<4sBBHII", _MAGIC, _VERSION, sp.kind.code, 0, sp.rows, sp.cols
    )
    body = sp.values.astype("<f4").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header + body + struct.pack("<I", len(meta_json)) + meta_json)


def read_spectrogram(path) -> Spectrogram:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 16:
        raise FormatError(f"{path}: truncated header")
    magic, version, code, _, rows, cols = struct.unpack_from("<4sBBHII", blob, 0)
    if magic != _MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    kind = _CODE_KINDS.get(code)
    if kind is None:
        raise FormatError(f"{path}: unknown kind code {code}")
    need = 16 + rows * cols * 4 + 4
    if len(blob) < need:
        raise FormatError(f"{path}: truncated payload")
    values = np.frombuffer(blob, dtype="<f4", count=rows * cols, offset=16).reshape(rows, cols)
    (meta_len,) = struct.unpack_from("<I", blob, 16 + rows * cols * 4)
    meta_start = 16 + rows * cols * 4 + 4
    if len(blob) != meta_start + meta_len:
        raise FormatError(f"{path}: metadata length mismatch")
    try:
        meta = json.loads(blob[meta_start:].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: bad metadata block: {exc}") from None
    return Spectrogram(values.copy(), kind, meta)
