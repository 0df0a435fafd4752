"""Dataset manifests, spectrogram loading, normalization, and index splits.

A manifest is JSON-lines, one record per clip: {"path": str, "label": int,
"fold": int}. Paths are stored relative to the manifest file so workspaces
stay relocatable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError
from .signal import read_spectrogram


@dataclass
class ManifestEntry:
    path: str
    label: int
    fold: int = 0


@dataclass
class Sample:
    """One classifier input: min-max normalized features plus provenance."""

    features: np.ndarray
    label: int
    sample_id: str
    fold: int = 0


def read_manifest(path) -> list[ManifestEntry]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                entries.append(ManifestEntry(str(rec["path"]), int(rec["label"]), int(rec.get("fold", 0))))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"{path}:{lineno}: bad manifest record: {exc}") from None
    if not entries:
        raise DataError(f"{path}: empty manifest")
    return entries


def write_manifest(path, entries: list[ManifestEntry]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            fh.write(json.dumps({"path": e.path, "label": e.label, "fold": e.fold}, sort_keys=True) + "\n")


def normalize01(matrix: np.ndarray) -> np.ndarray:
    """Per-spectrogram min-max normalization to [0, 1]; constant input -> zeros.

    Applied to every classifier input so attack epsilons are comparable
    across representations.
    """
    arr = np.asarray(matrix, dtype=np.float64)
    lo, hi = arr.min(), arr.max()
    if hi <= lo:
        return np.zeros_like(arr)
    return (arr - lo) / (hi - lo)


def load_spectrogram_dataset(manifest_path) -> list[Sample]:
    base = Path(manifest_path).parent
    samples = []
    for e in read_manifest(manifest_path):
        sp = read_spectrogram(base / e.path)
        samples.append(Sample(normalize01(sp.values), e.label, e.path, e.fold))
    return samples


def kfold_indices(n: int, folds: int, seed: int = 0) -> list[np.ndarray]:
    """Disjoint, exhaustive, near-equal folds of range(n), seed-shuffled."""
    if folds < 2:
        raise DataError(f"need at least 2 folds, got {folds}")
    if n < folds:
        raise DataError(f"cannot split {n} samples into {folds} folds")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(chunk) for chunk in np.array_split(perm, folds)]


def train_test_split(n: int, train_fraction: float, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Seeded permutation split; first ceil(n*fraction) indices train."""
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must be in (0, 1), got {train_fraction}")
    perm = np.random.default_rng(seed).permutation(n)
    cut = max(1, min(n - 1, int(round(n * train_fraction))))
    return np.sort(perm[:cut]), np.sort(perm[cut:])
