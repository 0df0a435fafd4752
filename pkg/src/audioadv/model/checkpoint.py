"""Checkpoint container and the AMDL file format.

AMDL layout: magic "AMDL" | u8 version=1 | u32 JSON header length | JSON
header (spec, history, flags, parameter count) | float64 LE parameters.
Parameters are stored at full precision so round-trips are bit-exact.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, FormatError
from .build import Model, ModelSpec, build

_MAGIC = b"AMDL"
_VERSION = 1


@dataclass
class Checkpoint:
    spec: ModelSpec
    params: np.ndarray
    history: list = field(default_factory=list)
    adversarially_trained: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=np.float64).reshape(-1)

    def restore(self) -> Model:
        model = build(self.spec)
        model.load_param_vector(self.params)
        return model


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    header = {
        "spec": ckpt.spec.to_dict(),
        "history": ckpt.history,
        "adversarially_trained": ckpt.adversarially_trained,
        "meta": ckpt.meta,
        "param_count": int(ckpt.params.size),
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<BI", _VERSION, len(blob)) + blob)
        fh.write(ckpt.params.astype("<f8").tobytes())


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 9 or blob[:4] != _MAGIC:
        raise FormatError(f"{path}: not an AMDL checkpoint")
    version, jlen = struct.unpack_from("<BI", blob, 4)
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if len(blob) < 9 + jlen:
        raise FormatError(f"{path}: truncated header")
    try:
        header = json.loads(blob[9 : 9 + jlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: bad header: {exc}") from None
    count = int(header["param_count"])
    payload = blob[9 + jlen :]
    if len(payload) != count * 8:
        raise FormatError(f"{path}: parameter payload size mismatch")
    params = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    spec = ModelSpec.from_dict(header["spec"])
    ckpt = Checkpoint(
        spec=spec,
        params=params,
        history=header.get("history", []),
        adversarially_trained=bool(header.get("adversarially_trained", False)),
        meta=header.get("meta", {}),
    )
    expected = build(spec).param_vector().size
    if ckpt.params.size != expected:
        raise ConfigError(f"{path}: {ckpt.params.size} parameters, spec needs {expected}")
    return ckpt
