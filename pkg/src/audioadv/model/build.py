"""Desk-scale classifier architectures over the tensor module.

Two families stand in for large pretrained stacks: plain conv nets
(conv-relu-pool pyramids) and residual nets whose blocks are strictly
channel-preserving with identity skips, so zeroing a residual branch makes
the block an exact identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ShapeError
from ..tensor import Tensor, ops

ARCHITECTURES = ("mlp", "plain_cnn_s", "plain_cnn_m", "res_cnn_s", "res_cnn_m", "res_cnn_l")


@dataclass
class ModelSpec:
    arch: str
    input_shape: tuple[int, int]
    num_classes: int
    seed: int = 0

    def __post_init__(self):
        if self.arch not in ARCHITECTURES:
            raise ConfigError(f"unknown architecture {self.arch!r}")
        self.input_shape = (int(self.input_shape[0]), int(self.input_shape[1]))
        if min(self.input_shape) < 1:
            raise ConfigError(f"input_shape must be positive, got {self.input_shape}")
        if self.num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2, got {self.num_classes}")

    def to_dict(self) -> dict:
        return {
            "arch": self.arch,
            "input_shape": list(self.input_shape),
            "num_classes": self.num_classes,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(d["arch"], tuple(d["input_shape"]), d["num_classes"], d.get("seed", 0))


def _he(rng: np.random.Generator, shape: tuple, fan_in: int) -> np.ndarray:
    return rng.normal(0.0, math.sqrt(2.0 / fan_in), size=shape)


class _Dense:
    def __init__(self, rng, fan_in, fan_out):
        self.w = Tensor(_he(rng, (fan_in, fan_out), fan_in), requires_grad=True)
        self.b = Tensor(np.zeros(fan_out), requires_grad=True)

    def params(self):
        return [self.w, self.b]

    def apply(self, x):
        return ops.add(ops.matmul(x, self.w), self.b)


class _Conv:
    def __init__(self, rng, cin, cout, k=3, pad=1):
        fan_in = cin * k * k
        self.w = Tensor(_he(rng, (cout, cin, k, k), fan_in), requires_grad=True)
        self.b = Tensor(np.zeros((cout, 1, 1)), requires_grad=True)
        self.pad = pad

    def params(self):
        return [self.w, self.b]

    def apply(self, x):
        return ops.add(ops.conv2d(x, self.w, stride=1, pad=self.pad), self.b)


class _ResBlock:
    """Pre-activation residual block: x + conv(relu(conv(relu(x))))."""

    def __init__(self, rng, channels):
        self.c1 = _Conv(rng, channels, channels)
        self.c2 = _Conv(rng, channels, channels)

    def params(self):
        return self.c1.params() + self.c2.params()

    def apply(self, x):
        h = self.c2.apply(ops.relu(self.c1.apply(ops.relu(x))))
        return ops.add(x, h)


def _conv_stack_plan(arch: str) -> list:
    # (kind, args); "C" conv cin->cout + relu, "P" pool, "R" res block
    plans = {
        "plain_cnn_s": [("C", 1, 8), ("P",), ("C", 8, 16), ("P",)],
        "plain_cnn_m": [("C", 1, 8), ("P",), ("C", 8, 16), ("P",), ("C", 16, 32), ("P",)],
        "res_cnn_s": [("C", 1, 8), ("R", 8), ("P",)],
        "res_cnn_m": [("C", 1, 8), ("R", 8), ("P",), ("C", 8, 16), ("R", 16), ("P",)],
        "res_cnn_l": [("C", 1, 8), ("R", 8), ("P",), ("C", 8, 16), ("R", 16), ("P",), ("C", 16, 32), ("R", 32), ("P",)],
    }
    return plans[arch]


class Model:
    """A built classifier: deterministic parameters plus a forward pass."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        rng = np.random.default_rng(spec.seed)
        self._layers: list = []
        rows, cols = spec.input_shape

        if spec.arch == "mlp":
            hidden = 64
            self._layers = [
                ("flatten",),
                ("dense", _Dense(rng, rows * cols, hidden)),
                ("relu",),
                ("dense", _Dense(rng, hidden, spec.num_classes)),
            ]
        else:
            channels = 1
            h, w = rows, cols
            stack: list = []
            for step in _conv_stack_plan(spec.arch):
                if step[0] == "C":
                    _, cin, cout = step
                    stack.append(("conv", _Conv(rng, cin, cout)))
                    stack.append(("relu",))
                    channels = cout
                elif step[0] == "R":
                    stack.append(("res", _ResBlock(rng, step[1])))
                elif step[0] == "P":
                    if h < 2 or w < 2:
                        raise ConfigError(
                            f"input {spec.input_shape} too small for the {spec.arch} conv stack"
                        )
                    stack.append(("pool",))
                    h, w = h // 2, w // 2
            stack.append(("flatten",))
            if spec.arch == "plain_cnn_m":
                stack.append(("dense", _Dense(rng, channels * h * w, 64)))
                stack.append(("relu",))
                stack.append(("dense", _Dense(rng, 64, spec.num_classes)))
            else:
                stack.append(("dense", _Dense(rng, channels * h * w, spec.num_classes)))
            self._layers = stack

        self.parameters: list[Tensor] = []
        for layer in self._layers:
            if layer[0] in ("dense", "conv"):
                self.parameters.extend(layer[1].params())
            elif layer[0] == "res":
                self.parameters.extend(layer[1].params())

    @property
    def num_classes(self) -> int:
        return self.spec.num_classes

    def forward(self, x: Tensor) -> Tensor:
        """Logits for a (rows, cols) sample or a (batch, rows, cols) batch."""
        rows, cols = self.spec.input_shape
        single = x.ndim == 2
        if single:
            if x.shape != (rows, cols):
                raise ShapeError(f"expected input {self.spec.input_shape}, got {x.shape}")
            h = ops.reshape(x, (1, 1, rows, cols))
        elif x.ndim == 3:
            if x.shape[1:] != (rows, cols):
                raise ShapeError(f"expected input (*, {rows}, {cols}), got {x.shape}")
            h = ops.reshape(x, (x.shape[0], 1, rows, cols))
        else:
            raise ShapeError(f"expected 2-d or 3-d input, got {x.shape}")

        for layer in self._layers:
            tag = layer[0]
            if tag == "flatten":
                h = ops.flatten(h)
            elif tag == "relu":
                h = ops.relu(h)
            elif tag == "pool":
                h = ops.max_pool2d(h, 2)
            elif tag in ("dense", "conv", "res"):
                h = layer[1].apply(h)
        return ops.reshape(h, (self.spec.num_classes,)) if single else h

    def logits(self, x: np.ndarray) -> np.ndarray:
        """Pre-softmax scores outside any tape."""
        return self.forward(Tensor(x)).data

    def predict(self, x: np.ndarray) -> int:
        # argmax breaks ties toward the lowest class index
        return int(np.argmax(self.logits(x)))

    def probs(self, x: np.ndarray) -> np.ndarray:
        z = self.logits(x)
        e = np.exp(z - z.max())
        return e / e.sum()

    def param_vector(self) -> np.ndarray:
        return np.concatenate([p.data.reshape(-1) for p in self.parameters])

    def load_param_vector(self, vec: np.ndarray) -> None:
        vec = np.asarray(vec, dtype=np.float64)
        total = sum(p.size for p in self.parameters)
        if vec.size != total:
            raise ConfigError(f"parameter vector has {vec.size} entries, model needs {total}")
        pos = 0
        for p in self.parameters:
            p.data = vec[pos : pos + p.size].reshape(p.shape).copy()
            pos += p.size

    def zero_grads(self) -> None:
        for p in self.parameters:
            p.grad = None


def build(spec: ModelSpec) -> Model:
    """Deterministically initialized model (He fan-in scaling from spec.seed)."""
    return Model(spec)
