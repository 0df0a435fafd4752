"""Quick self-contained oracle suite for the `selftest` CLI command.

Smaller and faster than the full acceptance tests, but checks the same
machinery: analytic gradients against finite differences, the fast STFT
against a naive DFT, the closed-form DeepFool step, and the NES estimator
against an analytic gradient.
"""

from __future__ import annotations

import numpy as np

from .attacks import AttackBudget, deepfool, nes_gradient
from .model import ModelSpec, build
from .signal import StftConfig, Waveform, stft
from .signal.stft import frame_signal, pad_to_frames
from .tensor import Tape, Tensor, ops


def _finite_diff_check(seed: int) -> float:
    rng = np.random.default_rng(seed)
    model = build(ModelSpec("mlp", (2, 3), 2, seed=seed))
    x = rng.uniform(0.1, 0.9, (2, 3))
    label = int(rng.integers(0, 2))

    def loss_at(params: np.ndarray) -> float:
        model.load_param_vector(params)
        return ops.cross_entropy(model.forward(Tensor(x)), label).item()

    theta = model.param_vector()
    model.zero_grads()
    with Tape() as tape:
        loss = ops.cross_entropy(model.forward(Tensor(x)), label)
    tape.backward(loss)
    analytic = np.concatenate([p.grad.reshape(-1) for p in model.parameters])

    h = 1e-5
    idx = rng.choice(theta.size, size=min(25, theta.size), replace=False)
    max_rel = 0.0
    for i in idx:
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        fd = (loss_at(up) - loss_at(down)) / (2 * h)
        denom = max(abs(fd), abs(analytic[i]), 1e-8)
        max_rel = max(max_rel, abs(fd - analytic[i]) / denom)
    model.load_param_vector(theta)
    return max_rel


def _stft_oracle_error(seed: int) -> float:
    rng = np.random.default_rng(seed)
    sig = rng.uniform(-0.9, 0.9, 1500)
    cfg = StftConfig(window_size=128, hop_length=64, num_filters=128)
    fast = stft(Waveform(sig, 8000, "selftest"), cfg)
    padded = pad_to_frames(sig, 128, 64, "zero")
    frames = frame_signal(padded, 128, 64)
    n = np.arange(128)
    dft = np.exp(-2j * np.pi * np.outer(np.arange(65), n) / 128)
    slow = np.stack([dft @ (f * cfg.window()) for f in frames], axis=1)
    return float(np.abs(fast - slow).max())


def _deepfool_closed_form_error(seed: int) -> float:
    rng = np.random.default_rng(seed)
    w_vec = rng.normal(size=6)
    b = rng.normal() * 0.05

    class Affine:
        num_classes = 2

        def forward(self, t):
            W = np.stack([np.zeros(6), w_vec])
            return ops.add(ops.matmul(ops.constant(W), t), ops.constant(np.array([0.0, b])))

        def logits(self, x):
            return np.array([0.0, w_vec @ np.asarray(x, float).reshape(-1) + b])

        def predict(self, x):
            return int(np.argmax(self.logits(x)))

        def probs(self, x):
            z = self.logits(x)
            e = np.exp(z - z.max())
            return e / e.sum()

    m = Affine()
    x = rng.uniform(0.45, 0.55, 6)
    f = w_vec @ x + b
    expected = -f * w_vec / (w_vec @ w_vec)
    out = deepfool(m, x, AttackBudget("deepfool", epsilon=1.0, max_iterations=1, norm="l2"), overshoot=1.0)
    return float(np.abs((out.x_adv - x) - expected).max())


def _nes_cosine(seed: int) -> float:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, 20)
    grad, _ = nes_gradient(lambda v: float(v @ v), x, 2000, 0.01, np.random.default_rng(seed + 1))
    true = 2 * x
    return float(grad @ true / (np.linalg.norm(grad) * np.linalg.norm(true)))


def run_selftest() -> int:
    checks = []

    worst = max(_finite_diff_check(s) for s in range(10))
    checks.append(("gradient-check (10 nets, rel err < 1e-4)", worst < 1e-4, f"max rel err {worst:.2e}"))

    err = max(_stft_oracle_error(s) for s in range(3))
    checks.append(("stft-oracle (naive DFT, abs err < 1e-6)", err < 1e-6, f"max abs err {err:.2e}"))

    err = max(_deepfool_closed_form_error(s) for s in range(5))
    checks.append(("deepfool closed form (err < 1e-10)", err < 1e-10, f"max err {err:.2e}"))

    cos = min(_nes_cosine(s) for s in range(3))
    checks.append(("nes-estimator (cosine > 0.99)", cos > 0.99, f"min cosine {cos:.4f}"))

    failed = 0
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failed += 0 if ok else 1
    print(f"selftest: {len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1
