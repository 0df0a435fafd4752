"""Differentiable primitive operations.

Each primitive computes its forward value eagerly with numpy, records a
pullback closure on the active tape, and checks the result for NaN/Inf.
Broadcasting is deliberately restricted to scalar factors and bias-add
patterns so every gradient rule stays auditable. Subgradient choices:
relu'(0) = 0 and clip' = 0 on and outside the boundaries.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigError, ShapeError
from .core import Tensor, active_tape


def _emit(data: np.ndarray, inputs: tuple, pullback) -> Tensor:
    out = Tensor._from_op(np.asarray(data, dtype=np.float64))
    tape = active_tape()
    if tape is not None:
        tape.record(inputs, out, pullback)
    return out


def constant(data) -> Tensor:
    """Wrap raw data as a non-differentiable tensor."""
    return Tensor(data)


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (gs, ss) in enumerate(zip(g.shape, shape)) if ss == 1 and gs != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _bias_compatible(a_shape: tuple, b_shape: tuple) -> bool:
    # Bias-add: (C,) onto (..., C), or (C, 1, 1) onto (..., C, H, W).
    if len(b_shape) == 1 and len(a_shape) >= 1 and a_shape[-1] == b_shape[0]:
        return True
    if (
        len(b_shape) == 3
        and b_shape[1:] == (1, 1)
        and len(a_shape) >= 3
        and a_shape[-3] == b_shape[0]
    ):
        return True
    return False


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape and not _bias_compatible(a.shape, b.shape):
        raise ShapeError(f"add: incompatible shapes {a.shape} vs {b.shape}")
    a_shape, b_shape = a.shape, b.shape

    def pullback(g):
        return _unbroadcast(g, a_shape), _unbroadcast(g, b_shape)

    return _emit(a.data + b.data, (a, b), pullback)


def sub(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape and b.size != 1 and a.size != 1:
        raise ShapeError(f"sub: incompatible shapes {a.shape} vs {b.shape}")
    a_shape, b_shape = a.shape, b.shape

    def pullback(g):
        return _unbroadcast(g, a_shape), -_unbroadcast(g, b_shape)

    return _emit(a.data - b.data, (a, b), pullback)


def neg(a: Tensor) -> Tensor:
    return _emit(-a.data, (a,), lambda g: (-g,))


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape and a.size != 1 and b.size != 1:
        raise ShapeError(f"mul: incompatible shapes {a.shape} vs {b.shape}")
    a_data, b_data = a.data, b.data
    a_shape, b_shape = a.shape, b.shape

    def pullback(g):
        return _unbroadcast(g * b_data, a_shape), _unbroadcast(g * a_data, b_shape)

    return _emit(a.data * b.data, (a, b), pullback)


def scale(a: Tensor, k: float) -> Tensor:
    """Multiply by a python float (a non-differentiable constant)."""
    k = float(k)
    return _emit(a.data * k, (a,), lambda g: (g * k,))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    a_data, b_data = a.data, b.data
    if a.ndim == 2 and b.ndim == 2:
        if a.shape[1] != b.shape[0]:
            raise ShapeError(f"matmul: {a.shape} @ {b.shape}")

        def pullback(g):
            return g @ b_data.T, a_data.T @ g

    elif a.ndim == 1 and b.ndim == 2:
        if a.shape[0] != b.shape[0]:
            raise ShapeError(f"matmul: {a.shape} @ {b.shape}")

        def pullback(g):
            return b_data @ g, np.outer(a_data, g)

    elif a.ndim == 2 and b.ndim == 1:
        if a.shape[1] != b.shape[0]:
            raise ShapeError(f"matmul: {a.shape} @ {b.shape}")

        def pullback(g):
            return np.outer(g, b_data), a_data.T @ g

    else:
        raise ShapeError(f"matmul: unsupported ranks {a.ndim} and {b.ndim}")
    return _emit(a_data @ b_data, (a, b), pullback)


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0.0
    return _emit(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def tanh(a: Tensor) -> Tensor:
    out_data = np.tanh(a.data)
    return _emit(out_data, (a,), lambda g: (g * (1.0 - out_data * out_data),))


def log(a: Tensor) -> Tensor:
    a_data = a.data
    return _emit(np.log(a_data), (a,), lambda g: (g / a_data,))


def clip(a: Tensor, lo: float, hi: float) -> Tensor:
    if not lo < hi:
        raise ConfigError(f"clip: lo {lo} must be < hi {hi}")
    mask = (a.data > lo) & (a.data < hi)
    return _emit(np.clip(a.data, lo, hi), (a,), lambda g: (g * mask,))


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    old_shape = a.shape
    try:
        data = a.data.reshape(shape)
    except ValueError as exc:
        raise ShapeError(str(exc)) from None
    return _emit(data, (a,), lambda g: (g.reshape(old_shape),))


def flatten(a: Tensor) -> Tensor:
    """Collapse all but the leading (batch) axis."""
    if a.ndim < 2:
        raise ShapeError(f"flatten expects ndim >= 2, got {a.shape}")
    return reshape(a, (a.shape[0], -1))


def tsum(a: Tensor) -> Tensor:
    """Sum of all entries, as a scalar tensor."""
    shape = a.shape
    return _emit(a.data.sum(), (a,), lambda g: (np.broadcast_to(g, shape).copy(),))


def gather(a: Tensor, index) -> Tensor:
    """Pick one entry of a 1-d tensor, or one entry per row of a 2-d tensor."""
    if a.ndim == 1:
        idx = int(index)
        if not 0 <= idx < a.shape[0]:
            raise ShapeError(f"gather: index {idx} out of range for {a.shape}")
        shape = a.shape

        def pullback(g):
            out = np.zeros(shape)
            out[idx] = g
            return (out,)

        return _emit(a.data[idx], (a,), pullback)
    if a.ndim == 2:
        idx = np.asarray(index, dtype=np.intp)
        if idx.shape != (a.shape[0],):
            raise ShapeError(f"gather: indices {idx.shape} for rows of {a.shape}")
        rows = np.arange(a.shape[0])
        shape = a.shape

        def pullback(g):
            out = np.zeros(shape)
            out[rows, idx] = g
            return (out,)

        return _emit(a.data[rows, idx], (a, ), pullback)
    raise ShapeError(f"gather: unsupported ndim {a.ndim}")


def softmax(a: Tensor) -> Tensor:
    """Softmax along the last axis (shift-stabilized)."""
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)

    def pullback(g):
        return (s * (g - (g * s).sum(axis=-1, keepdims=True)),)

    return _emit(s, (a,), pullback)


def log_softmax(a: Tensor) -> Tensor:
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    out_data = shifted - lse

    def pullback(g):
        return (g - np.exp(out_data) * g.sum(axis=-1, keepdims=True),)

    return _emit(out_data, (a,), pullback)


def _pool_view(data: np.ndarray, size: int):
    b, c, h, w = data.shape
    oh, ow = h // size, w // size
    cropped = data[:, :, : oh * size, : ow * size]
    win = cropped.reshape(b, c, oh, size, ow, size)
    win = win.transpose(0, 1, 2, 4, 3, 5).reshape(b, c, oh, ow, size * size)
    return win, (b, c, h, w, oh, ow)


def max_pool2d(a: Tensor, size: int = 2) -> Tensor:
    """Non-overlapping max pooling over the trailing two axes of a 4-d tensor.

    Ties route the gradient to the first maximal entry; trailing rows/cols
    that do not fill a window are dropped.
    """
    if a.ndim != 4:
        raise ShapeError(f"max_pool2d expects (B, C, H, W), got {a.shape}")
    if size < 1 or a.shape[2] < size or a.shape[3] < size:
        raise ShapeError(f"max_pool2d: window {size} too large for {a.shape}")
    win, dims = _pool_view(a.data, size)
    b, c, h, w, oh, ow = dims
    idx = win.argmax(axis=-1)
    out_data = np.take_along_axis(win, idx[..., None], axis=-1)[..., 0]

    def pullback(g):
        gwin = np.zeros((b, c, oh, ow, size * size))
        np.put_along_axis(gwin, idx[..., None], g[..., None], axis=-1)
        gx = np.zeros((b, c, h, w))
        gwin = gwin.reshape(b, c, oh, ow, size, size).transpose(0, 1, 2, 4, 3, 5)
        gx[:, :, : oh * size, : ow * size] = gwin.reshape(b, c, oh * size, ow * size)
        return (gx,)

    return _emit(out_data, (a,), pullback)


def _im2col(x: np.ndarray, kh: int, kw: int, stride: int, oh: int, ow: int) -> np.ndarray:
    b, c = x.shape[:2]
    cols = np.empty((b, c, kh, kw, oh, ow), dtype=np.float64)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = x[:, :, i : i + stride * oh : stride, j : j + stride * ow : stride]
    return cols.reshape(b, c * kh * kw, oh * ow)


def _col2im(cols: np.ndarray, xshape: tuple, kh: int, kw: int, stride: int, oh: int, ow: int) -> np.ndarray:
    b, c, h, w = xshape
    gx = np.zeros(xshape)
    cols = cols.reshape(b, c, kh, kw, oh, ow)
    for i in range(kh):
        for j in range(kw):
            gx[:, :, i : i + stride * oh : stride, j : j + stride * ow : stride] += cols[:, :, i, j]
    return gx


def conv2d(x: Tensor, w: Tensor, stride: int = 1, pad: int = 0) -> Tensor:
    """2-d cross-correlation of (B, Cin, H, W) with kernel (Cout, Cin, kH, kW)."""
    if x.ndim != 4 or w.ndim != 4:
        raise ShapeError(f"conv2d expects 4-d input and kernel, got {x.shape}, {w.shape}")
    b, cin, h, wd = x.shape
    cout, cin_k, kh, kw = w.shape
    if cin != cin_k:
        raise ShapeError(f"conv2d: input channels {cin} != kernel channels {cin_k}")
    if stride < 1:
        raise ConfigError(f"conv2d: stride must be >= 1, got {stride}")
    hp, wp = h + 2 * pad, wd + 2 * pad
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1
    if oh < 1 or ow < 1:
        raise ShapeError(f"conv2d: kernel {w.shape} too large for input {x.shape} with pad {pad}")

    xp = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x.data
    cols = _im2col(xp, kh, kw, stride, oh, ow)  # (B, Cin*kh*kw, L)
    wmat = w.data.reshape(cout, -1)
    out_data = (wmat @ cols).reshape(b, cout, oh, ow)
    w_shape = w.shape

    def pullback(g):
        gmat = g.reshape(b, cout, oh * ow)
        gw = np.einsum("bfl,bkl->fk", gmat, cols).reshape(w_shape)
        gcols = np.einsum("fk,bfl->bkl", wmat, gmat)
        gxp = _col2im(gcols, (b, cin, hp, wp), kh, kw, stride, oh, ow)
        gx = gxp[:, :, pad : hp - pad, pad : wp - pad] if pad else gxp
        return gx, gw

    return _emit(out_data, (x, w), pullback)


def cross_entropy(logits: Tensor, labels) -> Tensor:
    """Mean softmax cross-entropy.

    Accepts a (C,) logit vector with an int label, or a (B, C) batch with a
    length-B label sequence; always returns a scalar tensor.
    """
    if logits.ndim == 1:
        return neg(gather(log_softmax(logits), int(labels)))
    if logits.ndim == 2:
        batch = logits.shape[0]
        picked = gather(log_softmax(logits), labels)
        return scale(tsum(picked), -1.0 / batch)
    raise ShapeError(f"cross_entropy: unsupported logits shape {logits.shape}")
