"""Tensor values and the gradient tape.

Reverse-mode differentiation in the TF-GradientTape style: primitive ops
executed while a :class:`Tape` is active append (inputs, output, pullback)
nodes in execution order; ``Tape.backward`` walks the node list in reverse
and accumulates gradients into every tensor created with
``requires_grad=True``. Everything is float64; any op that produces a NaN
or Inf raises immediately rather than poisoning downstream gradients.
"""

from __future__ import annotations

import threading
from typing import Callable, Optional

import numpy as np

from ..errors import NumericsError, ShapeError, StateError

_STATE = threading.local()


def _tape_stack() -> list:
    stack = getattr(_STATE, "stack", None)
    if stack is None:
        stack = []
        _STATE.stack = stack
    return stack


def active_tape() -> Optional["Tape"]:
    """The innermost tape currently recording in this thread, or None."""
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tensor:
    """Dense n-d float64 array with an optional accumulated gradient."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.array(data, dtype=np.float64)
        _check_finite(arr, "tensor init")
        self.data = arr
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None

    @classmethod
    def _from_op(cls, arr: np.ndarray) -> "Tensor":
        # Internal fast path: takes ownership of arr, no copy.
        _check_finite(arr, "op result")
        t = cls.__new__(cls)
        t.data = arr
        t.requires_grad = False
        t.grad = None
        return t

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() on tensor of shape {self.shape}")
        return float(self.data.reshape(()))

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


def _check_finite(arr: np.ndarray, where: str) -> None:
    if arr.size and not np.all(np.isfinite(arr)):
        raise NumericsError(f"non-finite values in {where}")


class _Node:
    __slots__ = ("inputs", "out", "pullback")

    def __init__(self, inputs, out, pullback):
        self.inputs = inputs
        self.out = out
        self.pullback = pullback


class Tape:
    """Ordered record of primitive ops; one backward pass per build unless reset.

    Use as a context manager around the forward computation::

        with Tape() as tape:
            logits = model.forward(x)
            loss = ops.cross_entropy(logits, label)
        tape.backward(loss)
    """

    def __init__(self):
        self._nodes: list[_Node] = []
        self._watched: set[Tensor] = set()
        self._consumed = False

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        stack = _tape_stack()
        if not stack or stack[-1] is not self:
            raise StateError("tape context exited out of order")
        stack.pop()
        return False

    def __len__(self) -> int:
        return len(self._nodes)

    def record(self, inputs: tuple, out: Tensor, pullback: Callable) -> None:
        self._nodes.append(_Node(inputs, out, pullback))
        for t in inputs:
            if t.requires_grad:
                self._watched.add(t)

    def backward(self, loss: Tensor) -> None:
        """Accumulate d(loss)/d(leaf) into every watched leaf's ``.grad``.

        The walk visits nodes in reverse execution order (a Wengert list is
        already topologically sorted), so results are deterministic.
        """
        if loss.data.size != 1:
            raise ShapeError(f"backward needs a scalar loss, got shape {loss.shape}")
        if not self._nodes:
            raise StateError("backward on an empty tape")
        if self._consumed:
            raise StateError("tape already differentiated; call reset() to reuse")
        self._consumed = True

        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        for node in reversed(self._nodes):
            g = grads.pop(id(node.out), None)
            if g is None:
                continue
            input_grads = node.pullback(g)
            for t, ig in zip(node.inputs, input_grads):
                if ig is None:
                    continue
                key = id(t)
                if key in grads:
                    grads[key] = grads[key] + ig
                else:
                    grads[key] = ig

        for t in self._watched:
            g = grads.get(id(t))
            if g is None:
                g = np.zeros_like(t.data)
            else:
                g = np.reshape(np.asarray(g, dtype=np.float64), t.data.shape)
            t.grad = g if t.grad is None else t.grad + g

    def reset(self) -> None:
        """Clear accumulated grads on watched leaves and re-arm the tape."""
        for t in self._watched:
            t.grad = None
        self._consumed = False


def jacobian(forward: Callable[[Tensor], Tensor], x: Tensor) -> np.ndarray:
    """Full Jacobian of a vector-valued forward function at x.

    Row j is the gradient of output component j with respect to the
    flattened input, computed with one backward pass per output.
    Returns an array of shape (num_outputs, x.size).
    """
    from . import ops  # local import: ops depends on core

    probe = Tensor(x.data, requires_grad=True)
    rows: list[np.ndarray] = []
    num_out = None
    j = 0
    while num_out is None or j < num_out:
        probe.grad = None
        with Tape() as tape:
            out = forward(probe)
            if num_out is None:
                if out.ndim != 1:
                    raise ShapeError(f"jacobian expects a 1-d output, got {out.shape}")
                num_out = out.shape[0]
            loss = ops.gather(out, j)
        tape.backward(loss)
        rows.append(probe.grad.reshape(-1).copy())
        j += 1
    return np.stack(rows)
