"""Minimal n-d tensors with exact reverse-mode automatic differentiation."""

from . import ops
from .core import Tape, Tensor, active_tape, jacobian

__all__ = ["Tensor", "Tape", "active_tape", "jacobian", "ops"]
