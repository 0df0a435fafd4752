"""Desk-scale classifiers: architectures, training, evaluation, checkpoints."""

from .build import ARCHITECTURES, Model, ModelSpec, build
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .train import TrainConfig, evaluate, train

__all__ = [
    "ARCHITECTURES",
    "Checkpoint",
    "Model",
    "ModelSpec",
    "TrainConfig",
    "build",
    "evaluate",
    "load_checkpoint",
    "save_checkpoint",
    "train",
]
