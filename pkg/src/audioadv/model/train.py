"""Minibatch SGD training with k-fold validation splits and early stopping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..dataset import Sample, kfold_indices
from ..errors import ConfigError, DataError
from ..tensor import Tape, Tensor, ops
from .build import Model
from .checkpoint import Checkpoint

# loss_fn(model, x_batch, labels, sample_indices) -> scalar Tensor
LossFn = Callable[[Model, np.ndarray, np.ndarray, np.ndarray], Tensor]


@dataclass
class TrainConfig:
    epochs: int = 40
    batch_size: int = 8
    learning_rate: float = 0.05
    early_stop_patience: int = 5
    folds: int = 5
    train_fraction: float = 0.7

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.early_stop_patience < 0:
            raise ConfigError(f"early_stop_patience must be >= 0, got {self.early_stop_patience}")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "early_stop_patience": self.early_stop_patience,
            "folds": self.folds,
            "train_fraction": self.train_fraction,
        }


def _check_classes(dataset: Sequence[Sample], num_classes: int, folds: int) -> None:
    counts = np.zeros(num_classes, dtype=int)
    for s in dataset:
        if not 0 <= s.label < num_classes:
            raise DataError(f"label {s.label} outside [0, {num_classes})")
        counts[s.label] += 1
    empty = np.nonzero(counts == 0)[0]
    if empty.size:
        raise DataError(f"classes {empty.tolist()} have no samples")
    if counts.min() < folds:
        raise DataError(f"every class needs >= {folds} samples, smallest has {counts.min()}")


def _batch_arrays(dataset: Sequence[Sample], indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.stack([dataset[i].features for i in indices])
    y = np.array([dataset[i].label for i in indices], dtype=np.intp)
    return x, y


def _default_loss(model: Model, x: np.ndarray, y: np.ndarray, idx: np.ndarray) -> Tensor:
    return ops.cross_entropy(model.forward(Tensor(x)), y)


def _mean_loss(model: Model, dataset: Sequence[Sample], indices: np.ndarray) -> float:
    x, y = _batch_arrays(dataset, indices)
    return ops.cross_entropy(model.forward(Tensor(x)), y).item()


def _accuracy(model: Model, dataset: Sequence[Sample], indices: np.ndarray) -> float:
    logits = model.forward(Tensor(np.stack([dataset[i].features for i in indices]))).data
    preds = logits.argmax(axis=1)
    labels = np.array([dataset[i].label for i in indices])
    return float((preds == labels).mean())


def train(
    model: Model,
    dataset: Sequence[Sample],
    cfg: TrainConfig,
    loss_fn: Optional[LossFn] = None,
    tag_adversarial: bool = False,
    extra_meta: Optional[dict] = None,
) -> Checkpoint:
    """SGD on cross-entropy (or a custom loss) with early stopping.

    Fold 0 of a seeded k-fold split serves as the validation set; training
    stops once validation loss has failed to improve for more than
    `early_stop_patience` consecutive epochs, and the best-epoch parameters
    are restored.
    """
    if not dataset:
        raise DataError("empty training dataset")
    _check_classes(dataset, model.num_classes, cfg.folds)
    loss_fn = loss_fn or _default_loss

    n = len(dataset)
    folds = kfold_indices(n, cfg.folds, seed=model.spec.seed)
    val_idx = folds[0]
    train_idx = np.sort(np.concatenate(folds[1:]))

    rng = np.random.default_rng(model.spec.seed + 1)
    history: list[dict] = []
    best_val = np.inf
    best_params = model.param_vector()
    best_epoch = -1
    streak = 0

    for epoch in range(cfg.epochs):
        order = rng.permutation(train_idx)
        batch_losses = []
        for start in range(0, order.size, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            x, y = _batch_arrays(dataset, batch)
            model.zero_grads()
            with Tape() as tape:
                loss = loss_fn(model, x, y, batch)
            tape.backward(loss)
            for p in model.parameters:
                p.data = p.data - cfg.learning_rate * p.grad
            batch_losses.append(loss.item())

        val_loss = _mean_loss(model, dataset, val_idx)
        record = {
            "epoch": epoch,
            "train_loss": float(np.mean(batch_losses)),
            "val_loss": val_loss,
            "train_acc": _accuracy(model, dataset, train_idx),
            "val_acc": _accuracy(model, dataset, val_idx),
        }
        history.append(record)

        if val_loss < best_val:
            best_val = val_loss
            best_params = model.param_vector()
            best_epoch = epoch
            streak = 0
        else:
            streak += 1
            if streak > cfg.early_stop_patience:
                break

    model.load_param_vector(best_params)
    meta = {"train_config": cfg.to_dict(), "best_epoch": best_epoch}
    if extra_meta:
        meta.update(extra_meta)
    return Checkpoint(
        spec=model.spec,
        params=model.param_vector(),
        history=history,
        adversarially_trained=tag_adversarial,
        meta=meta,
    )


def evaluate(model: Model, dataset: Sequence[Sample]) -> float:
    """Fraction of argmax-correct predictions."""
    if not dataset:
        raise DataError("cannot evaluate on an empty dataset")
    correct = sum(1 for s in dataset if model.predict(s.features) == s.label)
    return correct / len(dataset)
