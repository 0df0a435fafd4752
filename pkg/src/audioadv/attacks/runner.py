"""Single entry point dispatching a budget to its attack implementation."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .blackbox import pia
from .budgets import AttackBudget, AttackOutcome
from .carlini import cw
from .deepfool import deepfool
from .fast_gradient import bim, fgsm
from .jsma import jsma

TARGETED_ALGORITHMS = ("jsma", "cw", "pia")


def pick_target_label(label: int, num_classes: int, rng: np.random.Generator) -> int:
    """Seeded random wrong label for targeted campaigns."""
    others = [c for c in range(num_classes) if c != label]
    return int(rng.choice(others))


def run_attack(
    model,
    x: np.ndarray,
    label: int,
    budget: AttackBudget,
    rng: np.random.Generator | None = None,
) -> AttackOutcome:
    """Run one attack on one sample against a frozen model.

    `label` is the clean (true) label. Targeted algorithms use
    budget.target_label when set, otherwise a seeded random wrong label;
    `rng` is required for PIA and for random target selection.
    """
    algo = budget.algorithm
    if algo in TARGETED_ALGORITHMS:
        target = budget.target_label
        if target is None:
            if rng is None:
                raise ConfigError(f"{algo} needs an rng to draw a random target label")
            target = pick_target_label(label, model.num_classes, rng)
        elif target == label:
            raise ConfigError("target label must differ from the clean label")

    if algo == "fgsm":
        return fgsm(model, x, label, budget.epsilon)
    if algo in ("bim_a", "bim_b"):
        return bim(model, x, label, budget)
    if algo == "jsma":
        return jsma(model, x, target, budget)
    if algo == "deepfool":
        return deepfool(model, x, budget)
    if algo == "cw":
        return cw(model, x, target, budget)
    if algo == "pia":
        if rng is None:
            raise ConfigError("pia needs an rng for NES sampling")
        return pia(model, x, target, budget, rng)
    raise ConfigError(f"unknown attack algorithm {algo!r}")
