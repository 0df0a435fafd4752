"""Six attack algorithms over [0,1] spectrogram tensors under explicit budgets."""

from .blackbox import nes_gradient, pia
from .budgets import (
    ALGORITHMS,
    JSMA_THETA_GRID,
    AttackBudget,
    AttackOutcome,
    default_budget,
    make_outcome,
    perturbation_norms,
)
from .carlini import cw, cw_logit_loss
from .deepfool import deepfool, linearized_step
from .fast_gradient import bim, fgsm, loss_input_grad
from .jsma import jsma, saliency_map
from .runner import pick_target_label, run_attack

__all__ = [
    "ALGORITHMS",
    "AttackBudget",
    "AttackOutcome",
    "JSMA_THETA_GRID",
    "bim",
    "cw",
    "cw_logit_loss",
    "deepfool",
    "default_budget",
    "fgsm",
    "jsma",
    "linearized_step",
    "loss_input_grad",
    "make_outcome",
    "nes_gradient",
    "perturbation_norms",
    "pia",
    "pick_target_label",
    "run_attack",
    "saliency_map",
]
