"""Jacobian-based saliency map attack (targeted, L0)."""

from __future__ import annotations

from time import perf_counter

import numpy as np

from ..tensor import Tensor, jacobian
from .budgets import AttackBudget, AttackOutcome, make_outcome


def saliency_map(jac: np.ndarray, target: int) -> np.ndarray:
    """Increase-rule saliency over flattened features.

    alpha = dZ_target/dx_i, beta = sum of the other rows. The shield zeroes
    features with alpha < 0 or beta > 0; elsewhere the score is
    |alpha| * |beta|.
    """
    alpha = jac[target]
    beta = jac.sum(axis=0) - alpha
    scores = np.abs(alpha) * np.abs(beta)
    scores[(alpha < 0) | (beta > 0)] = 0.0
    return scores


def jsma(model, x: np.ndarray, target_label: int, budget: AttackBudget) -> AttackOutcome:
    """Perturb the argmax-saliency feature by +theta per iteration.

    theta is budget.epsilon (already normalized to the [0,1] domain);
    features pinned at the upper bound leave the candidate pool. A
    saliency map that is zero everywhere ends the attack with status
    "failed_saturated".
    """
    t0 = perf_counter()
    x = np.asarray(x, dtype=np.float64)
    theta = budget.epsilon
    target = int(target_label)
    x_adv = x.copy()
    flat = x_adv.reshape(-1)

    iterations = 0
    status = "ok"
    for i in range(budget.max_iterations):
        jac = jacobian(model.forward, Tensor(x_adv))
        scores = saliency_map(jac, target)
        scores[flat >= 1.0] = 0.0  # saturated features cannot move further up
        if not np.any(scores > 0):
            status = "failed_saturated"
            iterations = i
            break
        idx = int(np.argmax(scores))
        flat[idx] = min(1.0, flat[idx] + theta)
        iterations = i + 1
        if model.predict(x_adv) == target:
            break

    adv_label = model.predict(x_adv)
    success = adv_label == target
    return make_outcome(
        x, x_adv, model.predict(x), adv_label, success, iterations,
        wall_time=perf_counter() - t0, status=status,
    )
