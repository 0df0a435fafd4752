"""DeepFool: iterated minimal steps across the locally linearized boundary."""

from __future__ import annotations

from time import perf_counter

import numpy as np

from ..tensor import Tensor, jacobian
from .budgets import AttackBudget, AttackOutcome, make_outcome

OVERSHOOT = 1.02


def linearized_step(model, x: np.ndarray, current: int) -> np.ndarray | None:
    """Minimal-l2 step to the nearest linearized class boundary.

    For each competing class k the boundary gap is z_k - z_current with
    gradient w_k; the chosen boundary minimizes |gap| / ||w||_2 and the step
    is -gap * w / ||w||^2 (zero exactly on the boundary).
    """
    z = model.logits(x)
    jac = jacobian(model.forward, Tensor(x))
    best_dist = np.inf
    best = None
    for k in range(z.size):
        if k == current:
            continue
        w = jac[k] - jac[current]
        wnorm = float(np.sqrt(np.dot(w, w)))
        if wnorm == 0.0:
            continue
        gap = float(z[k] - z[current])
        dist = abs(gap) / wnorm
        if dist < best_dist:
            best_dist = dist
            best = (-gap / (wnorm * wnorm)) * w
    return None if best is None else best.reshape(x.shape)


def deepfool(model, x: np.ndarray, budget: AttackBudget, overshoot: float = OVERSHOOT) -> AttackOutcome:
    """Non-targeted l2 attack; the final perturbation is scaled by `overshoot`."""
    t0 = perf_counter()
    x = np.asarray(x, dtype=np.float64)
    original = model.predict(x)

    x_cur = x.copy()
    iterations = 0
    status = "ok"
    for _ in range(budget.max_iterations):
        if model.predict(x_cur) != original:
            break
        step = linearized_step(model, x_cur, original)
        if step is None:
            status = "degenerate"
            break
        x_cur = x_cur + step
        iterations += 1

    x_adv = np.clip(x + overshoot * (x_cur - x), 0.0, 1.0)
    adv_label = model.predict(x_adv)
    success = adv_label != original
    return make_outcome(
        x, x_adv, original, adv_label, success, iterations,
        wall_time=perf_counter() - t0, status=status,
    )
