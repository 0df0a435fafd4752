"""One-shot and iterative sign-gradient attacks (FGSM, BIM-a, BIM-b)."""

from __future__ import annotations

from time import perf_counter

import numpy as np

from ..tensor import Tape, Tensor, ops
from .budgets import AttackBudget, AttackOutcome, make_outcome


def loss_input_grad(model, x: np.ndarray, label: int) -> np.ndarray:
    """Gradient of the cross-entropy loss at the true label w.r.t. the input."""
    probe = Tensor(x, requires_grad=True)
    with Tape() as tape:
        loss = ops.cross_entropy(model.forward(probe), int(label))
    tape.backward(loss)
    grad = probe.grad.copy()
    tape.reset()  # leave model parameter grads untouched by attack calls
    return grad


def fgsm(model, x: np.ndarray, label: int, eps: float) -> AttackOutcome:
    """x_adv = clip01(x + eps * sign(grad)); exactly one gradient computation."""
    t0 = perf_counter()
    x = np.asarray(x, dtype=np.float64)
    grad = loss_input_grad(model, x, label)
    if not np.any(grad):
        return make_outcome(
            x, x.copy(), label, label, False, 1, wall_time=perf_counter() - t0, status="degenerate"
        )
    x_adv = np.clip(x + eps * np.sign(grad), 0.0, 1.0)
    adv_label = model.predict(x_adv)
    return make_outcome(
        x, x_adv, label, adv_label, adv_label != label, 1, wall_time=perf_counter() - t0
    )


def bim(model, x: np.ndarray, label: int, budget: AttackBudget) -> AttackOutcome:
    """Iterated sign steps clipped to the eps-ball and [0, 1] after every step.

    BIM-a stops at the first confident label flip; BIM-b always runs the full
    iteration budget. Success requires softmax confidence on the adversarial
    label of at least budget.confidence.
    """
    t0 = perf_counter()
    x = np.asarray(x, dtype=np.float64)
    eps = budget.epsilon
    zeta = budget.step_size if budget.step_size is not None else eps / budget.max_iterations
    first_adversarial = budget.algorithm == "bim_a"

    x_adv = x.copy()
    iterations = 0
    for i in range(budget.max_iterations):
        grad = loss_input_grad(model, x_adv, label)
        if i == 0 and not np.any(grad):
            return make_outcome(
                x, x.copy(), label, label, False, 1, wall_time=perf_counter() - t0, status="degenerate"
            )
        x_adv = x_adv + zeta * np.sign(grad)
        x_adv = np.clip(x_adv, x - eps, x + eps)
        x_adv = np.clip(x_adv, 0.0, 1.0)
        iterations = i + 1
        if first_adversarial:
            probs = model.probs(x_adv)
            lbl = int(np.argmax(probs))
            if lbl != label and probs[lbl] >= budget.confidence:
                break

    probs = model.probs(x_adv)
    adv_label = int(np.argmax(probs))
    success = adv_label != label and probs[adv_label] >= budget.confidence
    return make_outcome(
        x, x_adv, label, adv_label, success, iterations, wall_time=perf_counter() - t0
    )
