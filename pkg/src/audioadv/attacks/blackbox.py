"""Query-only attacks: NES gradient estimation and the PIA ascent loop."""

from __future__ import annotations

from time import perf_counter
from typing import Callable

import numpy as np

from ..errors import ConfigError
from .budgets import AttackBudget, AttackOutcome, make_outcome

_LOG_FLOOR = 1e-300


def nes_gradient(
    oracle: Callable[[np.ndarray], float],
    x: np.ndarray,
    n_samples: int,
    sigma: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Antithetic NES estimate of the oracle's gradient at x.

    g = (1 / (2 n sigma)) * sum_i [S(x + sigma u_i) - S(x - sigma u_i)] u_i
    with u_i standard normal. The oracle is any scalar objective over query
    access (e.g. the target-class log-probability). Returns (estimate,
    queries), with queries = 2 * n_samples.
    """
    if n_samples < 1:
        raise ConfigError(f"nes_gradient needs n_samples >= 1, got {n_samples}")
    if sigma <= 0:
        raise ConfigError(f"nes_gradient needs sigma > 0, got {sigma}")
    x = np.asarray(x, dtype=np.float64)
    acc = np.zeros_like(x)
    for _ in range(n_samples):
        u = rng.standard_normal(x.shape)
        acc += (oracle(x + sigma * u) - oracle(x - sigma * u)) * u
    return acc / (2.0 * n_samples * sigma), 2 * n_samples


def pia(
    model,
    x: np.ndarray,
    target_label: int,
    budget: AttackBudget,
    rng: np.random.Generator,
) -> AttackOutcome:
    """Projected NES ascent on the target-class log-probability.

    Sign steps start at lr_range hi, decay by (1 - lr_decay) per iteration
    with a floor at lr_range lo; every iterate is projected to the
    budget.epsilon l-inf ball and [0, 1]. Only NES queries are counted.
    """
    t0 = perf_counter()
    x = np.asarray(x, dtype=np.float64)
    target = int(target_label)
    eps = budget.epsilon
    lr_lo, lr_hi = budget.lr_range
    original = model.predict(x)

    def score(v: np.ndarray) -> float:
        return float(np.log(max(model.probs(v)[target], _LOG_FLOOR)))

    x_adv = x.copy()
    lr = lr_hi
    queries = 0
    iterations = 0
    success = False
    for _ in range(budget.max_iterations):
        grad, q = nes_gradient(score, x_adv, budget.nes_samples, budget.nes_sigma, rng)
        queries += q
        x_adv = x_adv + lr * np.sign(grad)
        x_adv = np.clip(x_adv, x - eps, x + eps)
        x_adv = np.clip(x_adv, 0.0, 1.0)
        lr = max(lr_lo, lr * (1.0 - budget.lr_decay))
        iterations += 1
        if model.predict(x_adv) == target:
            success = True
            break

    adv_label = model.predict(x_adv)
    return make_outcome(
        x, x_adv, original, adv_label, success and adv_label == target, iterations,
        queries_used=queries, wall_time=perf_counter() - t0,
    )
