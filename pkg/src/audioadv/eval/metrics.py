"""Fooling curves, AUC-driven budget escalation, and perturbation ratios."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..attacks import AttackBudget, run_attack
from ..errors import BudgetExhausted, ConfigError, DataError

log = logging.getLogger(__name__)

# Hard caps for budget escalation, per algorithm. An l-inf bound of 1
# already spans the whole [0,1] box; DeepFool's iteration supremum is 600
# per the published schedule; JSMA's intensity cannot exceed full scale.
ESCALATION_CAPS = {
    "fgsm": ("epsilon", 1.0),
    "bim_a": ("epsilon", 1.0),
    "bim_b": ("epsilon", 1.0),
    "pia": ("epsilon", 1.0),
    "deepfool": ("max_iterations", 600),
    "jsma": ("epsilon", 1.0),
    "cw": ("cw_c_scale", 1024.0),
}


@dataclass
class FoolingCurve:
    """Success rate vs l2 budget, with trapezoidal AUC normalized to [0, 1]."""

    points: list[tuple[float, float]]
    auc: float


def _record_fields(outcome) -> tuple[bool, float]:
    if isinstance(outcome, dict):
        return bool(outcome["success"]), float(outcome["norms"]["l2"])
    return bool(outcome.success), float(outcome.norms[1])


def fooling_curve(outcomes: Sequence, eps_grid: Sequence[float]) -> FoolingCurve:
    """Cumulative success counting: rate(eps) = #(success and l2 <= eps) / #attacked."""
    if not len(outcomes):
        raise DataError("fooling_curve needs at least one outcome")
    grid = [float(e) for e in eps_grid]
    if len(grid) < 2 or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] <= 0:
        raise ConfigError(f"eps_grid must be ascending and positive, got {eps_grid}")
    pairs = [_record_fields(o) for o in outcomes]
    total = len(pairs)
    rates = [sum(1 for ok, l2 in pairs if ok and l2 <= e) / total for e in grid]
    auc = float(np.trapezoid(rates, grid) / (grid[-1] - grid[0]))
    return FoolingCurve(points=list(zip(grid, rates)), auc=auc)


def _escalate(budget: AttackBudget) -> AttackBudget | None:
    """Double the algorithm's escalation axis; None once the cap is hit."""
    axis, cap = ESCALATION_CAPS[budget.algorithm]
    if axis == "epsilon":
        if budget.epsilon >= cap:
            return None
        return replace(budget, epsilon=min(cap, budget.epsilon * 2.0))
    if axis == "max_iterations":
        if budget.max_iterations >= cap:
            return None
        return replace(budget, max_iterations=min(cap, budget.max_iterations * 2))
    # cw: double every c in the search grid, capped by the largest c
    if max(budget.cw_c_grid) >= cap:
        return None
    return replace(budget, cw_c_grid=tuple(min(cap, c * 2.0) for c in budget.cw_c_grid))


def attack_samples(model, samples, budget: AttackBudget, seed: int) -> list:
    """Attack every correctly-classified sample; returns AttackOutcome list."""
    outcomes = []
    for i, s in enumerate(samples):
        if model.predict(s.features) != s.label:
            continue
        rng = np.random.default_rng([seed, 0, i])
        outcomes.append(run_attack(model, s.features, s.label, budget, rng=rng))
    return outcomes


def desk_eps_grid(num_features: int, points: int = 5) -> list[float]:
    """l2 grid scaled to the input dimension: [0.5 .. 1.0] * sqrt(features).

    The full-scale reference grid tops out at 3 for ~1.2M-feature images;
    desk-size inputs need the axis rescaled to their attainable norms.
    """
    top = float(np.sqrt(num_features))
    return list(np.linspace(0.5 * top, top, points))


def escalating_attack(
    model,
    samples,
    attack: AttackBudget,
    target_auc: float = 0.9,
    eps_grid: Sequence[float] = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0),
    seed: int = 0,
) -> tuple[AttackBudget, float, list]:
    """Allocate budget per sample until the fooling AUC clears the target.

    Every eligible sample is attacked at the current budget; samples keep
    the outcome of their first success (their allocated budget), failures
    are retried at each escalation. Returns (budget, auc, outcomes) where
    outcomes hold each sample's minimal-budget success or its final failure.
    Raises BudgetExhausted (carrying best-so-far) once the per-algorithm cap
    is hit.
    """
    eligible = [
        (i, s) for i, s in enumerate(samples) if model.predict(s.features) == s.label
    ]
    if not eligible:
        raise DataError("escalating_attack: no correctly-classified samples")

    budget = attack
    best_budget, best_auc = attack, -1.0
    results: dict[int, object] = {}
    while True:
        for i, s in eligible:
            if i in results and results[i].success:
                continue
            rng = np.random.default_rng([seed, 0, i])
            results[i] = run_attack(model, s.features, s.label, budget, rng=rng)
        outcomes = [results[i] for i, _ in eligible]
        auc = fooling_curve(outcomes, eps_grid).auc
        if auc > best_auc:
            best_budget, best_auc = budget, auc
        if auc > target_auc:
            return budget, auc, outcomes
        nxt = _escalate(budget)
        if nxt is None:
            raise BudgetExhausted(
                f"{attack.algorithm}: AUC {best_auc:.3f} <= target {target_auc} at the escalation cap",
                best_budget=best_budget,
                best_auc=best_auc,
            )
        log.info("budget escalation %s: auc %.3f <= %.3f", attack.algorithm, auc, target_auc)
        budget = nxt


def budget_search(
    model,
    dataset,
    attack: AttackBudget,
    target_auc: float = 0.9,
    eps_grid: Sequence[float] = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0),
    seed: int = 0,
) -> tuple[AttackBudget, float]:
    """First doubled budget whose fooling AUC exceeds target, with that AUC."""
    budget, auc, _ = escalating_attack(model, dataset, attack, target_auc, eps_grid, seed)
    return budget, auc


def _tagged_mean_l2(records: Sequence[dict], expect_defended: bool, side: str) -> tuple[float, float]:
    vals = []
    for rec in records:
        if "defended" in rec and bool(rec["defended"]) != expect_defended:
            raise DataError(
                f"epsilon_ratio: {side} outcomes must come from a "
                f"{'defended' if expect_defended else 'non-defended'} checkpoint"
            )
        ok, l2 = _record_fields(rec)
        if ok:
            vals.append(l2)
    if not vals:
        raise DataError(f"epsilon_ratio: no successful outcomes on the {side} side")
    return float(np.mean(vals)), float(np.max(vals))


def epsilon_ratio(adv_outcomes: Sequence[dict], orig_outcomes: Sequence[dict]) -> float:
    """|mean successful l2 (defended model) / mean successful l2 (original)|.

    Values >= 1 mean the defense raised the attacker's perturbation cost.
    """
    mean_a, _ = _tagged_mean_l2(adv_outcomes, True, "adversarially-trained")
    mean_o, _ = _tagged_mean_l2(orig_outcomes, False, "original")
    if mean_o == 0.0:
        raise DataError("epsilon_ratio: original-model mean perturbation is zero")
    return abs(mean_a / mean_o)


def epsilon_ratio_max(adv_outcomes: Sequence[dict], orig_outcomes: Sequence[dict]) -> float:
    """Max-based variant, reported alongside the mean-based ratio."""
    _, max_a = _tagged_mean_l2(adv_outcomes, True, "adversarially-trained")
    _, max_o = _tagged_mean_l2(orig_outcomes, False, "original")
    if max_o == 0.0:
        raise DataError("epsilon_ratio: original-model max perturbation is zero")
    return abs(max_a / max_o)
