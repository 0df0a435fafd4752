"""Campaign orchestration: shuffled batches, eligibility, resumable streams."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..attacks import AttackBudget, run_attack
from ..dataset import Sample, load_spectrogram_dataset, train_test_split
from ..errors import ConfigError
from ..model import load_checkpoint
from .store import OutcomeStore

log = logging.getLogger(__name__)


@dataclass
class CampaignSpec:
    checkpoint_path: str
    manifest_path: str
    budgets: list[AttackBudget]
    eps_grid: list[float] = field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    batch_size: int = 100
    num_batches: int = 5
    seed: int = 0
    split: str = "test"
    train_fraction: float = 0.7
    escalate_to_auc: float | None = None

    def __post_init__(self):
        if not self.budgets:
            raise ConfigError("campaign needs at least one attack budget")
        grid = [float(e) for e in self.eps_grid]
        if len(grid) < 2 or grid[0] <= 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"eps_grid must be ascending and positive, got {self.eps_grid}")
        if self.batch_size < 1 or self.num_batches < 1:
            raise ConfigError("batch plan must be positive")
        if self.split not in ("test", "train", "all"):
            raise ConfigError(f"split must be test/train/all, got {self.split!r}")


def attack_key(budget_index: int, budget: AttackBudget) -> str:
    return f"{budget_index}:{budget.algorithm}"


def run_campaign_samples(
    model,
    samples: Sequence[Sample],
    budgets: Sequence[AttackBudget],
    seed: int,
    store: OutcomeStore | None = None,
    defended: bool = False,
    plan: int | None = None,
    sample_offsets: Sequence[int] | None = None,
    jobs: int = 1,
) -> list[dict]:
    """Attack eligible samples with every budget; returns new records only.

    Eligibility excludes clean-misclassified samples from all fooling
    statistics. Per-(budget, sample) RNG streams are derived from stable
    ids, so interrupted campaigns resume with exactly the missing records
    and jobs > 1 changes nothing but wall time (results are appended in
    sample order regardless of completion order).
    """
    order = np.random.default_rng(seed).permutation(len(samples))
    if plan is not None:
        order = order[:plan]
    if sample_offsets is None:
        sample_offsets = list(range(len(samples)))

    eligible = [i for i in order if model.predict(samples[i].features) == samples[i].label]
    if not eligible:
        log.warning("campaign: no correctly-classified samples; empty outcome stream")
        return []

    tasks = []
    for b_idx, budget in enumerate(budgets):
        key = attack_key(b_idx, budget)
        for i in eligible:
            s = samples[i]
            if store is not None and store.has(s.sample_id, key):
                continue
            tasks.append((b_idx, budget, key, s, int(sample_offsets[i])))

    def run_one(task) -> dict:
        b_idx, budget, key, s, offset = task
        rng = np.random.default_rng([int(seed), b_idx, offset])
        outcome = run_attack(model, s.features, s.label, budget, rng=rng)
        return outcome.to_record(s.sample_id, key, budget.algorithm, defended)

    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            fresh = list(pool.map(run_one, tasks))
    else:
        fresh = [run_one(t) for t in tasks]

    if store is not None:
        for record in fresh:
            store.append(record)
    return fresh


def run_campaign(spec: CampaignSpec, store_path=None, jobs: int = 1) -> list[dict]:
    """Load artifacts, derive the split, and stream outcomes to a store."""
    ckpt = load_checkpoint(spec.checkpoint_path)
    model = ckpt.restore()
    dataset = load_spectrogram_dataset(spec.manifest_path)

    plan = spec.batch_size * spec.num_batches
    if plan > len(dataset):
        raise ConfigError(
            f"batch plan {spec.batch_size} x {spec.num_batches} exceeds dataset size {len(dataset)}"
        )

    if spec.split == "all":
        indices = np.arange(len(dataset))
    else:
        train_idx, test_idx = train_test_split(len(dataset), spec.train_fraction, seed=spec.seed)
        indices = train_idx if spec.split == "train" else test_idx
    samples = [dataset[i] for i in indices]

    store = OutcomeStore(store_path) if store_path is not None else None
    if spec.escalate_to_auc is not None:
        return _run_escalating(spec, model, samples, ckpt.adversarially_trained, store)
    return run_campaign_samples(
        model,
        samples,
        spec.budgets,
        spec.seed,
        store=store,
        defended=ckpt.adversarially_trained,
        plan=min(plan, len(samples)),
        sample_offsets=[int(i) for i in indices],
        jobs=jobs,
    )


def _run_escalating(spec: CampaignSpec, model, samples, defended: bool, store) -> list[dict]:
    """Per-budget AUC-driven escalation; appends only records missing from the store.

    The whole escalation is deterministic given the seed, so a resumed run
    recomputes identical outcomes and appends exactly the missing ones.
    """
    from ..errors import DataError
    from .metrics import escalating_attack

    fresh: list[dict] = []
    for b_idx, budget in enumerate(spec.budgets):
        key = attack_key(b_idx, budget)
        try:
            found, auc, outcomes = escalating_attack(
                model, samples, budget, spec.escalate_to_auc, spec.eps_grid, spec.seed
            )
        except DataError:
            log.warning("campaign: no correctly-classified samples; empty outcome stream")
            return fresh
        log.info("escalation %s: budget eps=%g iters=%d auc=%.3f", key, found.epsilon, found.max_iterations, auc)
        eligible = [s for s in samples if model.predict(s.features) == s.label]
        for s, outcome in zip(eligible, outcomes):
            record = outcome.to_record(s.sample_id, key, budget.algorithm, defended)
            if store is not None and store.has(s.sample_id, key):
                continue
            if store is not None:
                store.append(record)
            fresh.append(record)
    return fresh
