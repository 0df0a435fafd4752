"""Attack budgets and per-sample outcomes.

`epsilon` carries per-algorithm semantics: the l-inf bound for FGSM/BIM/PIA
and the per-step feature increment (theta) for JSMA; DeepFool and CW do not
consume it. Default budgets follow the published allocation regime: BIM
eps 0.0015 at >= 75% confidence, JSMA 1000 iterations with the intensity
grid {50..250}/255, DeepFool 100 iterations (escalating to 600), CW search
steps c in {1,3,5,7} paired with {25,100,1000,1500} iterations, PIA
eps 0.001 over 500 iterations with learning rate in [0.001, 0.6] decaying
by 0.001 per step.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ConfigError

ALGORITHMS = ("fgsm", "bim_a", "bim_b", "jsma", "deepfool", "cw", "pia")
NORMS = ("l0", "l2", "linf")

JSMA_THETA_GRID = tuple(v / 255.0 for v in (50, 100, 150, 200, 250))


@dataclass
class AttackBudget:
    algorithm: str
    epsilon: float = 0.0015
    max_iterations: int = 10
    confidence: float = 0.0
    targeted: bool = False
    target_label: int | None = None
    norm: str = "linf"
    cw_c_grid: tuple = (1.0, 3.0, 5.0, 7.0)
    cw_iteration_grid: tuple = (25, 100, 1000, 1500)
    cw_kappa: float = 0.0
    nes_samples: int = 50
    nes_sigma: float = 0.001
    lr_range: tuple = (0.001, 0.6)
    lr_decay: float = 0.001
    step_size: float | None = None  # BIM zeta; None -> epsilon / max_iterations

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown attack algorithm {self.algorithm!r}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ConfigError(f"confidence must be in [0, 1], got {self.confidence}")
        if self.norm not in NORMS:
            raise ConfigError(f"norm must be one of {NORMS}, got {self.norm!r}")
        if self.algorithm == "cw":
            if not self.cw_c_grid:
                raise ConfigError("cw needs a non-empty c grid")
            if len(self.cw_c_grid) != len(self.cw_iteration_grid):
                raise ConfigError("cw c grid and iteration grid must pair up")
        if self.nes_samples < 1:
            raise ConfigError(f"nes_samples must be >= 1, got {self.nes_samples}")
        if self.nes_sigma <= 0:
            raise ConfigError(f"nes_sigma must be positive, got {self.nes_sigma}")
        lo, hi = self.lr_range
        if not 0 < lo <= hi:
            raise ConfigError(f"lr_range must satisfy 0 < lo <= hi, got {self.lr_range}")
        if not 0.0 <= self.lr_decay < 1.0:
            raise ConfigError(f"lr_decay must be in [0, 1), got {self.lr_decay}")
        if self.step_size is not None and self.step_size <= 0:
            raise ConfigError(f"step_size must be positive, got {self.step_size}")

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "epsilon": self.epsilon,
            "max_iterations": self.max_iterations,
            "confidence": self.confidence,
            "targeted": self.targeted,
            "target_label": self.target_label,
            "norm": self.norm,
            "cw_c_grid": list(self.cw_c_grid),
            "cw_iteration_grid": list(self.cw_iteration_grid),
            "cw_kappa": self.cw_kappa,
            "nes_samples": self.nes_samples,
            "nes_sigma": self.nes_sigma,
            "lr_range": list(self.lr_range),
            "lr_decay": self.lr_decay,
            "step_size": self.step_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttackBudget":
        kwargs = dict(d)
        for key in ("cw_c_grid", "cw_iteration_grid", "lr_range"):
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


def default_budget(algorithm: str, **overrides) -> AttackBudget:
    """Published-allocation defaults for one algorithm."""
    presets = {
        "fgsm": dict(epsilon=0.0015, max_iterations=1, norm="linf"),
        "bim_a": dict(epsilon=0.0015, max_iterations=10, confidence=0.75, norm="linf"),
        "bim_b": dict(epsilon=0.0015, max_iterations=10, confidence=0.75, norm="linf"),
        "jsma": dict(epsilon=JSMA_THETA_GRID[0], max_iterations=1000, targeted=True, norm="l0"),
        "deepfool": dict(epsilon=1.0, max_iterations=100, norm="l2"),
        "cw": dict(epsilon=1.0, max_iterations=1, targeted=True, norm="l2"),
        "pia": dict(epsilon=0.001, max_iterations=500, targeted=True, norm="linf"),
    }
    if algorithm not in presets:
        raise ConfigError(f"unknown attack algorithm {algorithm!r}")
    kwargs = presets[algorithm]
    kwargs.update(overrides)
    return AttackBudget(algorithm=algorithm, **kwargs)


def perturbation_norms(x_adv: np.ndarray, x: np.ndarray) -> tuple[float, float, float]:
    """(l0, l2, linf) of x_adv - x."""
    delta = (np.asarray(x_adv) - np.asarray(x)).reshape(-1)
    return (
        float(np.count_nonzero(delta)),
        float(np.sqrt(np.dot(delta, delta))),
        float(np.abs(delta).max()) if delta.size else 0.0,
    )


@dataclass
class AttackOutcome:
    """Per-sample attack result; wall_time is never persisted."""

    success: bool
    x_adv: np.ndarray
    original_label: int
    adversarial_label: int
    norms: tuple[float, float, float]
    iterations_used: int
    queries_used: int = 0
    wall_time: float = 0.0
    status: str = "ok"

    def x_adv_digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.x_adv, dtype=np.float64).tobytes()).hexdigest()

    def to_record(self, sample_id: str, attack_key: str, algorithm: str, defended: bool) -> dict:
        return {
            "sample_id": sample_id,
            "attack": attack_key,
            "algorithm": algorithm,
            "defended": bool(defended),
            "success": bool(self.success),
            "original_label": int(self.original_label),
            "adversarial_label": int(self.adversarial_label),
            "norms": {"l0": self.norms[0], "l2": self.norms[1], "linf": self.norms[2]},
            "iterations_used": int(self.iterations_used),
            "queries_used": int(self.queries_used),
            "status": self.status,
            "x_adv_sha256": self.x_adv_digest(),
        }


def make_outcome(
    x: np.ndarray,
    x_adv: np.ndarray,
    original_label: int,
    adversarial_label: int,
    success: bool,
    iterations_used: int,
    queries_used: int = 0,
    wall_time: float = 0.0,
    status: str = "ok",
) -> AttackOutcome:
    return AttackOutcome(
        success=success,
        x_adv=np.asarray(x_adv, dtype=np.float64),
        original_label=int(original_label),
        adversarial_label=int(adversarial_label),
        norms=perturbation_norms(x_adv, x),
        iterations_used=int(iterations_used),
        queries_used=int(queries_used),
        wall_time=float(wall_time),
        status=status,
    )
