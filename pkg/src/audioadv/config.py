"""Project configuration for the CLI: one JSON document, flag-overridable."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .attacks import AttackBudget, default_budget
from .defense import AdvTrainConfig
from .errors import ConfigError
from .model import TrainConfig
from .signal import DwtConfig, StftConfig

REPRESENTATIONS = ("stft", "dwt", "stft-tonnetz", "dwt-tonnetz")


@dataclass
class RepresentationConfig:
    kind: str = "dwt"
    target_rows: int = 128
    target_cols: int = 128
    chroma_rows: int | None = None
    log_view: bool = True
    stft: dict = field(default_factory=dict)
    dwt: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in REPRESENTATIONS:
            raise ConfigError(f"representation must be one of {REPRESENTATIONS}, got {self.kind!r}")
        if self.target_rows < 1 or self.target_cols < 1:
            raise ConfigError("representation target size must be positive")

    def stft_config(self) -> StftConfig:
        return StftConfig(**self.stft)

    def dwt_config(self) -> DwtConfig:
        kwargs = dict(self.dwt)
        kwargs.setdefault("log_view", self.log_view)
        return DwtConfig(**kwargs)


@dataclass
class ProjectConfig:
    workspace: str = "."
    seed: int = 0
    dataset_name: str = "toy"
    manifest: str = "clips.jsonl"
    representation: RepresentationConfig = field(default_factory=RepresentationConfig)
    model: dict = field(default_factory=lambda: {"arch": "plain_cnn_s", "num_classes": 4})
    train: TrainConfig = field(default_factory=TrainConfig)
    defense: AdvTrainConfig = field(default_factory=AdvTrainConfig)
    attacks: list[AttackBudget] = field(default_factory=list)
    eps_grid: list[float] = field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    batch_size: int = 100
    num_batches: int = 5
    campaign_split: str = "test"
    escalate_to_auc: float | None = None
    jobs: int = 1

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.workspace) / p


def load_project_config(path=None, overrides: dict | None = None) -> ProjectConfig:
    """Build a ProjectConfig from JSON plus CLI overrides (flags win)."""
    raw: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        if path and "workspace" not in raw:
            raw["workspace"] = str(Path(path).parent)

    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "representation_kind":
                raw.setdefault("representation", {})["kind"] = value
            elif key in ("alpha", "fgsm_eps"):
                raw.setdefault("defense", {})[key] = value
            else:
                raw[key] = value

    try:
        rep = RepresentationConfig(**raw.get("representation", {}))
        train = TrainConfig(**raw.get("train", {}))
        defense = AdvTrainConfig(**raw.get("defense", {}))
        budgets = [
            AttackBudget.from_dict(b) if "algorithm" in b else default_budget(**b)
            for b in raw.get("attacks", [])
        ]
        campaign = raw.get("campaign", {})
        return ProjectConfig(
            workspace=raw.get("workspace", "."),
            seed=int(raw.get("seed", 0)),
            dataset_name=raw.get("dataset_name", "toy"),
            manifest=raw.get("manifest", "clips.jsonl"),
            representation=rep,
            model=raw.get("model", {"arch": "plain_cnn_s", "num_classes": 4}),
            train=train,
            defense=defense,
            attacks=budgets,
            eps_grid=[float(e) for e in campaign.get("eps_grid", [0.5, 1.0, 1.5, 2.0, 2.5, 3.0])],
            batch_size=int(campaign.get("batch_size", 100)),
            num_batches=int(campaign.get("num_batches", 5)),
            campaign_split=campaign.get("split", "test"),
            escalate_to_auc=(
                float(campaign["escalate_to_auc"]) if campaign.get("escalate_to_auc") is not None else None
            ),
            jobs=int(raw.get("jobs", 1)),
        )
    except TypeError as exc:
        raise ConfigError(f"bad config structure: {exc}") from None
