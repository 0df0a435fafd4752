"""Campaign orchestration and robustness metrics (fooling AUC, eps ratio)."""

from .campaign import CampaignSpec, attack_key, run_campaign, run_campaign_samples
from .metrics import (
    ESCALATION_CAPS,
    FoolingCurve,
    attack_samples,
    budget_search,
    desk_eps_grid,
    epsilon_ratio,
    epsilon_ratio_max,
    escalating_attack,
    fooling_curve,
)
from .report import (
    COLUMNS,
    MISSING,
    ReportRow,
    RobustnessReport,
    assemble_report,
    parse_report_csv,
    render_report,
    save_report,
)
from .store import OutcomeStore, load_records

__all__ = [
    "COLUMNS",
    "CampaignSpec",
    "ESCALATION_CAPS",
    "FoolingCurve",
    "MISSING",
    "OutcomeStore",
    "ReportRow",
    "RobustnessReport",
    "assemble_report",
    "attack_key",
    "attack_samples",
    "budget_search",
    "desk_eps_grid",
    "epsilon_ratio",
    "epsilon_ratio_max",
    "escalating_attack",
    "fooling_curve",
    "load_records",
    "parse_report_csv",
    "render_report",
    "run_campaign",
    "run_campaign_samples",
    "save_report",
]
