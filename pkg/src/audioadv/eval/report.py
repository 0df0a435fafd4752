"""Robustness report assembly and CSV/Markdown rendering."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from typing import Optional, Sequence

from ..errors import ConfigError, DataError
from .metrics import epsilon_ratio, epsilon_ratio_max, fooling_curve

MISSING = "—"

COLUMNS = (
    "dataset",
    "representation",
    "model",
    "attack",
    "clean_accuracy",
    "accuracy_drop",
    "auc_pre",
    "auc_post",
    "mean_l2_pre",
    "mean_l2_post",
    "max_l2_pre",
    "max_l2_post",
    "eps_r",
    "eps_r_max",
)


@dataclass
class ReportRow:
    dataset: str
    representation: str
    model: str
    attack: str
    clean_accuracy: Optional[float] = None
    accuracy_drop: Optional[float] = None
    auc_pre: Optional[float] = None
    auc_post: Optional[float] = None
    mean_l2_pre: Optional[float] = None
    mean_l2_post: Optional[float] = None
    max_l2_pre: Optional[float] = None
    max_l2_post: Optional[float] = None
    eps_r: Optional[float] = None
    eps_r_max: Optional[float] = None


@dataclass
class RobustnessReport:
    rows: list[ReportRow]


def _successful_l2(records) -> list[float]:
    return [float(r["norms"]["l2"]) for r in records if r["success"]]


def assemble_report(
    dataset_name: str,
    representation: str,
    model_name: str,
    pre_records: Sequence[dict],
    post_records: Sequence[dict],
    eps_grid: Sequence[float],
    clean_accuracy: Optional[float] = None,
    defended_accuracy: Optional[float] = None,
) -> RobustnessReport:
    """One row per attack key present in the pre-defense records."""
    rows = []
    pre_by_attack: dict[str, list[dict]] = {}
    for r in pre_records:
        pre_by_attack.setdefault(r["attack"], []).append(r)
    post_by_attack: dict[str, list[dict]] = {}
    for r in post_records:
        post_by_attack.setdefault(r["attack"], []).append(r)

    for key in sorted(pre_by_attack):
        pre = pre_by_attack[key]
        post = post_by_attack.get(key, [])
        row = ReportRow(
            dataset=dataset_name,
            representation=representation,
            model=model_name,
            attack=pre[0]["algorithm"],
            clean_accuracy=clean_accuracy,
            accuracy_drop=(
                clean_accuracy - defended_accuracy
                if clean_accuracy is not None and defended_accuracy is not None
                else None
            ),
        )
        row.auc_pre = fooling_curve(pre, eps_grid).auc
        if post:
            row.auc_post = fooling_curve(post, eps_grid).auc
        l2_pre = _successful_l2(pre)
        l2_post = _successful_l2(post)
        if l2_pre:
            row.mean_l2_pre = sum(l2_pre) / len(l2_pre)
            row.max_l2_pre = max(l2_pre)
        if l2_post:
            row.mean_l2_post = sum(l2_post) / len(l2_post)
            row.max_l2_post = max(l2_post)
        if l2_pre and l2_post:
            try:
                row.eps_r = epsilon_ratio(post, pre)
                row.eps_r_max = epsilon_ratio_max(post, pre)
            except DataError:
                pass
        rows.append(row)
    return RobustnessReport(rows=rows)


def _cell(value) -> str:
    if value is None:
        return MISSING
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_report(report: RobustnessReport, fmt: str = "csv") -> str:
    """Deterministic column order; CSV is RFC-4180 quoted."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in report.rows:
            writer.writerow([_cell(getattr(row, col)) for col in COLUMNS])
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
        for row in report.rows:
            lines.append("| " + " | ".join(_cell(getattr(row, col)) for col in COLUMNS) + " |")
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {fmt!r}")


def save_report(report: RobustnessReport, path, fmt: str = "csv") -> None:
    text = render_report(report, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def parse_report_csv(text: str) -> list[dict]:
    """Inverse of the CSV rendering, for round-trip checks."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    out = []
    for row in reader:
        rec = {}
        for col, cell in zip(header, row):
            if cell == MISSING:
                rec[col] = None
            else:
                try:
                    rec[col] = float(cell)
                except ValueError:
                    rec[col] = cell
        out.append(rec)
    return out
