"""Comparison-report rendering: aligned text, delimited table, and figures."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .evaluation import ExperimentReport

HEADER_NOTES = (
    "ASR@k = mean precision over each returned list (judge-style relevance per item).",
    "MAP@k AP normalized by relevant items retrieved within the top k.",
    "ASR/MAP cover only cases with recommendations; FCR covers all cases.",
)


def render_table(reports: Sequence[ExperimentReport]) -> str:
    """Aligned-text comparison table with metric-definition header notes."""
    mode = reports[0].config.get("mode", "?") if reports else "?"
    k = reports[0].config.get("k", "?") if reports else "?"
    lines = [f"Relevance mode: {mode} | k = {k}"]
    lines += [f"# {note}" for note in HEADER_NOTES]
    headers = ["system", "fcr_full", "fcr_sample", f"asr@{k}", f"map@{k}", "cases", "sample"]
    rows = [
        [
            r.system,
            f"{r.fcr_full:.4f}",
            f"{r.fcr_sample:.4f}",
            f"{r.asr_at_k:.4f}",
            f"{r.map_at_k:.4f}",
            str(r.case_count),
            str(r.sample_count),
        ]
        for r in reports
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines.append(fmt.format(*headers))
    lines.append(fmt.format(*("-" * w for w in widths)))
    lines += [fmt.format(*row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path, reports: Sequence[ExperimentReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["system", "fcr_full", "fcr_sample", "asr_at_k", "map_at_k", "case_count", "sample_count", "k", "mode"]
        )
        for r in reports:
            writer.writerow(
                [
                    r.system,
                    f"{r.fcr_full:.6f}",
                    f"{r.fcr_sample:.6f}",
                    f"{r.asr_at_k:.6f}",
                    f"{r.map_at_k:.6f}",
                    r.case_count,
                    r.sample_count,
                    r.config.get("k", ""),
                    r.config.get("mode", ""),
                ]
            )


def plot_quality(path, reports: Sequence[ExperimentReport]) -> None:
    """Grouped bars of ASR@k and MAP@k per system."""
    systems = [r.system for r in reports]
    x = range(len(systems))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6, 1.4 * len(systems)), 4))
    ax.bar([i - width / 2 for i in x], [r.asr_at_k for r in reports], width, label="ASR@k")
    ax.bar([i + width / 2 for i in x], [r.map_at_k for r in reports], width, label="MAP@k")
    ax.set_xticks(list(x))
    ax.set_xticklabels(systems, rotation=20, ha="right")
    ax.set_ylim(0, 1)
    ax.set_ylabel("score")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_failures(path, reports: Sequence[ExperimentReport]) -> None:
    """Failed-case ratio per system, full set vs sample."""
    systems = [r.system for r in reports]
    x = range(len(systems))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6, 1.4 * len(systems)), 4))
    ax.bar([i - width / 2 for i in x], [r.fcr_full for r in reports], width, label="FCR (full)")
    ax.bar([i + width / 2 for i in x], [r.fcr_sample for r in reports], width, label="FCR (sample)")
    ax.set_xticks(list(x))
    ax.set_xticklabels(systems, rotation=20, ha="right")
    ax.set_ylim(0, 1)
    ax.set_ylabel("failed-case ratio")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report_files(outdir, reports: Sequence[ExperimentReport]) -> dict[str, Path]:
    """Write the text table, CSV, and figures; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "table": outdir / "report.txt",
        "csv": outdir / "report.csv",
        "quality_figure": outdir / "report_quality.png",
        "failures_figure": outdir / "report_fcr.png",
    }
    paths["table"].write_text(render_table(reports), encoding="utf-8")
    write_csv(paths["csv"], reports)
    plot_quality(paths["quality_figure"], reports)
    plot_failures(paths["failures_figure"], reports)
    return paths
