"""Static matplotlib figures rendered next to the delimited outputs.

Three views: element risk ranking, arrival-time CDFs per goal with the
horizon marked, and per-variant success rates.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from ..graph.simulate import SimResult  # noqa: E402
from .build import Report  # noqa: E402


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in text)


def render_figures(
    report: Report,
    out_dir,
    results: dict[str, SimResult] | None = None,
    top_n: int = 20,
) -> list[Path]:
    """Write PNG figures into ``out_dir``; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []

    created.append(_risk_chart(report, out_dir / "element_risk.png", top_n))
    if results:
        for goal in report.goals:
            name = f"arrival_cdf_{_slug(goal[0])}_{_slug(goal[1])}.png"
            created.append(_arrival_cdf(report, results, goal, out_dir / name))
    created.append(_variant_chart(report, out_dir / "variant_success.png"))
    return created


def _risk_chart(report: Report, path: Path, top_n: int) -> Path:
    ranked = sorted(report.per_bpmn_element.items(), key=lambda kv: (-kv[1], kv[0]))
    ranked = [kv for kv in ranked if kv[1] > 0][:top_n] or ranked[:top_n]
    labels = [eid for eid, _ in ranked][::-1]
    values = [risk for _, risk in ranked][::-1]
    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.35 * len(labels) + 1)))
    ax.barh(labels, values, color="#c0392b")
    ax.set_xlabel(f"compromise probability within {report.horizon_days:g} days")
    ax.set_title("Process elements by risk")
    ax.set_xlim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _arrival_cdf(
    report: Report, results: dict[str, SimResult], goal, path: Path
) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for vid in sorted(results):
        res = results[vid]
        goal_result = res.per_goal.get(goal)
        if goal_result is None:
            continue
        finite = sorted(a for a in goal_result.arrivals if math.isfinite(a))
        if not finite:
            continue
        n = res.samples
        ys = [(i + 1) / n for i in range(len(finite))]
        weight = report.per_variant[vid].weight
        ax.step(finite, ys, where="post", label=f"{vid} (w={weight:.2f})", alpha=0.8)
    ax.axvline(report.horizon_days, color="black", linestyle="--", linewidth=1)
    ax.text(
        report.horizon_days,
        0.02,
        " horizon",
        rotation=90,
        va="bottom",
        fontsize=8,
    )
    ax.set_xlabel("days until goal compromised")
    ax.set_ylabel("fraction of simulations")
    ax.set_ylim(0, 1)
    ax.set_title(f"Attack arrival CDF: {goal[0]}.{goal[1]}")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _variant_chart(report: Report, path: Path) -> Path:
    variants = sorted(report.per_variant)
    fig, ax = plt.subplots(figsize=(8, 4))
    width = 0.8 / max(1, len(report.goals))
    for gi, goal in enumerate(report.goals):
        xs = [i + gi * width for i in range(len(variants))]
        ys = [report.per_variant[v].per_goal[goal]["success_rate"] for v in variants]
        ax.bar(xs, ys, width=width, label=f"{goal[0]}.{goal[1]}")
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(variants))])
    ax.set_xticklabels(
        [v.split("+", 1)[0] for v in variants], rotation=0, fontsize=8
    )
    ax.set_ylabel(f"success rate at {report.horizon_days:g} days")
    ax.set_title("Goal success rate per configuration variant")
    ax.set_ylim(0, 1)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
