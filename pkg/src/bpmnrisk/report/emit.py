"""Report emission: JSON, RFC-4180 CSV, and DOT."""

from __future__ import annotations

import csv
import io
from enum import Enum

from ..errors import ReportError
from .build import Report


class ReportFormat(Enum):
    JSON = "json"
    CSV = "csv"
    DOT = "dot"


def emit(report: Report, fmt: ReportFormat) -> bytes:
    if fmt is ReportFormat.JSON:
        return report.to_json()
    if fmt is ReportFormat.CSV:
        return _emit_csv(report)
    if fmt is ReportFormat.DOT:
        return _emit_dot(report).encode()
    raise ReportError(f"unknown format {fmt!r}")


def _emit_csv(report: Report) -> bytes:
    """One row per (process element, goal)."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf)
    writer.writerow(
        ["element_id", "goal_asset", "goal_step", "goal_success_rate", "element_risk"]
    )
    for element_id, risk in sorted(report.per_bpmn_element.items()):
        for goal in report.goals:
            writer.writerow(
                [
                    element_id,
                    goal[0],
                    goal[1],
                    f"{report.aggregated[goal]:.6f}",
                    f"{risk:.6f}",
                ]
            )
    return buf.getvalue().encode()


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _emit_dot(report: Report) -> str:
    """Top critical path drawn over the instance-model topology."""
    lines = [
        "digraph attack_path {",
        "  rankdir=LR;",
        '  node [fontsize=10, fontname="Helvetica", shape=box, style=rounded];',
        '  edge [fontsize=9, fontname="Helvetica"];',
    ]
    goal_assets = {goal[0] for goal in report.goals}
    for asset_id, info in sorted(report.assets.items()):
        label = info.display_name
        attrs = []
        if info.type_name == "Vulnerability":
            attrs.append("shape=hexagon")
        elif info.type_name == "Exploit":
            attrs.append("shape=cds")
        if asset_id in goal_assets:
            label = "★ " + label
            attrs.append("color=red")
            attrs.append("penwidth=2")
        attrs.append(f'label="{_dot_escape(label)}"')
        lines.append(f'  "{_dot_escape(asset_id)}" [{", ".join(attrs)}];')
    for association, left, right in sorted(set(report.links)):
        lines.append(
            f'  "{_dot_escape(left)}" -> "{_dot_escape(right)}" '
            f'[dir=none, color=gray60, label="{_dot_escape(association)}"];'
        )
    # overlay: highest-frequency path per goal, collapsed to asset hops
    seen: set = set()
    for goal in report.goals:
        best = None
        for path in report.top_paths:
            if path.goal == goal and path.nodes:
                best = path
                break
        if best is None:
            continue
        hops: list[tuple[str, str]] = []  # (asset, entering step)
        for asset_id, step in best.nodes:
            if not hops or hops[-1][0] != asset_id:
                hops.append((asset_id, step))
        for (src_asset, _), (dst_asset, dst_step) in zip(hops, hops[1:]):
            key = (src_asset, dst_asset, dst_step)
            if key in seen:
                continue
            seen.add(key)
            lines.append(
                f'  "{_dot_escape(src_asset)}" -> "{_dot_escape(dst_asset)}" '
                f'[color=red, penwidth=2, label="{_dot_escape(dst_step)}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
