"""Aggregation of per-variant simulation results into one risk report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from ..errors import ReportError
from ..graph.model import NodeRef
from ..graph.simulate import SimResult
from ..mapping import InstanceModel

# which steps count as "the asset is compromised", per asset type; unknown
# types fall back to the worst over all their steps
COMPROMISE_STEPS: dict[str, tuple[str, ...]] = {
    "Application": ("access", "fullAccess"),
    "Connection": ("access",),
    "Data": ("read", "write"),
    "Credentials": ("use", "read", "write"),
    "Identity": ("assume",),
    "User": ("phish",),
    "Vulnerability": (),
    "Exploit": (),
}


@dataclass(frozen=True)
class AssetInfo:
    type_name: str
    display_name: str
    provenance: tuple[str, ...]


@dataclass(frozen=True)
class PathStat:
    goal: NodeRef
    nodes: tuple[NodeRef, ...]
    frequency: float
    variants: tuple[str, ...]


@dataclass(frozen=True)
class VariantSummary:
    variant_id: str
    weight: float
    per_goal: dict[NodeRef, dict]
    products: tuple[str, ...] = ()


@dataclass(frozen=True)
class Report:
    horizon_days: float
    samples: int
    seed: int
    goals: tuple[NodeRef, ...]
    aggregated: dict[NodeRef, float]
    per_variant: dict[str, VariantSummary]
    per_node_rate: dict[NodeRef, float]
    pooled_percentiles: dict[NodeRef, dict[str, float | None]]
    per_bpmn_element: dict[str, float]
    top_paths: tuple[PathStat, ...]
    assets: dict[str, AssetInfo] = field(default_factory=dict)
    links: tuple[tuple[str, str, str], ...] = ()

    # --- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": "risk-report/1",
            "horizon_days": self.horizon_days,
            "samples": self.samples,
            "seed": self.seed,
            "goals": [list(g) for g in self.goals],
            "aggregated": {_k(g): r for g, r in sorted(self.aggregated.items())},
            "per_variant": {
                vid: {
                    "weight": v.weight,
                    "products": list(v.products),
                    "per_goal": {
                        _k(g): summary for g, summary in sorted(v.per_goal.items())
                    },
                }
                for vid, v in sorted(self.per_variant.items())
            },
            "per_node_rate": {_k(n): r for n, r in sorted(self.per_node_rate.items())},
            "pooled_percentiles": {
                _k(g): p for g, p in sorted(self.pooled_percentiles.items())
            },
            "per_bpmn_element": dict(sorted(self.per_bpmn_element.items())),
            "top_paths": [
                {
                    "goal": list(p.goal),
                    "nodes": [list(n) for n in p.nodes],
                    "frequency": p.frequency,
                    "variants": list(p.variants),
                }
                for p in self.top_paths
            ],
            "assets": {
                aid: {
                    "type": info.type_name,
                    "name": info.display_name,
                    "provenance": list(info.provenance),
                }
                for aid, info in sorted(self.assets.items())
            },
            "links": [list(l) for l in self.links],
        }

    def to_json(self) -> bytes:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True).encode()

    @staticmethod
    def from_dict(doc: dict) -> "Report":
        if doc.get("schema") != "risk-report/1":
            raise ReportError(f"unsupported report schema {doc.get('schema')!r}")
        return Report(
            horizon_days=doc["horizon_days"],
            samples=doc["samples"],
            seed=doc["seed"],
            goals=tuple(tuple(g) for g in doc["goals"]),
            aggregated={_unk(k): v for k, v in doc["aggregated"].items()},
            per_variant={
                vid: VariantSummary(
                    variant_id=vid,
                    weight=v["weight"],
                    products=tuple(v.get("products", ())),
                    per_goal={_unk(k): s for k, s in v["per_goal"].items()},
                )
                for vid, v in doc["per_variant"].items()
            },
            per_node_rate={_unk(k): v for k, v in doc["per_node_rate"].items()},
            pooled_percentiles={
                _unk(k): dict(v) for k, v in doc["pooled_percentiles"].items()
            },
            per_bpmn_element=dict(doc["per_bpmn_element"]),
            top_paths=tuple(
                PathStat(
                    goal=tuple(p["goal"]),
                    nodes=tuple(tuple(n) for n in p["nodes"]),
                    frequency=p["frequency"],
                    variants=tuple(p["variants"]),
                )
                for p in doc["top_paths"]
            ),
            assets={
                aid: AssetInfo(
                    type_name=a["type"],
                    display_name=a["name"],
                    provenance=tuple(a["provenance"]),
                )
                for aid, a in doc["assets"].items()
            },
            links=tuple(tuple(l) for l in doc["links"]),
        )

    @staticmethod
    def from_json(raw: bytes) -> "Report":
        return Report.from_dict(json.loads(raw.decode()))


def _k(ref: NodeRef) -> str:
    return f"{ref[0]}|{ref[1]}"


def _unk(key: str) -> NodeRef:
    asset, _, step = key.rpartition("|")
    return (asset, step)


def _weighted_percentile(
    values: list[float], weights: list[float], q: float
) -> float | None:
    if not values:
        return None
    order = sorted(range(len(values)), key=lambda i: values[i])
    total = sum(weights)
    cumulative = 0.0
    threshold = q / 100.0 * total
    for i in order:
        cumulative += weights[i]
        if cumulative >= threshold:
            return values[i]
    return values[order[-1]]


def element_risks(
    per_node_rate: dict[NodeRef, float], assets: dict[str, AssetInfo]
) -> dict[str, float]:
    """Project compromise probabilities back onto process elements.

    An element's risk is the highest compromise probability among the assets
    it produced; an asset's compromise probability is the worst of its
    type's compromise steps.
    """
    asset_risk: dict[str, float] = {}
    steps_of_asset: dict[str, list[str]] = {}
    for (asset_id, step), _rate in per_node_rate.items():
        steps_of_asset.setdefault(asset_id, []).append(step)
    for asset_id, info in assets.items():
        wanted = COMPROMISE_STEPS.get(info.type_name)
        if wanted is None:
            wanted = tuple(steps_of_asset.get(asset_id, ()))
        rates = [
            per_node_rate.get((asset_id, step), 0.0)
            for step in wanted
            if (asset_id, step) in per_node_rate
        ]
        asset_risk[asset_id] = max(rates, default=0.0)

    risks: dict[str, float] = {}
    for asset_id, info in assets.items():
        for element_id in info.provenance:
            risks[element_id] = max(risks.get(element_id, 0.0), asset_risk[asset_id])
    return risks


def aggregate(
    results: dict[str, SimResult],
    weights: dict[str, float],
    *,
    instance_model: InstanceModel | None = None,
    variant_products: dict[str, tuple[str, ...]] | None = None,
    path_fractions: dict[str, dict[NodeRef, dict[tuple[NodeRef, ...], float]]] | None = None,
) -> Report:
    """Weight per-variant results into a single report.

    ``weights`` must cover every variant id in ``results`` and sum to one.
    ``path_fractions`` carries, per variant and goal, the containment
    fraction of every candidate critical path.
    """
    if not results:
        raise ReportError("no simulation results to aggregate")
    missing = sorted(set(results) - set(weights))
    if missing:
        raise ReportError(f"missing weights for variants: {missing}")
    used = {vid: weights[vid] for vid in results}
    total = sum(used.values())
    if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-6):
        raise ReportError(f"variant weights sum to {total}, expected 1")

    first = next(iter(results.values()))
    goals = tuple(sorted(first.per_goal))
    for vid, res in results.items():
        if tuple(sorted(res.per_goal)) != goals:
            raise ReportError(f"variant {vid!r} simulated different goals")

    def _clamp(p: float) -> float:
        return min(1.0, max(0.0, p))

    aggregated: dict[NodeRef, float] = {
        goal: _clamp(
            sum(used[vid] * res.per_goal[goal].success_rate for vid, res in results.items())
        )
        for goal in goals
    }

    node_refs: set[NodeRef] = set()
    for res in results.values():
        node_refs.update(res.per_node_rate)
    per_node_rate = {
        ref: _clamp(
            sum(used[vid] * res.per_node_rate.get(ref, 0.0) for vid, res in results.items())
        )
        for ref in sorted(node_refs)
    }

    pooled: dict[NodeRef, dict[str, float | None]] = {}
    for goal in goals:
        values: list[float] = []
        sample_weights: list[float] = []
        for vid, res in results.items():
            arrivals = res.per_goal[goal].arrivals
            if not arrivals:
                continue
            w = used[vid] / len(arrivals)
            for a in arrivals:
                if math.isfinite(a):
                    values.append(a)
                    sample_weights.append(w)
        pooled[goal] = {
            "p5": _weighted_percentile(values, sample_weights, 5),
            "p50": _weighted_percentile(values, sample_weights, 50),
            "p95": _weighted_percentile(values, sample_weights, 95),
        }

    per_variant: dict[str, VariantSummary] = {}
    for vid, res in sorted(results.items()):
        per_goal = {}
        for goal in goals:
            g = res.per_goal[goal]
            per_goal[goal] = {
                "success_rate": g.success_rate,
                "p5": _enc(g.p5),
                "p50": _enc(g.p50),
                "p95": _enc(g.p95),
                "critical_path": [list(r) for r in g.critical_path],
            }
        per_variant[vid] = VariantSummary(
            variant_id=vid,
            weight=used[vid],
            per_goal=per_goal,
            products=(variant_products or {}).get(vid, ()),
        )

    # pool critical paths: weighted containment frequency across variants
    path_sets: dict[NodeRef, dict[tuple[NodeRef, ...], list[str]]] = {g: {} for g in goals}
    for vid, res in sorted(results.items()):
        for goal in goals:
            path = res.per_goal[goal].critical_path
            if path:
                path_sets[goal].setdefault(path, []).append(vid)
    top_paths: list[PathStat] = []
    for goal in goals:
        for path, vids in sorted(path_sets[goal].items()):
            frequency = 0.0
            if path_fractions is not None:
                for vid, res in results.items():
                    frequency += used[vid] * (
                        path_fractions.get(vid, {}).get(goal, {}).get(path, 0.0)
                    )
            else:
                # fall back to the weight of variants whose median path this is
                frequency = sum(used[vid] for vid in vids)
            top_paths.append(
                PathStat(goal=goal, nodes=path, frequency=frequency, variants=tuple(vids))
            )
    top_paths.sort(key=lambda p: (p.goal, -p.frequency, p.nodes))

    assets: dict[str, AssetInfo] = {}
    links: tuple[tuple[str, str, str], ...] = ()
    if instance_model is not None:
        assets = {
            a.id: AssetInfo(a.type_name, a.display_name, a.provenance)
            for a in instance_model.assets
        }
        links = tuple(
            (l.association, l.left, l.right) for l in instance_model.links
        )

    return Report(
        horizon_days=first.horizon_days,
        samples=first.samples,
        seed=first.seed,
        goals=goals,
        aggregated=aggregated,
        per_variant=per_variant,
        per_node_rate=per_node_rate,
        pooled_percentiles=pooled,
        per_bpmn_element=element_risks(per_node_rate, assets),
        top_paths=tuple(top_paths),
        assets=assets,
        links=links,
    )


def _enc(value: float | None):
    if value is None:
        return None
    if math.isinf(value):
        return "inf"
    return value
