"""Compile an instance model against a resolved language into an attack graph.

One node per (asset instance, attack step); edges follow each step's target
paths across the instance's association links.  Defense declarations become
defense nodes wired to the steps they disable.  Time-to-compromise overrides
from enrichment replace the language default on the applications' exploit
step.
"""

from __future__ import annotations

import logging

from ..mal.ast import StepKind
from ..mal.resolver import MalLanguage
from ..mapping import InstanceModel
from ..vuln.enrich import EXPLOIT_STEP, EnrichedModel
from .model import AttackGraph, Edge, EdgeKind, NodeKind, NodeRef, StepNode

log = logging.getLogger(__name__)


def _link_index(model: InstanceModel):
    """(association name, asset id) -> linked partner ids."""
    index: dict[tuple[str, str], list[str]] = {}
    for link in model.links:
        index.setdefault((link.association, link.left), []).append(link.right)
        index.setdefault((link.association, link.right), []).append(link.left)
    return index


def compile_graph(model: EnrichedModel | InstanceModel, lang: MalLanguage) -> AttackGraph:
    """Build the attack graph for an (optionally enriched) instance model."""
    if isinstance(model, EnrichedModel):
        overrides = {
            asset_id: e.ttc_days for asset_id, e in model.per_asset.items()
        }
        instance_model = model.model
    else:
        overrides = {}
        instance_model = model

    links = _link_index(instance_model)
    types = {a.id: a.type_name for a in instance_model.assets}
    names = {a.id: a.display_name for a in instance_model.assets}

    def neighbors(asset_id: str, role: str) -> list[str]:
        """Instances reachable from one instance over one role."""
        end = lang.roles[types[asset_id]].get(role)
        if end is None:
            return []
        assoc = end.association
        partner_type = end.target_asset
        out = [
            partner
            for partner in links.get((assoc.name, asset_id), [])
            if lang.is_subtype(types[partner], partner_type)
        ]
        return sorted(set(out))

    def traverse(asset_id: str, roles: tuple[str, ...]) -> list[str]:
        current = [asset_id]
        for role in roles:
            nxt: set[str] = set()
            for a in current:
                nxt.update(neighbors(a, role))
            current = sorted(nxt)
            if not current:
                return []
        return current

    nodes: list[StepNode] = []
    edges: set[Edge] = set()
    dropped = 0

    for asset in instance_model.assets:
        asset_type = lang.assets[asset.type_name]
        for step in asset_type.steps.values():
            ttc = step.ttc
            if (
                step.name == EXPLOIT_STEP
                and asset.id in overrides
            ):
                ttc = overrides[asset.id]
            nodes.append(
                StepNode(
                    asset_id=asset.id,
                    step=step.name,
                    kind=NodeKind.AND if step.kind is StepKind.AND else NodeKind.OR,
                    ttc=ttc,
                    display=f"{names[asset.id]}.{step.name}",
                )
            )
        for defense in asset_type.defenses.values():
            nodes.append(
                StepNode(
                    asset_id=asset.id,
                    step=defense.name,
                    kind=NodeKind.DEFENSE,
                    defense_enabled=asset.defenses.get(defense.name, False),
                    display=f"{names[asset.id]}.{defense.name}",
                )
            )

    node_refs = {n.ref for n in nodes}

    for asset in instance_model.assets:
        asset_type = lang.assets[asset.type_name]
        for step in asset_type.steps.values():
            source: NodeRef = (asset.id, step.name)
            for target in step.targets:
                terminals = traverse(asset.id, target.roles)
                if not terminals:
                    if target.roles:
                        dropped += 1
                    continue
                for terminal in terminals:
                    ref: NodeRef = (terminal, target.step)
                    if ref in node_refs:
                        edges.add(Edge(source, ref, EdgeKind.ATTACK))
        for defense in asset_type.defenses.values():
            source = (asset.id, defense.name)
            for target in defense.targets:
                terminals = traverse(asset.id, target.roles)
                for terminal in terminals:
                    ref = (terminal, target.step)
                    if ref in node_refs:
                        edges.add(Edge(source, ref, EdgeKind.BLOCKS))

    if dropped:
        log.warning("dropped %d step targets with no linked counterpart instance", dropped)

    return AttackGraph(
        nodes=tuple(sorted(nodes, key=lambda n: n.ref)),
        edges=tuple(sorted(edges, key=lambda e: (e.source, e.target, e.kind.value))),
    )
