"""Probabilistic AND/OR attack graph structure.

Nodes are (asset instance, attack step) pairs plus defenses; attack edges
point from a compromised step to the steps it opens up, and block edges
point from a defense to the steps it disables when switched on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

from ..errors import GraphError
from ..mal.ast import Distribution

NodeRef = tuple[str, str]  # (asset instance id, step name)


class NodeKind(Enum):
    OR = "OR"
    AND = "AND"
    DEFENSE = "Defense"
    ENTRY = "Entry"


class EdgeKind(Enum):
    ATTACK = "attack"
    BLOCKS = "blocks"


@dataclass(frozen=True)
class StepNode:
    asset_id: str
    step: str
    kind: NodeKind
    ttc: Distribution = field(default_factory=Distribution.instant)
    defense_enabled: bool | None = None  # only meaningful for DEFENSE
    display: str = ""

    @property
    def ref(self) -> NodeRef:
        return (self.asset_id, self.step)

    @property
    def label(self) -> str:
        return self.display or f"{self.asset_id}.{self.step}"


@dataclass(frozen=True)
class Edge:
    source: NodeRef
    target: NodeRef
    kind: EdgeKind = EdgeKind.ATTACK


@dataclass(frozen=True)
class AttackGraph:
    nodes: tuple[StepNode, ...]
    edges: tuple[Edge, ...]
    entry_nodes: tuple[NodeRef, ...] = ()
    goal_nodes: tuple[NodeRef, ...] = ()

    def __post_init__(self) -> None:
        refs = [n.ref for n in self.nodes]
        ref_set = set(refs)
        if len(refs) != len(ref_set):
            raise GraphError("duplicate node references in attack graph")
        for edge in self.edges:
            if edge.source not in ref_set or edge.target not in ref_set:
                raise GraphError(f"edge {edge} references a missing node")
        for ref in self.entry_nodes + self.goal_nodes:
            if ref not in ref_set:
                raise GraphError(f"designated node {ref} does not exist")

    # --- lookups --------------------------------------------------------

    def node(self, ref: NodeRef) -> StepNode:
        for n in self.nodes:
            if n.ref == ref:
                return n
        raise GraphError(f"no node {ref}")

    def node_map(self) -> dict[NodeRef, StepNode]:
        return {n.ref: n for n in self.nodes}

    def attack_parents(self) -> dict[NodeRef, list[NodeRef]]:
        parents: dict[NodeRef, list[NodeRef]] = {n.ref: [] for n in self.nodes}
        for e in self.edges:
            if e.kind is EdgeKind.ATTACK:
                parents[e.target].append(e.source)
        for lst in parents.values():
            lst.sort()
        return parents

    def blocked_nodes(self) -> set[NodeRef]:
        """Steps disabled by an enabled defense."""
        enabled = {n.ref for n in self.nodes if n.kind is NodeKind.DEFENSE and n.defense_enabled}
        return {
            e.target
            for e in self.edges
            if e.kind is EdgeKind.BLOCKS and e.source in enabled
        }

    # --- derived graphs ---------------------------------------------------

    def with_entries(self, entries: tuple[NodeRef, ...]) -> "AttackGraph":
        return replace(self, entry_nodes=tuple(entries))

    def with_goals(self, goals: tuple[NodeRef, ...]) -> "AttackGraph":
        return replace(self, goal_nodes=tuple(goals))

    def toggle_defense(self, ref: NodeRef, enabled: bool) -> "AttackGraph":
        """New graph with one defense switched; the original is unchanged."""
        node = self.node(ref)
        if node.kind is not NodeKind.DEFENSE:
            raise GraphError(f"{ref} is not a defense node")
        nodes = tuple(
            replace(n, defense_enabled=enabled) if n.ref == ref else n for n in self.nodes
        )
        return replace(self, nodes=nodes)

    # --- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": "attack-graph/1",
            "nodes": [
                {
                    "asset": n.asset_id,
                    "step": n.step,
                    "kind": n.kind.value,
                    "ttc": n.ttc.to_dict(),
                    "defense_enabled": n.defense_enabled,
                    "display": n.display,
                }
                for n in self.nodes
            ],
            "edges": [
                {
                    "source": list(e.source),
                    "target": list(e.target),
                    "kind": e.kind.value,
                }
                for e in self.edges
            ],
            "entries": [list(r) for r in self.entry_nodes],
            "goals": [list(r) for r in self.goal_nodes],
        }

    def to_json(self) -> bytes:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True).encode()

    @staticmethod
    def from_dict(d: dict) -> "AttackGraph":
        nodes = tuple(
            StepNode(
                asset_id=n["asset"],
                step=n["step"],
                kind=NodeKind(n["kind"]),
                ttc=Distribution.from_dict(n["ttc"]),
                defense_enabled=n.get("defense_enabled"),
                display=n.get("display", ""),
            )
            for n in d["nodes"]
        )
        edges = tuple(
            Edge(tuple(e["source"]), tuple(e["target"]), EdgeKind(e["kind"]))
            for e in d["edges"]
        )
        return AttackGraph(
            nodes=nodes,
            edges=edges,
            entry_nodes=tuple(tuple(r) for r in d.get("entries", [])),
            goal_nodes=tuple(tuple(r) for r in d.get("goals", [])),
        )


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def graph_to_dot(graph: AttackGraph) -> str:
    """Render the graph for standard DOT tooling.

    OR steps are ellipses, AND steps double ellipses, defenses boxes,
    entries diamonds; goal nodes are starred.
    """
    goal_set = set(graph.goal_nodes)
    entry_set = set(graph.entry_nodes)
    lines = [
        "digraph attack_graph {",
        "  rankdir=LR;",
        '  node [fontsize=10, fontname="Helvetica"];',
    ]
    for n in graph.nodes:
        name = _dot_escape(f"{n.asset_id}.{n.step}")
        label = _dot_escape(n.label)
        attrs: list[str] = []
        if n.kind is NodeKind.AND:
            attrs.append("shape=ellipse")
            attrs.append("peripheries=2")
        elif n.kind is NodeKind.DEFENSE:
            attrs.append("shape=box")
            if n.defense_enabled:
                attrs.append("style=filled")
                attrs.append("fillcolor=lightblue")
        elif n.kind is NodeKind.ENTRY:
            attrs.append("shape=diamond")
        else:
            attrs.append("shape=ellipse")
        if n.ref in goal_set:
            label = "★ " + label
            attrs.append("penwidth=2")
            attrs.append("color=red")
        if n.ref in entry_set:
            attrs.append("style=bold")
        attrs.append(f'label="{label}"')
        lines.append(f'  "{name}" [{", ".join(attrs)}];')
    for e in sorted(graph.edges, key=lambda e: (e.kind.value, e.source, e.target)):
        src = _dot_escape(f"{e.source[0]}.{e.source[1]}")
        tgt = _dot_escape(f"{e.target[0]}.{e.target[1]}")
        if e.kind is EdgeKind.BLOCKS:
            lines.append(f'  "{src}" -> "{tgt}" [style=dashed, arrowhead=tee];')
        else:
            lines.append(f'  "{src}" -> "{tgt}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def finite(value: float) -> bool:
    return math.isfinite(value)
