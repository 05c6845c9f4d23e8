"""Deterministic arrival-time computation by label-setting.

Generalized shortest path over the AND/OR graph: an OR step is reachable
once its earliest parent is, an AND step only after its latest parent.
A node's arrival is its parents' aggregate plus its own local time.  Entry
nodes sit at zero; steps designated as attacker entries start at their own
local time; nodes disabled by an enabled defense never arrive.
"""

from __future__ import annotations

import heapq
import math

from ..errors import GraphError
from ..mal.ast import DistKind
from .model import AttackGraph, EdgeKind, NodeKind, NodeRef


def exact_arrival(
    graph: AttackGraph, ttc: dict[NodeRef, float]
) -> dict[NodeRef, float]:
    """Arrival time per node given one deterministic local time per node.

    AND nodes finalize only after every parent finalizes; unreached nodes
    get ``inf``.  Local times must be nonnegative.
    """
    node_map = graph.node_map()
    for ref, value in ttc.items():
        if value < 0:
            raise GraphError(f"negative local time for {ref}")

    parents = graph.attack_parents()
    children: dict[NodeRef, list[NodeRef]] = {n.ref: [] for n in graph.nodes}
    for e in graph.edges:
        if e.kind is EdgeKind.ATTACK:
            children[e.source].append(e.target)
    blocked = graph.blocked_nodes()

    def local(ref: NodeRef) -> float:
        node = node_map[ref]
        if node.kind is NodeKind.ENTRY:
            return 0.0
        if ref in ttc:
            return ttc[ref]
        # fall back to the node's own distribution when it is deterministic
        if node.ttc.kind is DistKind.INSTANT:
            return 0.0
        if node.ttc.kind is DistKind.CONSTANT:
            return node.ttc.value
        raise GraphError(f"no deterministic local time supplied for node {ref}")

    arrival: dict[NodeRef, float] = {n.ref: math.inf for n in graph.nodes}
    finalized: set[NodeRef] = set()
    and_seen: dict[NodeRef, int] = {}
    and_latest: dict[NodeRef, float] = {}
    heap: list[tuple[float, NodeRef]] = []

    for node in graph.nodes:
        if node.kind is NodeKind.DEFENSE:
            continue
        if node.ref in blocked:
            continue
        if node.kind is NodeKind.ENTRY:
            heapq.heappush(heap, (0.0, node.ref))
        elif node.ref in graph.entry_nodes:
            heapq.heappush(heap, (local(node.ref), node.ref))

    while heap:
        dist, ref = heapq.heappop(heap)
        if ref in finalized:
            continue
        finalized.add(ref)
        arrival[ref] = dist
        for child in children[ref]:
            if child in blocked or child in finalized:
                continue
            node = node_map[child]
            if node.kind is NodeKind.DEFENSE:
                continue
            if node.kind is NodeKind.AND:
                and_seen[child] = and_seen.get(child, 0) + 1
                and_latest[child] = max(and_latest.get(child, 0.0), dist)
                if and_seen[child] == len(parents[child]):
                    candidate = and_latest[child] + local(child)
                    if math.isfinite(candidate):
                        heapq.heappush(heap, (candidate, child))
            else:
                candidate = dist + local(child)
                if math.isfinite(candidate):
                    heapq.heappush(heap, (candidate, child))

    return arrival
