"""Shared graph-test machinery.

Contains an independent brute-force fixed-point oracle (plain dicts, no
package internals), random DAG builders, and a random instance-model
generator over the bundled vocabulary.
"""

from __future__ import annotations

import math
import random

from bpmnrisk.graph import AttackGraph, Edge, EdgeKind, NodeKind, StepNode
from bpmnrisk.mal.ast import Distribution
from bpmnrisk.mapping import AssetInstance, InstanceModel, Link
from bpmnrisk.vuln.enrich import AssetEnrichment, EnrichedModel
from bpmnrisk.vuln.ttc import SkillLevel, TtcParams, expected_compromise_days


def fixed_point_arrival(nodes, edges, entries, ttc, blocked=frozenset()):
    """Brute-force oracle: iterate the arrival equations to convergence.

    ``nodes`` maps ref -> "OR" | "AND" | "ENTRY"; ``edges`` is a list of
    (source, target); ``entries`` are designated attacker footholds.
    """
    parents = {ref: [] for ref in nodes}
    for source, target in edges:
        parents[target].append(source)
    arrival = {ref: math.inf for ref in nodes}
    for ref, kind in nodes.items():
        if ref in blocked:
            continue
        if kind == "ENTRY":
            arrival[ref] = 0.0
        elif ref in entries:
            arrival[ref] = ttc.get(ref, 0.0)
    for _ in range(len(nodes) + 1):
        changed = False
        for ref, kind in nodes.items():
            if kind == "ENTRY" or ref in entries or ref in blocked:
                continue
            incoming = parents[ref]
            if not incoming:
                continue
            values = [arrival[p] for p in incoming]
            agg = max(values) if kind == "AND" else min(values)
            candidate = ttc.get(ref, 0.0) + agg
            if candidate < arrival[ref]:
                arrival[ref] = candidate
                changed = True
        if not changed:
            break
    return arrival


def random_dag(rng: random.Random, max_nodes: int = 12):
    """A random AND/OR DAG with constant local times.

    Returns (AttackGraph, oracle_nodes, oracle_edges, ttc_map).
    """
    n = rng.randint(2, max_nodes)
    n_entries = rng.randint(1, max(1, n // 3))
    kinds: dict = {}
    nodes = []
    ttc: dict = {}
    for i in range(n):
        ref = (f"n{i:02d}", "s")
        if i < n_entries:
            kinds[ref] = "ENTRY"
            nodes.append(StepNode(ref[0], "s", NodeKind.ENTRY, Distribution.instant()))
        else:
            kind = "AND" if rng.random() < 0.3 else "OR"
            kinds[ref] = kind
            local = round(rng.uniform(0.0, 5.0), 3)
            ttc[ref] = local
            nodes.append(
                StepNode(
                    ref[0],
                    "s",
                    NodeKind.AND if kind == "AND" else NodeKind.OR,
                    Distribution.constant(local),
                )
            )
    edges = []
    for j in range(n_entries, n):
        for i in range(j):
            if rng.random() < 0.45:
                edges.append(((f"n{i:02d}", "s"), (f"n{j:02d}", "s")))
    graph = AttackGraph(
        nodes=tuple(nodes),
        edges=tuple(Edge(s, t, EdgeKind.ATTACK) for s, t in edges),
    )
    return graph, kinds, edges, ttc


def chain_graph(*locals_days: float) -> AttackGraph:
    """Entry -> a -> b -> ... with constant local times."""
    nodes = [StepNode("entry", "s", NodeKind.ENTRY, Distribution.instant())]
    edges = []
    previous = ("entry", "s")
    for i, days in enumerate(locals_days):
        ref = (f"c{i}", "s")
        nodes.append(StepNode(ref[0], "s", NodeKind.OR, Distribution.constant(days)))
        edges.append(Edge(previous, ref, EdgeKind.ATTACK))
        previous = ref
    return AttackGraph(nodes=tuple(nodes), edges=tuple(edges))


def random_instance_model(rng: random.Random):
    """Random application/connection/data topology with vulnerabilities.

    Returns (EnrichedModel, list of vuln asset ids, entries, goals).
    """
    n_apps = rng.randint(2, 4)
    assets = []
    links = []
    app_ids = [f"app:a{i}" for i in range(n_apps)]
    for app_id in app_ids:
        assets.append(AssetInstance(app_id, "Application", app_id, (f"el-{app_id}",)))

    conn_ids = []
    # a connected chain plus random extra connections
    pairs = [(i, i + 1) for i in range(n_apps - 1)]
    for _ in range(rng.randint(0, 3)):
        i, j = rng.randrange(n_apps), rng.randrange(n_apps)
        if i != j:
            pairs.append((min(i, j), max(i, j)))
    for k, (i, j) in enumerate(sorted(set(pairs))):
        conn_id = f"conn:c{k}"
        conn_ids.append(conn_id)
        assets.append(AssetInstance(conn_id, "Connection", conn_id, (f"el-{conn_id}",)))
        links.append(Link("Networking", conn_id, app_ids[i]))
        links.append(Link("Networking", conn_id, app_ids[j]))

    data_ids = []
    for i in range(rng.randint(1, 2)):
        data_id = f"data:d{i}"
        data_ids.append(data_id)
        assets.append(AssetInstance(data_id, "Data", data_id, (f"el-{data_id}",)))
        links.append(Link("Storage", data_id, rng.choice(app_ids)))

    base = InstanceModel(
        assets=tuple(sorted(assets, key=lambda a: a.id)),
        links=tuple(sorted(set(links), key=lambda l: (l.association, l.left, l.right))),
    )

    params = TtcParams.default().for_skill(SkillLevel.INTERMEDIATE)
    added = []
    added_links = []
    per_asset = {}
    vuln_ids = []
    for app_id in app_ids:
        count = rng.randint(0, 2)
        if count == 0:
            continue
        for v in range(count):
            vuln_id = f"vuln:{app_id}:CVE-{v}"
            vuln_ids.append(vuln_id)
            added.append(AssetInstance(vuln_id, "Vulnerability", vuln_id, (f"el-{app_id}",)))
            added_links.append(Link("Weakness", vuln_id, app_id))
        expected = expected_compromise_days(count, 1.0, params)
        per_asset[app_id] = AssetEnrichment(
            matched_vulns=tuple(f"CVE-{v}" for v in range(count)),
            ttc_days=Distribution.exponential(1.0 / expected),
            candidate=None,  # type: ignore[arg-type]
        )

    enriched = EnrichedModel(
        base=base,
        variant_id="random",
        per_asset=per_asset,
        added_assets=tuple(added),
        added_links=tuple(added_links),
    )
    entries = ((conn_ids[0], "mitm"),) if conn_ids else ((app_ids[0], "connect"),)
    goals = ((rng.choice(data_ids), "write"),)
    return enriched, vuln_ids, entries, goals


def remove_vulnerability(enriched: EnrichedModel, vuln_id: str) -> EnrichedModel:
    """Drop one vulnerability instance and slow the affected exploit step."""
    params = TtcParams.default().for_skill(SkillLevel.INTERMEDIATE)
    app_id = next(
        l.right for l in enriched.added_links if l.association == "Weakness" and l.left == vuln_id
    )
    old = enriched.per_asset[app_id]
    remaining = tuple(v for v in old.matched_vulns if vuln_id.rsplit(":", 1)[-1] != v)
    count = len(remaining)
    if count:
        expected = expected_compromise_days(count, 1.0, params)
        new_ttc = Distribution.exponential(1.0 / expected)
    else:
        new_ttc = Distribution.unreachable()
    per_asset = dict(enriched.per_asset)
    per_asset[app_id] = AssetEnrichment(remaining, new_ttc, old.candidate)
    return EnrichedModel(
        base=enriched.base,
        variant_id=enriched.variant_id,
        per_asset=per_asset,
        added_assets=tuple(a for a in enriched.added_assets if a.id != vuln_id),
        added_links=tuple(
            l for l in enriched.added_links if vuln_id not in (l.left, l.right)
        ),
    )
