"""Monte Carlo attack simulation.

Per sample, every node draws a local time from its distribution and the
arrival times follow the same AND/OR semantics as the deterministic solver;
the implementation evaluates whole blocks of samples at once with a
monotone fixed-point sweep, which yields bit-identical results to running
:func:`exact_arrival` sample by sample.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import GraphError
from .arrival import exact_arrival
from .model import AttackGraph, EdgeKind, NodeKind, NodeRef
from .sampling import CHUNK, draw_chunk, draw_sample


@dataclass(frozen=True)
class SimConfig:
    samples: int
    horizon_days: float = 100.0
    seed: int = 42
    attacker_entry: tuple[NodeRef, ...] = ()
    goals: tuple[NodeRef, ...] = ()

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise GraphError("samples must be at least 1")
        if not self.horizon_days > 0:
            raise GraphError("horizon must be positive")


@dataclass(frozen=True)
class GoalResult:
    goal: NodeRef
    arrivals: tuple[float, ...]
    success_rate: float
    p5: float | None
    p50: float | None
    p95: float | None
    median_sample: int | None
    critical_path: tuple[NodeRef, ...]

    def summary(self) -> dict:
        return {
            "goal": list(self.goal),
            "success_rate": self.success_rate,
            "p5": _enc(self.p5),
            "p50": _enc(self.p50),
            "p95": _enc(self.p95),
            "critical_path": [list(r) for r in self.critical_path],
        }


@dataclass(frozen=True)
class SimResult:
    samples: int
    horizon_days: float
    seed: int
    per_goal: dict[NodeRef, GoalResult]
    per_node_rate: dict[NodeRef, float] = field(default_factory=dict)

    def goal(self, ref: NodeRef) -> GoalResult:
        return self.per_goal[ref]

    def to_dict(self, include_samples: bool = True) -> dict:
        doc = {
            "schema": "sim-result/1",
            "samples": self.samples,
            "horizon_days": self.horizon_days,
            "seed": self.seed,
            "per_goal": {
                _refkey(ref): {
                    **g.summary(),
                    **(
                        {"arrivals": [_enc(a) for a in g.arrivals]}
                        if include_samples
                        else {}
                    ),
                    "median_sample": g.median_sample,
                }
                for ref, g in sorted(self.per_goal.items())
            },
            "per_node_rate": {
                _refkey(ref): rate for ref, rate in sorted(self.per_node_rate.items())
            },
        }
        return doc

    def to_json(self, include_samples: bool = True) -> bytes:
        return json.dumps(self.to_dict(include_samples), sort_keys=True).encode()


def _enc(value: float | None):
    if value is None:
        return None
    if math.isinf(value):
        return "inf"
    return value


def _refkey(ref: NodeRef) -> str:
    return f"{ref[0]}|{ref[1]}"


class _Engine:
    """Row/column layout of one graph for block evaluation."""

    def __init__(self, graph: AttackGraph):
        self.graph = graph
        self.nodes = list(graph.nodes)
        self.index = {n.ref: i for i, n in enumerate(self.nodes)}
        parents = graph.attack_parents()
        blocked = graph.blocked_nodes()
        designated = set(graph.entry_nodes)

        self.entry_rows: list[int] = []
        self.designated_rows: list[int] = []
        self.updatable: list[tuple[int, np.ndarray, bool]] = []  # row, parents, is_and
        self.inactive_rows: list[int] = []

        for i, node in enumerate(self.nodes):
            ref = node.ref
            if node.kind is NodeKind.DEFENSE or ref in blocked:
                self.inactive_rows.append(i)
                continue
            if node.kind is NodeKind.ENTRY:
                self.entry_rows.append(i)
                continue
            if ref in designated:
                self.designated_rows.append(i)
                continue
            rows = [self.index[p] for p in parents[ref]]
            if rows:
                self.updatable.append(
                    (i, np.asarray(rows, dtype=np.intp), node.kind is NodeKind.AND)
                )

    def arrivals_for_block(self, ttc: np.ndarray) -> np.ndarray:
        """Fixed-point arrival times for one block; ttc has shape (M, C)."""
        m, c = ttc.shape
        arrival = np.full((m, c), np.inf)
        for row in self.entry_rows:
            arrival[row] = 0.0
        for row in self.designated_rows:
            arrival[row] = ttc[row]
        if not self.updatable:
            return arrival
        for _ in range(m + 2):
            changed = False
            for row, parent_rows, is_and in self.updatable:
                block = arrival[parent_rows]
                agg = block.max(axis=0) if is_and else block.min(axis=0)
                new = ttc[row] + agg
                if not np.array_equal(new, arrival[row]):
                    arrival[row] = new
                    changed = True
            if not changed:
                return arrival
        raise GraphError("arrival fixed point did not converge")


def _validate(graph: AttackGraph, cfg: SimConfig) -> AttackGraph:
    if cfg.attacker_entry:
        graph = graph.with_entries(cfg.attacker_entry)
    if cfg.goals:
        graph = graph.with_goals(cfg.goals)
    refs = {n.ref for n in graph.nodes}
    for goal in graph.goal_nodes:
        if goal not in refs:
            raise GraphError(f"goal {goal} not in graph")
    return graph


def simulate(graph: AttackGraph, cfg: SimConfig) -> SimResult:
    """Run the Monte Carlo simulation; same seed gives identical results."""
    graph = _validate(graph, cfg)
    engine = _Engine(graph)
    m = len(engine.nodes)
    goal_rows = {goal: engine.index[goal] for goal in graph.goal_nodes}

    node_success = np.zeros(m, dtype=np.int64)
    goal_arrivals: dict[NodeRef, list[np.ndarray]] = {g: [] for g in goal_rows}

    position = 0
    while position < cfg.samples:
        chunk_index = position // CHUNK
        count = min(CHUNK, cfg.samples - position)
        ttc = draw_chunk(cfg.seed, engine.nodes, chunk_index, count)
        arrival = engine.arrivals_for_block(ttc)
        node_success += (arrival <= cfg.horizon_days).sum(axis=1)
        for goal, row in goal_rows.items():
            goal_arrivals[goal].append(arrival[row].copy())
        position += count

    per_node_rate = {
        node.ref: float(node_success[i]) / cfg.samples
        for i, node in enumerate(engine.nodes)
    }

    per_goal: dict[NodeRef, GoalResult] = {}
    for goal in graph.goal_nodes:
        arrivals = (
            np.concatenate(goal_arrivals[goal]) if goal_arrivals[goal] else np.array([])
        )
        finite_mask = np.isfinite(arrivals)
        finite = arrivals[finite_mask]
        success = float((arrivals <= cfg.horizon_days).sum()) / cfg.samples
        if finite.size:
            p5, p50, p95 = (float(v) for v in np.percentile(finite, [5, 50, 95]))
            order = sorted(
                (float(arrivals[i]), int(i))
                for i in np.flatnonzero(finite_mask)
            )
            median_sample = order[(len(order) - 1) // 2][1]
            ttc_sample = draw_sample(cfg.seed, engine.nodes, median_sample)
            sample_arrival = exact_arrival(graph, ttc_sample)
            path = critical_path(graph, sample_arrival, goal)
        else:
            p5 = p50 = p95 = None
            median_sample = None
            path = ()
        per_goal[goal] = GoalResult(
            goal=goal,
            arrivals=tuple(float(a) for a in arrivals),
            success_rate=success,
            p5=p5,
            p50=p50,
            p95=p95,
            median_sample=median_sample,
            critical_path=path,
        )

    return SimResult(
        samples=cfg.samples,
        horizon_days=cfg.horizon_days,
        seed=cfg.seed,
        per_goal=per_goal,
        per_node_rate=per_node_rate,
    )


def critical_path(
    graph: AttackGraph, sample_arrivals: dict[NodeRef, float], goal: NodeRef
) -> tuple[NodeRef, ...]:
    """Backtrack the support of a reached goal in one sample.

    OR nodes follow the earliest parent (ties by node id), AND nodes pull in
    every parent; the resulting tree is serialized in topological order.
    Raises :class:`GraphError` when the goal was not reached.
    """
    if not math.isfinite(sample_arrivals.get(goal, math.inf)):
        raise GraphError(f"goal {goal} not reached in this sample")
    node_map = graph.node_map()
    parents = graph.attack_parents()
    sources = set(graph.entry_nodes) | {
        n.ref for n in graph.nodes if n.kind is NodeKind.ENTRY
    }

    tree_edges: list[tuple[NodeRef, NodeRef]] = []
    visited: set[NodeRef] = set()
    stack = [goal]
    while stack:
        ref = stack.pop()
        if ref in visited:
            continue
        visited.add(ref)
        if ref in sources:
            continue
        candidates = [p for p in parents[ref] if math.isfinite(sample_arrivals.get(p, math.inf))]
        if not candidates:
            continue
        node = node_map[ref]
        if node.kind is NodeKind.AND:
            chosen = candidates
        else:
            chosen = [min(candidates, key=lambda p: (sample_arrivals[p], p))]
        for parent in chosen:
            tree_edges.append((parent, ref))
            if parent not in visited:
                stack.append(parent)

    # topological serialization of the extracted tree, ties by node id
    indegree: dict[NodeRef, int] = {ref: 0 for ref in visited}
    children: dict[NodeRef, list[NodeRef]] = {ref: [] for ref in visited}
    for parent, child in tree_edges:
        indegree[child] += 1
        children[parent].append(child)
    heap = [ref for ref, deg in indegree.items() if deg == 0]
    heapq.heapify(heap)
    ordered: list[NodeRef] = []
    while heap:
        ref = heapq.heappop(heap)
        ordered.append(ref)
        for child in sorted(children[ref]):
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(heap, child)
    if len(ordered) != len(visited):
        # zero-time cycle in the support; fall back to arrival-sorted order
        ordered = sorted(visited, key=lambda r: (sample_arrivals.get(r, math.inf), r))
    return tuple(ordered)


def path_containment_fractions(
    graph: AttackGraph,
    cfg: SimConfig,
    paths: dict[NodeRef, list[tuple[NodeRef, ...]]],
) -> dict[NodeRef, dict[tuple[NodeRef, ...], float]]:
    """Per goal: fraction of its successful samples containing each path.

    A sample contains a path when every node on it arrives within the
    horizon.  Uses the same deterministic draws as :func:`simulate`.
    """
    graph = _validate(graph, cfg)
    engine = _Engine(graph)
    path_rows = {
        goal: {
            path: np.asarray([engine.index[r] for r in path], dtype=np.intp)
            for path in goal_paths
            if all(r in engine.index for r in path)
        }
        for goal, goal_paths in paths.items()
    }
    goal_rows = {goal: engine.index[goal] for goal in paths if goal in engine.index}

    success = {goal: 0 for goal in goal_rows}
    contained = {goal: {path: 0 for path in path_rows[goal]} for goal in goal_rows}

    position = 0
    while position < cfg.samples:
        chunk_index = position // CHUNK
        count = min(CHUNK, cfg.samples - position)
        ttc = draw_chunk(cfg.seed, engine.nodes, chunk_index, count)
        arrival = engine.arrivals_for_block(ttc)
        within = arrival <= cfg.horizon_days
        for goal, row in goal_rows.items():
            ok = within[row]
            success[goal] += int(ok.sum())
            for path, rows in path_rows[goal].items():
                contained[goal][path] += int((within[rows].all(axis=0) & ok).sum())
        position += count

    out: dict[NodeRef, dict[tuple[NodeRef, ...], float]] = {}
    for goal in goal_rows:
        denom = success[goal]
        out[goal] = {
            path: (contained[goal][path] / denom if denom else 0.0)
            for path in path_rows[goal]
        }
    return out


def toggle_defense(graph: AttackGraph, ref: NodeRef, enabled: bool) -> AttackGraph:
    """Functional defense switch; see :meth:`AttackGraph.toggle_defense`."""
    return graph.toggle_defense(ref, enabled)
