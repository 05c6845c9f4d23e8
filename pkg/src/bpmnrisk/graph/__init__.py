"""Attack-graph compilation, deterministic analysis, and simulation."""

from .arrival import exact_arrival
from .compiler import compile_graph
from .model import (
    AttackGraph,
    Edge,
    EdgeKind,
    NodeKind,
    NodeRef,
    StepNode,
    graph_to_dot,
)
from .sampling import CHUNK, draw_chunk, draw_sample, sample_distribution
from .simulate import (
    GoalResult,
    SimConfig,
    SimResult,
    critical_path,
    path_containment_fractions,
    simulate,
    toggle_defense,
)

__all__ = [
    "AttackGraph",
    "CHUNK",
    "Edge",
    "EdgeKind",
    "GoalResult",
    "NodeKind",
    "NodeRef",
    "SimConfig",
    "SimResult",
    "StepNode",
    "compile_graph",
    "critical_path",
    "draw_chunk",
    "draw_sample",
    "exact_arrival",
    "graph_to_dot",
    "path_containment_fractions",
    "sample_distribution",
    "simulate",
    "toggle_defense",
]
