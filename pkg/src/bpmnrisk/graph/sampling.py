"""Counter-based random draws for simulation.

Each (seed, sample index, node) triple maps to one uniform draw through a
keyed Philox stream, so a sample's local times are independent of
evaluation order, chunking, and the presence of other nodes.  Exponential
times come from the inverse CDF.
"""

from __future__ import annotations

import hashlib

import numpy as np
from numpy.random import Generator, Philox

from ..mal.ast import DistKind, Distribution
from .model import NodeRef, StepNode

# samples are processed in fixed-size blocks; the block index is part of the
# RNG key, which keeps draws reproducible for any traversal order
CHUNK = 16384


def _key(seed: int, ref: NodeRef, chunk_index: int) -> np.ndarray:
    material = f"{seed}|{chunk_index}|{ref[0]}|{ref[1]}".encode()
    digest = hashlib.sha256(material).digest()
    return np.frombuffer(digest[:16], dtype=np.uint64)


def _uniforms(seed: int, ref: NodeRef, chunk_index: int, count: int) -> np.ndarray:
    gen = Generator(Philox(key=_key(seed, ref, chunk_index)))
    return gen.random(count)


def draw_chunk(
    seed: int, nodes: list[StepNode], chunk_index: int, count: int
) -> np.ndarray:
    """Local times for all nodes over one block of samples, shape (M, count)."""
    out = np.empty((len(nodes), count), dtype=np.float64)
    for row, node in enumerate(nodes):
        dist = node.ttc
        if dist.kind is DistKind.INSTANT:
            out[row] = 0.0
        elif dist.kind is DistKind.CONSTANT:
            out[row] = dist.value
        else:
            u = _uniforms(seed, node.ref, chunk_index, count)
            out[row] = -np.log1p(-u) / dist.value
    return out


def draw_sample(seed: int, nodes: list[StepNode], sample_index: int) -> dict[NodeRef, float]:
    """Local times of a single sample, matching :func:`draw_chunk` exactly."""
    chunk_index, offset = divmod(sample_index, CHUNK)
    out: dict[NodeRef, float] = {}
    for node in nodes:
        dist = node.ttc
        if dist.kind is DistKind.INSTANT:
            out[node.ref] = 0.0
        elif dist.kind is DistKind.CONSTANT:
            out[node.ref] = dist.value
        else:
            u = _uniforms(seed, node.ref, chunk_index, offset + 1)[-1:]
            out[node.ref] = float((-np.log1p(-u) / dist.value)[0])
    return out


def sample_distribution(dist: Distribution, seed: int, count: int) -> np.ndarray:
    """Standalone draws from one distribution (used for calibration tests)."""
    node = StepNode(asset_id="standalone", step="draw", kind=None, ttc=dist)  # type: ignore[arg-type]
    if dist.kind is DistKind.INSTANT:
        return np.zeros(count)
    if dist.kind is DistKind.CONSTANT:
        return np.full(count, dist.value)
    chunks = []
    for chunk_index in range((count + CHUNK - 1) // CHUNK):
        n = min(CHUNK, count - chunk_index * CHUNK)
        u = _uniforms(seed, node.ref, chunk_index, n)
        chunks.append(-np.log1p(-u) / dist.value)
    return np.concatenate(chunks)
