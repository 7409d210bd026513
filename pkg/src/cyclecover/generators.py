"""Seeded instance generators with the degree floor verified on the way out.

All kinds are deterministic functions of their GeneratorSpec, including the
repair pass; edges are sampled in ascending pair order so the stream layout
never depends on interpreter details.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .core import Graph, graph_from_text, min_degree
from .seeding import spawn

GNP_REPAIRED = "GNP_REPAIRED"
DIRAC_EXTREMAL = "DIRAC_EXTREMAL"
CLIQUE_UNION_PLUS = "CLIQUE_UNION_PLUS"
FROM_FILE = "FROM_FILE"

KINDS = (GNP_REPAIRED, DIRAC_EXTREMAL, CLIQUE_UNION_PLUS, FROM_FILE)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int = 0
    p: float = 0.5
    delta_target: int | None = None
    seed: int = 0
    overlap: int | None = None   # DIRAC_EXTREMAL half-overlap, derived if None
    pieces: int = 3              # CLIQUE_UNION_PLUS clique count
    path: str | None = None      # FROM_FILE source


def _repair_to_min_degree(adj: list[int], n: int, target: int) -> None:
    """Add edges from the lowest-degree vertex to its non-neighbours in
    ascending id until the minimum degree reaches the target. In place."""
    if target > n - 1:
        raise ValueError(f"min degree {target} infeasible on {n} vertices")
    full = (1 << n) - 1
    while True:
        v = min(range(n), key=lambda x: (adj[x].bit_count(), x))
        if adj[v].bit_count() >= target:
            return
        candidates = full & ~adj[v] & ~(1 << v)
        u = (candidates & -candidates).bit_length() - 1
        adj[v] |= 1 << u
        adj[u] |= 1 << v


def _gnp_repaired(spec: GeneratorSpec) -> Graph:
    n = spec.n
    rng = spawn(spec.seed, "gnp", n)
    adj = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < spec.p:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
    if spec.delta_target is not None:
        _repair_to_min_degree(adj, n, spec.delta_target)
    return Graph(n, adj)


def _dirac_extremal(spec: GeneratorSpec) -> Graph:
    """Two overlapping cliques of sizes ceil(n/2)+d and floor(n/2)+d sharing
    2d vertices; the classic tight family for half-degree thresholds."""
    n = spec.n
    if spec.overlap is not None:
        d = spec.overlap
    elif spec.delta_target is not None:
        # the smaller clique bounds the minimum degree: floor(n/2) + d - 1
        d = max(0, spec.delta_target - (n // 2 - 1))
    else:
        d = 1
    a = math.ceil(n / 2) + d
    if a > n:
        raise ValueError("overlap too large for vertex count")
    first = (1 << a) - 1                      # vertices 0..a-1
    second = ((1 << (n - a + 2 * d)) - 1) << (a - 2 * d)
    adj = [0] * n
    for block in (first, second):
        for v in range(n):
            if (block >> v) & 1:
                adj[v] |= block & ~(1 << v)
    return Graph(n, adj)


def _clique_union_plus(spec: GeneratorSpec) -> Graph:
    n, k = spec.n, spec.pieces
    if k < 1 or k > n:
        raise ValueError("bad clique count")
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    adj = [0] * n
    start = 0
    for s in sizes:
        block = ((1 << s) - 1) << start
        for v in range(start, start + s):
            adj[v] |= block & ~(1 << v)
        start += s
    if spec.delta_target is not None:
        _repair_to_min_degree(adj, n, spec.delta_target)
    return Graph(n, adj)


def generate(spec: GeneratorSpec) -> Graph:
    """Build the graph for a spec; the degree floor, when given, is verified
    before the graph is returned."""
    if spec.kind == GNP_REPAIRED:
        G = _gnp_repaired(spec)
    elif spec.kind == DIRAC_EXTREMAL:
        G = _dirac_extremal(spec)
    elif spec.kind == CLIQUE_UNION_PLUS:
        G = _clique_union_plus(spec)
    elif spec.kind == FROM_FILE:
        if spec.path is None:
            raise ValueError("FROM_FILE needs a path")
        G = graph_from_text(Path(spec.path).read_text())
    else:
        raise ValueError(f"unknown generator kind {spec.kind!r}")
    if spec.delta_target is not None and spec.kind != FROM_FILE:
        got = min_degree(G)
        if got < spec.delta_target:
            raise ValueError(f"generator missed degree floor: {got} < {spec.delta_target}")
    return G
