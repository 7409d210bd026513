"""Graphs, uniform hypergraphs, cluster families, and the verifiers.

Everything downstream reduces to the objects here: a Graph with bitmask
adjacency rows, an s-uniform Hypergraph that is either an explicit edge set
or a membership oracle, a SetFamily of disjoint vertex clusters with a
declared balance shape, a Blowup pairing a reduced graph with a family, and
a CycleBlowupCertificate that can be re-checked from scratch against a host
graph. Verifiers return Verdict values with witnesses instead of raising,
except where a precondition is plainly violated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .bitset import bits_list, iter_bits, lowest_bit, mask_from

PASS = "PASS"
FAIL = "FAIL"
UNKNOWN = "UNKNOWN"

# Balance shapes a SetFamily may declare.
BALANCE_EXACT = "exact"      # every cluster has exactly m vertices
BALANCE_WITHIN = "within"    # every cluster within (1 +- eta) m
BALANCE_QUASI = "quasi"      # exactly one singleton, the rest within (1 +- eta) m

_EPS = 1e-9


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verification: PASS, FAIL with a witness, or UNKNOWN."""

    status: str
    reason: str = ""
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def __bool__(self) -> bool:  # pragma: no cover - guard against misuse
        raise TypeError("Verdict is not a boolean; check .status or .ok")


def _pass() -> Verdict:
    return Verdict(PASS)


class Graph:
    """Undirected simple graph on vertices 0..n-1.

    Adjacency is a tuple of int bitmasks, one row per vertex. Rows are
    symmetric and loop-free; construct through the classmethods unless the
    rows are already known to be valid.
    """

    __slots__ = ("n", "adj")

    def __init__(self, n: int, adj: Sequence[int]):
        if n < 0:
            raise ValueError("negative vertex count")
        if len(adj) != n:
            raise ValueError("adjacency length mismatch")
        self.n = n
        self.adj = tuple(adj)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{n - 1}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, adj)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, [full ^ (1 << v) for v in range(n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise ValueError("cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete_multipartite(cls, sizes: Sequence[int]) -> "Graph":
        n = sum(sizes)
        full = (1 << n) - 1
        adj = []
        start = 0
        for s in sizes:
            part = ((1 << s) - 1) << start
            adj.extend([full & ~part] * s)
            start += s
        return cls(n, adj)

    # -- queries --------------------------------------------------------

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def deg_in(self, v: int, mask: int) -> int:
        return (self.adj[v] & mask).bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return (self.adj[u] >> v) & 1 == 1

    def vertices_mask(self) -> int:
        return (1 << self.n) - 1

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            rest = self.adj[u] >> (u + 1)
            for off in iter_bits(rest):
                yield (u, u + 1 + off)

    def without_edges_inside(self, mask: int) -> "Graph":
        """Copy with every edge between two mask vertices removed."""
        adj = list(self.adj)
        for v in bits_list(mask):
            adj[v] &= ~mask
        return Graph(self.n, adj)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count()})"


def min_degree(G: Graph) -> int:
    if G.n == 0:
        raise ValueError("empty graph")
    return min(row.bit_count() for row in G.adj)


def is_complete_bipartite(G: Graph, A: Iterable[int], B: Iterable[int]) -> Verdict:
    """PASS iff every A-B pair is an edge; FAIL carries one missing pair.

    A and B must be disjoint and nonempty. Equivalent to counting:
    PASS exactly when e(A, B) == |A| * |B|.
    """
    amask = mask_from(A)
    bmask = mask_from(B)
    if amask & bmask:
        raise ValueError("sets not disjoint")
    if amask == 0 or bmask == 0:
        raise ValueError("empty side")
    for a in iter_bits(amask):
        missing = bmask & ~G.adj[a]
        if missing:
            return Verdict(FAIL, "missing pair", (a, lowest_bit(missing)))
    return _pass()


class Hypergraph:
    """s-uniform hypergraph, explicit or oracle-backed.

    Explicit instances carry a frozen edge set (edges stored as sorted
    tuples). Oracle instances carry a membership callable over frozensets
    and never materialize their edges; degree queries are refused for them.
    """

    __slots__ = ("s", "universe", "edge_set", "member", "explicit")

    def __init__(self, s, universe, edge_set, member, explicit):
        self.s = s
        self.universe = universe
        self.edge_set = edge_set
        self.member = member
        self.explicit = explicit

    @classmethod
    def from_edges(cls, s: int, universe: Iterable[int], edges: Iterable[Iterable[int]]) -> "Hypergraph":
        uni = frozenset(universe)
        if s < 1:
            raise ValueError("uniformity must be positive")
        edge_set = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != s or len(set(t)) != s:
                raise ValueError(f"edge {t} is not an s-set")
            if not all(v in uni for v in t):
                raise ValueError(f"edge {t} leaves the universe")
            edge_set.add(t)
        return cls(s, uni, frozenset(edge_set), None, True)

    @classmethod
    def from_oracle(cls, s: int, universe: Iterable[int], member: Callable[[frozenset], bool]) -> "Hypergraph":
        return cls(s, frozenset(universe), None, member, False)

    def has_edge(self, S: Iterable[int]) -> bool:
        t = tuple(sorted(S))
        if len(set(t)) != self.s:
            return False
        if self.explicit:
            return t in self.edge_set
        return bool(self.member(frozenset(t)))

    def __repr__(self) -> str:
        kind = "explicit" if self.explicit else "oracle"
        return f"Hypergraph(s={self.s}, |V|={len(self.universe)}, {kind})"


def hypergraph_min_degree(P: Hypergraph) -> int:
    """Minimum vertex degree of an explicit hypergraph."""
    if not P.explicit:
        raise ValueError("degree requires explicit edges or use property_degree_estimate")
    counts = {v: 0 for v in P.universe}
    for e in P.edge_set:
        for v in e:
            counts[v] += 1
    if not counts:
        raise ValueError("empty hypergraph")
    return min(counts.values())


@dataclass(frozen=True)
class SetFamily:
    """Disjoint vertex clusters plus a declared balance shape.

    kind is one of BALANCE_EXACT, BALANCE_WITHIN, BALANCE_QUASI with scale m
    and slack eta. validate() checks the declaration; nothing is enforced at
    construction so partially built families can exist inside pipelines.
    """

    clusters: tuple[frozenset, ...]
    kind: str = BALANCE_EXACT
    m: int = 1
    eta: float = 0.0

    @classmethod
    def of(cls, clusters: Iterable[Iterable[int]], kind: str = BALANCE_EXACT,
           m: int = 1, eta: float = 0.0) -> "SetFamily":
        return cls(tuple(frozenset(c) for c in clusters), kind, m, eta)

    def validate(self) -> Verdict:
        seen = 0
        for i, c in enumerate(self.clusters):
            cm = mask_from(c)
            if cm & seen:
                return Verdict(FAIL, "clusters overlap", i)
            seen |= cm
        lo = (1.0 - self.eta) * self.m - _EPS
        hi = (1.0 + self.eta) * self.m + _EPS
        if self.kind == BALANCE_EXACT:
            for i, c in enumerate(self.clusters):
                if len(c) != self.m:
                    return Verdict(FAIL, "size out of range", (i, len(c)))
        elif self.kind == BALANCE_WITHIN:
            for i, c in enumerate(self.clusters):
                if not (lo <= len(c) <= hi):
                    return Verdict(FAIL, "size out of range", (i, len(c)))
        elif self.kind == BALANCE_QUASI:
            singles = [i for i, c in enumerate(self.clusters) if len(c) == 1]
            if len(singles) != 1:
                return Verdict(FAIL, "quasi needs exactly one singleton", tuple(singles))
            for i, c in enumerate(self.clusters):
                if i == singles[0]:
                    continue
                if not (lo <= len(c) <= hi):
                    return Verdict(FAIL, "size out of range", (i, len(c)))
        else:
            return Verdict(FAIL, "unknown balance kind", self.kind)
        return _pass()

    def singleton_index(self) -> int:
        singles = [i for i, c in enumerate(self.clusters) if len(c) == 1]
        if len(singles) != 1:
            raise ValueError("family has no unique singleton")
        return singles[0]

    def union_mask(self) -> int:
        u = 0
        for c in self.clusters:
            u |= mask_from(c)
        return u

    def total(self) -> int:
        return sum(len(c) for c in self.clusters)


@dataclass(frozen=True)
class Blowup:
    """A reduced graph together with one cluster per reduced vertex."""

    reduced: Graph
    family: SetFamily

    def __post_init__(self):
        if self.reduced.n != len(self.family.clusters):
            raise ValueError("cluster count does not match reduced graph order")


def verify_blowup_hosted(G: Graph, B: Blowup) -> Verdict:
    """PASS iff clusters are disjoint, inside V(G), and every reduced edge
    is realized as a complete bipartite join between its two clusters."""
    vmask = G.vertices_mask()
    seen = 0
    masks = []
    for i, c in enumerate(B.family.clusters):
        cm = mask_from(c)
        if cm & ~vmask:
            raise ValueError(f"cluster {i} leaves the host vertex set")
        if cm & seen:
            return Verdict(FAIL, "clusters overlap", i)
        seen |= cm
        masks.append(cm)
    for u, v in B.reduced.edges():
        if masks[u] == 0 or masks[v] == 0:
            continue  # empty side realizes the join vacuously
        for a in iter_bits(masks[u]):
            missing = masks[v] & ~G.adj[a]
            if missing:
                return Verdict(FAIL, "missing pair", (u, v, a, lowest_bit(missing)))
    return _pass()


@dataclass(frozen=True)
class CycleBlowupCertificate:
    """Spanning cycle blow-up: an ordered cyclic list of clusters plus the
    declared scale (c, eta) the cluster sizes are measured against."""

    n: int
    c: float
    eta: float
    clusters: tuple[tuple[int, ...], ...]

    def size_bounds(self) -> tuple[int, int]:
        base = self.c * math.log(self.n)
        lo = math.ceil((1.0 - self.eta) * base - _EPS)
        hi = math.floor((1.0 + self.eta) * base + _EPS)
        return lo, hi

    def to_json(self) -> str:
        obj = {
            "n": self.n,
            "c": self.c,
            "eta": self.eta,
            "clusters": [list(cl) for cl in self.clusters],
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CycleBlowupCertificate":
        obj = json.loads(text)
        clusters = tuple(tuple(int(v) for v in cl) for cl in obj["clusters"])
        return cls(int(obj["n"]), float(obj["c"]), float(obj["eta"]), clusters)


def canonical_cycle(clusters: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical cyclic presentation: each cluster ascending, the cluster
    holding the global minimum vertex first, direction chosen to make the
    whole sequence lexicographically least."""
    cls_sorted = [tuple(sorted(c)) for c in clusters]
    k = len(cls_sorted)
    if k == 0:
        return ()
    start = min(range(k), key=lambda i: cls_sorted[i][0])
    fwd = tuple(cls_sorted[(start + i) % k] for i in range(k))
    bwd = tuple(cls_sorted[(start - i) % k] for i in range(k))
    return min(fwd, bwd)


def verify_cycle_blowup(G: Graph, cert: CycleBlowupCertificate) -> Verdict:
    """Re-check a cycle blow-up certificate from scratch against G.

    PASS requires: at least 3 clusters, all nonempty and disjoint, union
    equal to V(G), cyclically consecutive clusters completely joined, and
    every cluster size inside the declared [ (1-eta)c ln n, (1+eta)c ln n ]
    window (floor/ceil applied outward on the declared bounds).
    """
    k = len(cert.clusters)
    if k < 3:
        return Verdict(FAIL, "degenerate cycle", k)
    if cert.n != G.n:
        return Verdict(FAIL, "vertex count mismatch", (cert.n, G.n))
    vmask = G.vertices_mask()
    seen = 0
    masks = []
    for i, cl in enumerate(cert.clusters):
        if len(cl) == 0:
            return Verdict(FAIL, "empty cluster", i)
        cm = mask_from(cl)
        if cm.bit_count() != len(cl):
            return Verdict(FAIL, "repeated vertex inside cluster", i)
        if cm & ~vmask:
            return Verdict(FAIL, "vertex outside host", i)
        if cm & seen:
            return Verdict(FAIL, "clusters overlap", i)
        seen |= cm
        masks.append(cm)
    if seen != vmask:
        return Verdict(FAIL, "not spanning", lowest_bit(vmask & ~seen))
    lo, hi = cert.size_bounds()
    for i, cl in enumerate(cert.clusters):
        if not (lo <= len(cl) <= hi):
            return Verdict(FAIL, "size out of range", (i, len(cl)))
    for i in range(k):
        j = (i + 1) % k
        for a in iter_bits(masks[i]):
            missing = masks[j] & ~G.adj[a]
            if missing:
                return Verdict(FAIL, "consecutive clusters not joined",
                               (i, j, a, lowest_bit(missing)))
    return _pass()


# -- plain text graph files ---------------------------------------------

def graph_to_text(G: Graph) -> str:
    lines = [f"{G.n} {G.edge_count()}"]
    lines.extend(f"{u} {v}" for u, v in G.edges())
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    """Parse the 'n m' header plus one 'u v' line per edge, 0-based ids.

    Lines starting with '#' and blank lines are skipped anywhere.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line)
    if not rows:
        raise ValueError("no header line")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError(f"bad header {rows[0]!r}")
    n, m = int(head[0]), int(head[1])
    edges = []
    for line in rows[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise ValueError(f"header claims {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)
