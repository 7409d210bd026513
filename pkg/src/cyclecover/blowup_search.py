"""Searches for bicliques, pattern blow-ups, connector triples, and rooted
blow-ups.

All searches share one tie-break everywhere a vertex is chosen: higher host
degree first, then lower id. Every non-NONE return is re-checked against the
defining property before it leaves the module, so a bug can produce a NONE
or an exception but never an invalid certificate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .bitset import bits_list, iter_bits, mask_from
from .core import (
    BALANCE_EXACT,
    BALANCE_QUASI,
    Blowup,
    Graph,
    PASS,
    SetFamily,
    is_complete_bipartite,
    verify_blowup_hosted,
)
from .inheritance import ABSOLUTE, PropertySpec, inherits_degree
from .seeding import draw_subset, spawn

DEFAULT_NODE_BUDGET = 10 ** 6
_TINY_ENUM = 200_000

EXACT = "EXACT"
SAMPLED = "SAMPLED"


def _order_key(G: Graph):
    """Global choice order: descending degree, then ascending id."""
    return lambda v: (-G.degree(v), v)


@dataclass(frozen=True)
class BicliqueRequest:
    host: Graph
    side_a: frozenset
    side_b: frozenset
    p: int

    @classmethod
    def of(cls, host: Graph, side_a: Iterable[int], side_b: Iterable[int], p: int) -> "BicliqueRequest":
        a = frozenset(side_a)
        b = frozenset(side_b)
        if a & b:
            raise ValueError("sides overlap")
        if p < 1:
            raise ValueError("p must be at least 1")
        if p > min(len(a), len(b)):
            raise ValueError("p exceeds a side")
        return cls(host, a, b, p)


def _check_biclique(G: Graph, A: Sequence[int], B: Sequence[int]) -> None:
    bmask = mask_from(B)
    for a in A:
        if bmask & ~G.adj[a]:
            raise AssertionError("search returned a non-biclique")


def find_biclique(req: BicliqueRequest, node_budget: int | None = DEFAULT_NODE_BUDGET):
    """A complete bipartite K_{p,p} with sides inside side_a / side_b, or
    None.

    Small B-sides are enumerated outright, so None is then a proof of
    absence. Larger instances run a pruned DFS over B in degree order and
    None may also mean the node budget ran out.
    """
    G = req.host
    p = req.p
    amask = mask_from(req.side_a)
    key = _order_key(G)
    b_list = sorted(req.side_b, key=lambda b: (-(G.adj[b] & amask).bit_count(), key(b)))

    def finish(inter_mask: int, chosen: list[int]):
        a_side = sorted(bits_list(inter_mask), key=key)[:p]
        b_side = sorted(chosen)
        _check_biclique(G, a_side, b_side)
        return tuple(sorted(a_side)), tuple(b_side)

    if comb(len(b_list), p) <= _TINY_ENUM:
        for chosen in combinations(b_list, p):
            inter = amask
            for b in chosen:
                inter &= G.adj[b]
                if inter.bit_count() < p:
                    break
            else:
                return finish(inter, list(chosen))
        return None  # proven: every p-subset of B was inspected

    nodes = 0

    def dfs(start: int, chosen: list[int], inter: int):
        nonlocal nodes
        if len(chosen) == p:
            return finish(inter, chosen)
        for idx in range(start, len(b_list)):
            if node_budget is not None and nodes >= node_budget:
                return None
            b = b_list[idx]
            nodes += 1
            nxt = inter & G.adj[b]
            if nxt.bit_count() < p:
                continue
            if len(b_list) - idx < p - len(chosen):
                return None
            res = dfs(idx + 1, chosen + [b], nxt)
            if res is not None:
                return res
        return None

    return dfs(0, [], amask)


@dataclass(frozen=True)
class CopyCounter:
    """How to count labelled copies of a small pattern inside a host."""

    pattern: Graph
    frame: SetFamily | None = None
    mode: str = EXACT
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.pattern.n > 8:
            raise ValueError("pattern too large; at most 8 vertices")
        if self.frame is not None and len(self.frame.clusters) != self.pattern.n:
            raise ValueError("frame must have one part per pattern vertex")
        if self.mode not in (EXACT, SAMPLED):
            raise ValueError(f"unknown mode {self.mode!r}")


def count_copies(counter: CopyCounter, host: Graph) -> float:
    """Count labelled, edge-preserving, injective embeddings of the pattern.

    With a frame, pattern vertex i must land inside frame part i. EXACT
    refuses when the naive state space passes 1e8; SAMPLED returns an
    unbiased estimate over the labelled product space.
    """
    F = counter.pattern
    s = F.n
    if counter.frame is not None:
        parts = [sorted(c) for c in counter.frame.clusters]
    else:
        parts = [list(range(host.n))] * s
    space = 1
    for part in parts:
        space *= max(1, len(part))

    if counter.mode == EXACT:
        if space > 10 ** 8:
            raise ValueError("state space too large; use SAMPLED")
        part_masks = [mask_from(p) for p in parts]
        count = 0

        def rec(i: int, used: int, image: list[int]):
            nonlocal count
            if i == s:
                count += 1
                return
            cand = part_masks[i] & ~used
            for u in range(i):
                if F.has_edge(u, i):
                    cand &= host.adj[image[u]]
            for v in iter_bits(cand):
                image.append(v)
                rec(i + 1, used | (1 << v), image)
                image.pop()

        rec(0, 0, [])
        return float(count)

    # SAMPLED: uniform over the labelled product space, collisions miss
    hits = 0
    for t in range(counter.trials):
        rng = spawn(counter.seed, "copy-count", t)
        image = [part[rng.randrange(len(part))] for part in parts]
        if len(set(image)) != s:
            continue
        if all(host.has_edge(image[u], image[v]) for u, v in F.edges()):
            hits += 1
    return hits / counter.trials * space


def find_blowup(host: Graph, F: Graph, t: int, frame: SetFamily | None = None, *,
                avoid: int = 0, restart_budget: int = 50, seed: int = 0) -> Blowup | None:
    """Search for a blow-up of F with every cluster of size exactly t.

    Clusters are grown simultaneously, one vertex per pattern position per
    round, always taking the candidate that keeps the scarcest neighbouring
    pool largest. Candidate pools only shrink; a dead pool aborts the pass
    and a jittered restart reorders the tie-break.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    if frame is not None and len(frame.clusters) != F.n:
        raise ValueError("frame must have one part per pattern vertex")
    s = F.n
    full = host.vertices_mask() & ~avoid
    base = [mask_from(frame.clusters[i]) & full if frame is not None else full
            for i in range(s)]
    nbrs = [bits_list(F.adj[i]) for i in range(s)]
    order = sorted(range(s), key=lambda i: (-F.degree(i), i))
    key = _order_key(host)

    for restart in range(restart_budget + 1):
        jitter = None
        if restart > 0:
            rng = spawn(seed, "blowup-restart", restart)
            jitter = {v: rng.random() for v in bits_list(full)}
        cand = list(base)
        clusters: list[list[int]] = [[] for _ in range(s)]
        used = 0
        dead = False
        for _round in range(t):
            for i in order:
                pool = cand[i] & ~used
                best = None
                best_rank = None
                for x in iter_bits(pool):
                    if nbrs[i]:
                        value = min((cand[j] & host.adj[x] & ~used).bit_count()
                                    for j in nbrs[i])
                    else:
                        value = host.n
                    rank = (-value, jitter[x] if jitter is not None else 0.0,
                            key(x)[0], key(x)[1])
                    if best_rank is None or rank < best_rank:
                        best, best_rank = x, rank
                if best is None:
                    dead = True
                    break
                clusters[i].append(best)
                used |= 1 << best
                for j in nbrs[i]:
                    cand[j] &= host.adj[best]
                need = t - len(clusters[i])
                if (cand[i] & ~used).bit_count() < need:
                    dead = True
                    break
            if dead:
                break
        if dead:
            continue
        fam = SetFamily.of(clusters, BALANCE_EXACT, m=t)
        blow = Blowup(F, fam)
        verdict = verify_blowup_hosted(host, blow)
        if verdict.status != PASS:  # pragma: no cover - construction guarantees it
            raise AssertionError(f"blow-up failed self check: {verdict}")
        return blow
    return None


def connect_clusters(G: Graph, U: Iterable[int], V: Iterable[int], W: Iterable[int],
                     m_prime: int, *, eps: float = 0.25,
                     node_budget: int | None = DEFAULT_NODE_BUDGET,
                     telemetry: dict | None = None):
    """Find (U', V', W') of size m_prime each with W' inside W completely
    joined to U' inside U and to V' inside V. Returns the triple or None.

    Only vertices with at least eps m / 8 neighbours on a side can serve in
    W', so the search runs over that filtered pool; since membership in a
    valid W' forces m_prime >= eps m / 8 such neighbours anyway, the filter
    loses nothing whenever m_prime clears the threshold. Pool sizes land in
    the telemetry dict when one is supplied.
    """
    u_list = sorted(U)
    v_list = sorted(V)
    w_list = sorted(W)
    if len(u_list) != len(v_list):
        raise ValueError("unbalanced connection request")
    m = len(u_list)
    if m_prime < 1 or m_prime > m:
        raise ValueError("m_prime must lie in 1..|U|")
    umask = mask_from(u_list)
    vmask = mask_from(v_list)
    if umask & vmask:
        raise ValueError("U and V overlap")
    if mask_from(w_list) & (umask | vmask):
        raise ValueError("W overlaps an endpoint side")
    thresh = eps * m / 8.0
    w_u = [w for w in w_list if (G.adj[w] & umask).bit_count() >= thresh]
    w_v = [w for w in w_list if (G.adj[w] & vmask).bit_count() >= thresh]
    star = sorted(set(w_u) & set(w_v))
    if telemetry is not None:
        telemetry["n_prime"] = len(u_list) + len(v_list) + len(w_list)
        telemetry["w_u"] = len(w_u)
        telemetry["w_v"] = len(w_v)
        telemetry["w_star"] = len(star)
    key = _order_key(G)

    def finish(wset: Sequence[int], inter_u: int, inter_v: int):
        u_side = sorted(sorted(bits_list(inter_u), key=key)[:m_prime])
        v_side = sorted(sorted(bits_list(inter_v), key=key)[:m_prime])
        w_side = tuple(sorted(wset))
        assert is_complete_bipartite(G, u_side, w_side).status == PASS
        assert is_complete_bipartite(G, v_side, w_side).status == PASS
        return tuple(u_side), tuple(v_side), w_side

    order = sorted(star, key=lambda w: (-min((G.adj[w] & umask).bit_count(),
                                             (G.adj[w] & vmask).bit_count()),
                                        key(w)))

    if comb(len(order), m_prime) <= _TINY_ENUM:
        for chosen in combinations(order, m_prime):
            iu, iv = umask, vmask
            for w in chosen:
                iu &= G.adj[w]
                iv &= G.adj[w]
                if iu.bit_count() < m_prime or iv.bit_count() < m_prime:
                    break
            else:
                return finish(chosen, iu, iv)
        return None  # the filtered pool is exhaustive for valid W' members

    nodes = 0

    def dfs(start: int, chosen: list[int], iu: int, iv: int):
        nonlocal nodes
        if len(chosen) == m_prime:
            return finish(chosen, iu, iv)
        for idx in range(start, len(order)):
            if node_budget is not None and nodes >= node_budget:
                return None
            nodes += 1
            w = order[idx]
            nu = iu & G.adj[w]
            nv = iv & G.adj[w]
            if nu.bit_count() < m_prime or nv.bit_count() < m_prime:
                continue
            res = dfs(idx + 1, chosen + [w], nu, nv)
            if res is not None:
                return res
        return None

    found = dfs(0, [], umask, vmask)
    if found is not None:
        return found

    # biclique fallback: pick W' against U first, then check the V side
    req_pool = list(order)
    for _ in range(20):
        if len(req_pool) < m_prime:
            return None
        got = find_biclique(BicliqueRequest.of(G, set(u_list), set(req_pool), m_prime),
                            node_budget)
        if got is None:
            return None
        u_side, w_side = got
        iv = vmask
        for w in w_side:
            iv &= G.adj[w]
        if iv.bit_count() >= m_prime:
            v_side = sorted(sorted(bits_list(iv), key=key)[:m_prime])
            assert is_complete_bipartite(G, v_side, w_side).status == PASS
            return tuple(u_side), tuple(v_side), tuple(w_side)
        req_pool.remove(w_side[0])
    return None


def _bucket_reduced_graph(Gp: Graph, root_pool: Sequence[int], outside_pool: Sequence[int],
                          s: int, eps: float, samples: int, seed: int) -> Graph | None:
    """Sample inheriting s-sets with exactly one root vertex and return the
    most frequent labelled induced graph (root labelled 0, the rest by
    ascending id)."""
    spec = PropertySpec(Gp, s, eps, ABSOLUTE)
    counts: Counter = Counter()
    out_sorted = sorted(outside_pool)
    root_sorted = sorted(root_pool)
    if len(out_sorted) < s - 1 or not root_sorted:
        return None
    for i in range(samples):
        rng = spawn(seed, "rooted-bucket", i)
        u = root_sorted[rng.randrange(len(root_sorted))]
        rest = sorted(draw_subset(rng, out_sorted, s - 1))
        S = [u] + rest
        if not inherits_degree(spec, S):
            continue
        bits = 0
        pos = 0
        for a in range(s):
            for b in range(a + 1, s):
                if Gp.has_edge(S[a], S[b]):
                    bits |= 1 << pos
                pos += 1
        counts[bits] += 1
    if not counts:
        return None
    best_bits = min(counts, key=lambda k: (-counts[k], k))
    edges = []
    pos = 0
    for a in range(s):
        for b in range(a + 1, s):
            if (best_bits >> pos) & 1:
                edges.append((a, b))
            pos += 1
    return Graph.from_edges(s, edges)


def rooted_blowup(G: Graph, V: Iterable[int], s: int, eps: float, t: int, *,
                  avoid: int = 0, seed: int = 0, samples: int = 2000,
                  restart_budget: int = 50) -> Blowup | None:
    """Blow-up rooted in V: one cluster inside V, the rest outside it.

    Edges inside V are deleted first so the root cluster never leans on
    them. The reduced graph is chosen by sampling inheriting s-sets with
    exactly one root vertex and taking the most frequent labelled shape;
    copies of the rootless pattern are then aligned with root vertices by a
    biclique on the extension graph. A single-vertex V short-circuits to a
    common-neighbour extension: the root plus a complete (s-1)-partite
    blow-up inside its neighbourhood.
    """
    if s < 3:
        raise ValueError("s must be at least 3")
    v_list = sorted(V)
    if not v_list:
        raise ValueError("empty root set")
    vmask = mask_from(v_list)

    if len(v_list) == 1:
        u = v_list[0]
        pattern = Graph.complete(s - 1)
        inner = find_blowup(G, pattern, t,
                            avoid=avoid | vmask | ~G.adj[u],
                            restart_budget=restart_budget, seed=seed)
        if inner is None:
            return None
        clusters = [frozenset({u})] + list(inner.family.clusters)
        fam = SetFamily(tuple(clusters), BALANCE_QUASI, m=t, eta=0.0)
        blow = Blowup(Graph.complete(s), fam)
        verdict = verify_blowup_hosted(G, blow)
        if verdict.status != PASS:  # pragma: no cover
            raise AssertionError(f"rooted extension failed self check: {verdict}")
        return blow

    if len(v_list) < t:
        raise ValueError("root set smaller than t")
    Gp = G.without_edges_inside(vmask)
    outside = [v for v in range(G.n) if not (vmask >> v) & 1 and not (avoid >> v) & 1]
    R = _bucket_reduced_graph(Gp, v_list, outside, s, eps, samples, seed)
    if R is None:
        return None
    # rootless pattern, labels shifted down by one
    rp_edges = [(a - 1, b - 1) for a, b in R.edges() if a != 0 and b != 0]
    R_prime = Graph.from_edges(s - 1, rp_edges)
    root_nbrs = bits_list(R.adj[0])

    for t_inner in (2 * t, t):
        inner = find_blowup(Gp, R_prime, t_inner, avoid=avoid | vmask,
                            restart_budget=restart_budget, seed=seed)
        if inner is None:
            continue
        cols = [sorted(c) for c in inner.family.clusters]
        copies = [tuple(cols[j][i] for j in range(s - 1)) for i in range(t_inner)]
        # extension graph: root u joins copy i when u extends it to R
        aux_n = len(v_list) + len(copies)
        aux_edges = []
        for ui, u in enumerate(v_list):
            for ci, copy in enumerate(copies):
                if all(Gp.has_edge(u, copy[j - 1]) for j in root_nbrs):
                    aux_edges.append((ui, len(v_list) + ci))
        aux = Graph.from_edges(aux_n, aux_edges)
        got = find_biclique(BicliqueRequest.of(
            aux, set(range(len(v_list))), set(range(len(v_list), aux_n)), t))
        if got is None:
            continue
        root_idx, copy_idx = got
        root_cluster = frozenset(v_list[i] for i in root_idx)
        chosen = [copies[i - len(v_list)] for i in copy_idx]
        clusters = [root_cluster] + [frozenset(c[j] for c in chosen)
                                     for j in range(s - 1)]
        fam = SetFamily(tuple(clusters), BALANCE_EXACT, m=t)
        blow = Blowup(R, fam)
        verdict = verify_blowup_hosted(Gp, blow)
        if verdict.status != PASS:  # pragma: no cover
            raise AssertionError(f"rooted blow-up failed self check: {verdict}")
        return blow
    return None
