"""Lower-regular tuples, hypergraph matchings, and almost perfect tilings.

The quantified regularity notion: an s-tuple of disjoint parts is
(rho, d)-lower-regular when every choice of sub-parts of relative size at
least rho spans partite density at least d - rho. Complete certification
runs through an averaging reduction: a violating choice of large sub-parts
exists exactly when one of minimal size ceil(rho |V_i|) does, so only
exact-size subsets are enumerated and the budget is charged on that reduced
state count. Witness searches, density estimates on oracle-backed
hypergraphs, and the partition retries of the matcher all derive their
randomness from per-call seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Iterable, Sequence

import numpy as np

from .core import FAIL, Hypergraph, PASS, UNKNOWN, Verdict
from .seeding import draw_subset, mix, spawn


def spawn_seed(seed: int, salt: int) -> int:
    return mix(seed, "check-seed", salt)

EXHAUSTIVE = "EXHAUSTIVE"
SAMPLED = "SAMPLED"
UNCERTIFIED = "UNCERTIFIED"

_STATE_BUDGET = 10 ** 7
_EPS = 1e-9


class IncrementStalled(Exception):
    """A tiling increment could not make progress; diagnostics attached."""

    def __init__(self, round_index: int, stage: str, details: dict | None = None):
        self.round_index = round_index
        self.stage = stage
        self.details = details or {}
        super().__init__(f"increment stalled at round {round_index}: {stage}")


@dataclass(frozen=True)
class RegularTuple:
    """Ordered disjoint parts with the certification they were given."""

    parts: tuple[frozenset, ...]
    rho: float
    d: float
    mode: str = UNCERTIFIED

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    def total(self) -> int:
        return sum(len(p) for p in self.parts)


@dataclass(frozen=True)
class Tiling:
    """Vertex-disjoint regular tuples plus the covered vertex count."""

    tuples: tuple[RegularTuple, ...]
    covered: int
    telemetry: tuple = field(default=(), compare=False)

    def validate(self) -> Verdict:
        seen: set[int] = set()
        total = 0
        for ti, tup in enumerate(self.tuples):
            for part in tup.parts:
                if seen & part:
                    return Verdict(FAIL, "tuples overlap", ti)
                seen |= part
                total += len(part)
        if total != self.covered:
            return Verdict(FAIL, "covered count mismatch", (total, self.covered))
        return Verdict(PASS)


@dataclass(frozen=True)
class Matching:
    """Disjoint s-edges of the host hypergraph."""

    edges: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class TilingParams:
    """Dials for the tiling machinery.

    Derived defaults follow the shrinking schedule: slack mu capped at 1/2,
    round densities d_i = (mu/16) / 2^i, epsilons half of that, and the
    retention rate gamma_i floored at gamma_floor since exp(-eps^(-2s))
    underflows to zero at any realistic scale. block_size and fresh_size
    override the derived block dials for coarse runs.
    """

    s: int
    eta: float
    rho: float | None = None
    alpha: float = 0.25
    mu: float | None = None
    gamma_floor: float = 0.05
    t_max: int | None = None
    block_size: int | None = None
    fresh_size: int | None = None
    d0: float | None = None
    check_trials: int = 10_000
    density_trials: int = 512
    partition_retries: int = 50
    exchange_budget: int = 200_000
    check_mode: str = "AUTO"
    seed: int = 0

    def mu_value(self) -> float:
        return self.mu if self.mu is not None else min(16.0 * self.eta, 0.5)

    def rho_value(self) -> float:
        return self.rho if self.rho is not None else self.eta / 2.0

    def rounds(self) -> int:
        return self.t_max if self.t_max is not None else max(1, math.ceil(self.eta ** -2))

    def d_at(self, i: int) -> float:
        base = self.d0 if self.d0 is not None else self.mu_value() / 16.0
        return base / (2 ** i)

    def eps_at(self, i: int) -> float:
        return self.d_at(i) / 2.0

    def gamma_at(self, i: int) -> float:
        eps = self.eps_at(i)
        try:
            raw = math.exp(-(eps ** (-2 * self.s)))
        except OverflowError:
            raw = 0.0
        return max(raw, self.gamma_floor)


# -- densities ----------------------------------------------------------


def _part_maps(parts: Sequence[Iterable[int]]):
    lists = [sorted(p) for p in parts]
    index = {}
    for pi, vs in enumerate(lists):
        for vi, v in enumerate(vs):
            if v in index:
                raise ValueError("parts overlap")
            index[v] = (pi, vi)
    return lists, index


def _partite_edges(P: Hypergraph, parts: Sequence[Iterable[int]]):
    """Explicit edges meeting every part exactly once, as index tuples."""
    lists, index = _part_maps(parts)
    k = len(lists)
    out = []
    for e in P.edge_set:
        slots = [None] * k
        ok = True
        for v in e:
            hit = index.get(v)
            if hit is None:
                ok = False
                break
            pi, vi = hit
            if slots[pi] is not None:
                ok = False
                break
            slots[pi] = vi
        if ok and all(s is not None for s in slots):
            out.append(tuple(slots))
    return lists, out


def tuple_density(P: Hypergraph, parts: Sequence[Iterable[int]], *,
                  trials: int | None = None, seed: int = 0) -> float:
    """Partite edge density of an ordered tuple of disjoint parts.

    Explicit hypergraphs are counted exactly. Oracle-backed ones need a
    trial count and return the sampled fraction of the part product that
    the membership oracle accepts.
    """
    if len(parts) != P.s:
        raise ValueError("tuple arity must equal the uniformity")
    lists = [sorted(p) for p in parts]
    if any(len(p) == 0 for p in lists):
        raise ValueError("empty part")
    space = 1
    for p in lists:
        space *= len(p)
    if P.explicit:
        _, edges = _partite_edges(P, lists)
        return len(edges) / space
    if trials is None:
        raise ValueError("oracle-backed density needs a trial count")
    hits = 0
    for t in range(trials):
        rng = spawn(seed, "tuple-density", t)
        pick = [p[rng.randrange(len(p))] for p in lists]
        if len(set(pick)) == len(pick) and P.has_edge(pick):
            hits += 1
    return hits / trials


def _materialized(P: Hypergraph, parts: Sequence[Sequence[int]]) -> Hypergraph:
    """Explicit copy of an oracle hypergraph restricted to the given parts."""
    lists = [sorted(p) for p in parts]
    space = 1
    for p in lists:
        space *= len(p)
    if space > 10 ** 6:
        raise ValueError("oracle too large to materialize; use SAMPLED")
    edges = []
    universe = sorted(set().union(*[set(p) for p in lists]))
    for pick in product(*lists):
        if len(set(pick)) == len(pick) and P.has_edge(pick):
            edges.append(tuple(sorted(pick)))
    return Hypergraph.from_edges(P.s, universe, set(edges))


# -- the lower-regularity check -----------------------------------------


def _reduced_states(sizes: Sequence[int], ks: Sequence[int]) -> int:
    states = 1
    for m, k in zip(sizes[1:], ks[1:]):
        states *= math.comb(m, k)
    return states


def _exhaustive_check(P: Hypergraph, lists, ks, rho, d) -> Verdict:
    """Complete certification through the exact-size averaging reduction."""
    s = len(lists)
    thresh_density = d - rho
    total_sub = 1
    for k in ks:
        total_sub *= k

    if s == 3:
        m1, m2, m3 = (len(p) for p in lists)
        _, edges = _partite_edges(P, lists)
        E = np.zeros((m1, m2, m3), dtype=np.int8)
        for a, b, c in edges:
            E[a, b, c] = 1
        subs2 = list(combinations(range(m2), ks[1]))
        subs3 = list(combinations(range(m3), ks[2]))
        I2 = np.zeros((len(subs2), m2), dtype=np.float32)
        for i, sub in enumerate(subs2):
            I2[i, list(sub)] = 1.0
        I3 = np.zeros((len(subs3), m3), dtype=np.float32)
        for i, sub in enumerate(subs3):
            I3[i, list(sub)] = 1.0
        # T[v, j, k] = partite edges at part-1 vertex v into (subs2[j], subs3[k]);
        # counts stay far below 2^24 so float32 is exact
        T = np.empty((m1, len(subs2), len(subs3)), dtype=np.float32)
        for v in range(m1):
            T[v] = I2 @ E[v].astype(np.float32) @ I3.T
        bottom = np.sort(T, axis=0)[: ks[0]].sum(axis=0)
        limit = thresh_density * total_sub - _EPS
        viol = np.argwhere(bottom < limit)
        if viol.size == 0:
            return Verdict(PASS)
        j, k = (int(x) for x in viol[0])
        col = T[:, j, k]
        order = np.argsort(col, kind="stable")[: ks[0]]
        w1 = tuple(lists[0][int(i)] for i in sorted(order.tolist()))
        w2 = tuple(lists[1][i] for i in subs2[j])
        w3 = tuple(lists[2][i] for i in subs3[k])
        return Verdict(FAIL, "violating sub-tuple", (w1, w2, w3))

    # generic arity: nested enumeration with incremental edge filtering
    _, edges = _partite_edges(P, lists)
    m1 = len(lists[0])
    limit = thresh_density * total_sub - _EPS

    def rec(depth: int, chosen: list[tuple[int, ...]], pool):
        if depth == s:
            counts = [0] * m1
            for e in pool:
                counts[e[0]] += 1
            low = sorted(range(m1), key=lambda v: (counts[v], v))[: ks[0]]
            if sum(counts[v] for v in low) < limit:
                w1 = tuple(lists[0][v] for v in sorted(low))
                rest = tuple(tuple(lists[i][x] for x in chosen[i - 1])
                             for i in range(1, s))
                return (w1,) + rest
            return None
        for sub in combinations(range(len(lists[depth])), ks[depth]):
            keep = set(sub)
            sub_pool = [e for e in pool if e[depth] in keep]
            res = rec(depth + 1, chosen + [sub], sub_pool)
            if res is not None:
                return res
        return None

    wit = rec(1, [], edges)
    if wit is None:
        return Verdict(PASS)
    return Verdict(FAIL, "violating sub-tuple", wit)


def _subset_density(P: Hypergraph, subs: Sequence[Sequence[int]], *,
                    trials: int, seed: int) -> float:
    if P.explicit:
        return tuple_density(P, subs)
    return tuple_density(P, subs, trials=trials, seed=seed)


def check_lower_regular(P: Hypergraph, parts: Sequence[Iterable[int]],
                        rho: float, d: float, mode: str = EXHAUSTIVE, *,
                        trials: int = 10_000, density_trials: int = 512,
                        seed: int = 0, budget: int = _STATE_BUDGET) -> Verdict:
    """Is the tuple (rho, d)-lower-regular?

    EXHAUSTIVE returns PASS or FAIL with a witness, never UNKNOWN; the
    reduced enumeration must fit the state budget. SAMPLED hunts witnesses
    (lowest partite degree first, then uniform draws) and returns FAIL with
    a confirmed witness or UNKNOWN, never PASS.
    """
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie in (0, 1)")
    lists = [sorted(p) for p in parts]
    if len(lists) != P.s:
        raise ValueError("tuple arity must equal the uniformity")
    if any(len(p) == 0 for p in lists):
        raise ValueError("empty part")
    ks = [max(1, math.ceil(rho * len(p) - _EPS)) for p in lists]

    if mode == EXHAUSTIVE:
        host = P if P.explicit else _materialized(P, lists)
        if _reduced_states([len(p) for p in lists], ks) > budget:
            raise ValueError("exhaustive budget exceeded; use SAMPLED")
        return _exhaustive_check(host, lists, ks, rho, d)

    if mode != SAMPLED:
        raise ValueError(f"unknown mode {mode!r}")

    thresh = d - rho
    sub_space = 1
    for k in ks:
        sub_space *= k

    def confirmed(subs) -> bool:
        if P.explicit:
            return tuple_density(P, subs) < thresh - _EPS
        if sub_space > 10 ** 6:
            return False  # cannot confirm, refuse to report a FAIL
        hits = 0
        for pick in product(*[sorted(x) for x in subs]):
            if len(set(pick)) == len(pick) and P.has_edge(pick):
                hits += 1
        return hits / sub_space < thresh - _EPS

    def candidates():
        if P.explicit:
            # lowest partite degree vertices are the likeliest witnesses
            _, edges = _partite_edges(P, lists)
            degs = [dict((i, 0) for i in range(len(p))) for p in lists]
            for e in edges:
                for pi, vi in enumerate(e):
                    degs[pi][vi] += 1
            biased = []
            for pi, p in enumerate(lists):
                order = sorted(range(len(p)), key=lambda i: (degs[pi][i], i))
                biased.append([p[i] for i in order[: ks[pi]]])
            yield biased
        for t in range(trials):
            rng = spawn(seed, "regular-witness", t)
            yield [draw_subset(rng, p, k) for p, k in zip(lists, ks)]

    for ci, subs in enumerate(candidates()):
        if P.explicit:
            if confirmed(subs):
                return Verdict(FAIL, "violating sub-tuple",
                               tuple(tuple(sorted(x)) for x in subs))
            continue
        est = tuple_density(P, subs, trials=max(64, density_trials // 4),
                            seed=spawn_seed(seed, ci))
        if est < thresh + 0.05 and confirmed(subs):
            return Verdict(FAIL, "violating sub-tuple",
                           tuple(tuple(sorted(x)) for x in subs))
    return Verdict(UNKNOWN, "no witness found")


def find_lower_regular_tuple(P: Hypergraph, parts: Sequence[Iterable[int]],
                             rho: float, d: float, *, mode: str = "AUTO",
                             trials: int = 2_000, density_trials: int = 512,
                             seed: int = 0, telemetry: list | None = None,
                             max_iters: int = 60) -> RegularTuple | None:
    """Shrink toward a certified (rho, d)-lower-regular tuple.

    The input tuple must already have density at least d. Each round either
    certifies the current tuple or takes a violating witness, keeps the
    exact-size witness blocks, partitions the rest of every part into
    blocks of the same size, and recurses into the densest block tuple; by
    averaging that density never drops. NONE only when parts would shrink
    below s vertices.
    """
    lists = [sorted(p) for p in parts]
    dens = _subset_density(P, lists, trials=density_trials, seed=spawn_seed(seed, 1))
    if dens < d - _EPS:
        raise ValueError("density precondition")

    for it in range(max_iters):
        sizes = [len(p) for p in lists]
        ks = [max(1, math.ceil(rho * m - _EPS)) for m in sizes]
        use_mode = mode
        if mode == "AUTO":
            small = _reduced_states(sizes, ks) <= _STATE_BUDGET
            space = 1
            for m in sizes:
                space *= m
            use_mode = EXHAUSTIVE if small and (P.explicit or space <= 10 ** 6) else SAMPLED
        verdict = check_lower_regular(P, lists, rho, d, use_mode,
                                      trials=trials, density_trials=density_trials,
                                      seed=spawn_seed(seed, 100 + it))
        if verdict.status == PASS:
            return RegularTuple(tuple(frozenset(p) for p in lists), rho, d, EXHAUSTIVE)
        if verdict.status == UNKNOWN:
            return RegularTuple(tuple(frozenset(p) for p in lists), rho, d, SAMPLED)

        witness = verdict.witness
        if any(k < P.s for k in ks):
            return None
        block_lists = []
        for pi, p in enumerate(lists):
            wset = set(witness[pi])
            rest = [v for v in p if v not in wset]
            blocks = [sorted(witness[pi])]
            k = ks[pi]
            for off in range(0, len(rest) - k + 1, k):
                blocks.append(rest[off: off + k])
            block_lists.append(blocks)
        best = None
        best_dens = -1.0
        for combo_idx, combo in enumerate(product(*block_lists)):
            cd = _subset_density(P, combo, trials=density_trials,
                                 seed=spawn_seed(seed, 10_000 + 97 * it + combo_idx))
            if cd > best_dens + _EPS:
                best, best_dens = combo, cd
        if telemetry is not None:
            telemetry.append({"iteration": it, "current_density": dens,
                              "selected_density": best_dens,
                              "part_size": sizes[0]})
        lists = [sorted(b) for b in best]
        dens = best_dens
    return None


# -- hypergraph perfect matching ----------------------------------------


def _partite_info(P: Hypergraph, parts: Sequence[Sequence[int]]):
    part_of = {}
    for pi, p in enumerate(parts):
        for v in p:
            part_of[v] = pi
    s = len(parts)
    partite = []
    for e in P.edge_set:
        idx = [part_of.get(v) for v in e]
        if None in idx or sorted(idx) != list(range(s)):
            continue
        by_part = [None] * s
        for v in e:
            by_part[part_of[v]] = v
        partite.append(tuple(by_part))
    return partite


def hypergraph_perfect_matching(P: Hypergraph, *, eps: float = 0.1, seed: int = 0,
                                partition_retries: int = 50,
                                exchange_budget: int = 200_000) -> Matching | None:
    """Perfect matching in an explicit uniform hypergraph.

    Strategy: random equipartitions are retried until the partite minimum
    degree clears (1 - 1/s + eps/2) m^(s-1), falling back to the best seen;
    a greedy partite matching is padded with flagged placeholder edges, and
    placeholders are then eliminated by an exchange step that redistributes
    s-1 matched edges plus the uncovered vertices into s real edges. Every
    partition that fails to finish triggers a retry; None after the budget.
    """
    if not P.explicit:
        raise ValueError("matching needs explicit edges")
    uni = sorted(P.universe)
    n = len(uni)
    s = P.s
    if n % s != 0:
        raise ValueError("divisibility: s must divide the vertex count")
    m = n // s
    if m == 0:
        return Matching(())

    need = (1.0 - 1.0 / s + eps / 2.0) * (m ** (s - 1))
    attempts = []
    for r in range(partition_retries):
        rng = spawn(seed, "matching-partition", r)
        order = draw_subset(rng, uni, n)
        parts = [sorted(order[i * m:(i + 1) * m]) for i in range(s)]
        partite = _partite_info(P, parts)
        deg = {v: 0 for v in uni}
        for e in partite:
            for v in e:
                deg[v] += 1
        dmin = min(deg.values())
        attempts.append((dmin, r, parts, partite))
        if dmin >= need:
            break
    attempts.sort(key=lambda a: (-a[0], a[1]))

    for dmin, _r, parts, partite in attempts:
        got = _match_one_partition(P, parts, partite, exchange_budget)
        if got is not None:
            edges = tuple(sorted(tuple(sorted(e)) for e in got))
            flat = [v for e in edges for v in e]
            assert len(set(flat)) == n and all(e in P.edge_set for e in edges)
            return Matching(edges)
    return None


def _match_one_partition(P: Hypergraph, parts, partite, exchange_budget):
    s = len(parts)
    partite_sorted = sorted(partite)
    used: set[int] = set()
    matched: list[tuple] = []
    for e in partite_sorted:
        if used.isdisjoint(e):
            matched.append(e)
            used.update(e)
    uncovered = [[v for v in p if v not in used] for p in parts]
    dummies = []
    for i in range(len(uncovered[0])):
        dummies.append(tuple(uncovered[pi][i] for pi in range(s)))
    pool = [(e, False) for e in matched] + [(e, True) for e in dummies]

    examined = 0
    while any(flag for _e, flag in pool):
        target = next(e for e, flag in pool if flag)
        rest = [(e, flag) for e, flag in pool if e != target]
        fixed = None
        for X in permutations(rest, s - 1):
            examined += 1
            if examined > exchange_budget:
                return None
            new_edges = []
            good = True
            for i in range(s):
                f = [target[i]]
                for j in range(1, s):
                    f.append(X[j - 1][0][(i + j) % s])
                if tuple(sorted(f)) not in P.edge_set:
                    good = False
                    break
                new_edges.append(tuple(f))
            if good:
                fixed = (set(x[0] for x in X), new_edges)
                break
        if fixed is None:
            return None
        removed, new_edges = fixed
        pool = [(e, flag) for e, flag in rest if e not in removed]
        pool.extend((e, False) for e in new_edges)
    return [e for e, _flag in pool]


# -- tiling increments ---------------------------------------------------


def _chunk(seq: Sequence[int], size: int) -> list[list[int]]:
    out = []
    for off in range(0, len(seq) - size + 1, size):
        out.append(list(seq[off: off + size]))
    return out


def tiling_increment(P: Hypergraph, Q1: Tiling, params: TilingParams,
                     round_index: int = 0) -> Tiling:
    """One densification round: block the vertex set, match dense block
    s-sets in a reduced hypergraph, then pull certified fresh tuples out of
    every matched block group and recycle the previous tuples' remainders.

    Raises IncrementStalled when the reduced matching or the block
    construction cannot proceed; the caller decides how to surface that.
    """
    s = params.s
    mu = params.mu_value()
    nu = mu / 16.0
    rho = params.rho_value()
    d_i = params.d_at(round_index)
    uni = sorted(P.universe)
    n = len(uni)

    covered_old = set()
    for tup in Q1.tuples:
        for part in tup.parts:
            covered_old |= part

    if params.block_size is not None:
        m2 = params.block_size
    else:
        base_scale = n if not Q1.tuples else min(min(tup.sizes()) for tup in Q1.tuples)
        m2 = max(s, int((mu / 8.0) * base_scale))
    if m2 < 1:
        raise IncrementStalled(round_index, "degenerate block size", {"m2": m2})

    blocks: list[list[int]] = []
    for tup in Q1.tuples:
        for part in tup.parts:
            blocks.extend(_chunk(sorted(part), m2))
    outside = [v for v in uni if v not in covered_old]
    blocks.extend(_chunk(outside, m2))
    drop = len(blocks) % s
    if drop:
        blocks = blocks[: len(blocks) - drop]
    r = len(blocks)
    if r < s:
        raise IncrementStalled(round_index, "no blocks", {"blocks": r, "m2": m2})
    if math.comb(r, s) > 20_000:
        raise IncrementStalled(round_index, "reduced graph too large", {"blocks": r})

    # reduced hypergraph: a block s-set is an edge when its partite edge
    # count clears 4 nu m2^s
    edge_threshold = 4.0 * nu
    reduced_edges = []
    for combo in combinations(range(r), s):
        sub = [blocks[i] for i in combo]
        dens = _subset_density(P, sub, trials=params.density_trials,
                               seed=mix(params.seed, "reduced-edge", *combo))
        if dens >= edge_threshold - _EPS:
            reduced_edges.append(combo)
    R = Hypergraph.from_edges(s, range(r), reduced_edges)

    deg_floor = (1.0 - 1.0 / s + mu / 2.0) * math.comb(r - 1, s - 1)
    reduced_min_deg = 0
    if reduced_edges:
        counts = {v: 0 for v in range(r)}
        for e in reduced_edges:
            for v in e:
                counts[v] += 1
        reduced_min_deg = min(counts.values())

    M = hypergraph_perfect_matching(R, eps=mu, seed=spawn_seed(params.seed, round_index),
                                    partition_retries=params.partition_retries,
                                    exchange_budget=params.exchange_budget)
    if M is None:
        raise IncrementStalled(round_index, "reduced matching", {
            "blocks": r, "reduced_edges": len(reduced_edges),
            "reduced_min_degree": reduced_min_deg, "degree_floor": deg_floor})

    fresh_size = params.fresh_size
    if fresh_size is None:
        beta = nu * params.eta / 2.0
        fresh_size = max(1, int(beta * m2))
    fresh_size = min(fresh_size, m2)

    fresh: list[RegularTuple] = []
    consumed: set[int] = set()
    for mi, medge in enumerate(M.edges):
        group = [sorted(blocks[b]) for b in medge]
        while True:
            unused = [[v for v in g if v not in consumed] for g in group]
            if any(len(u) < fresh_size for u in unused):
                break
            candidate = None
            for ci in range(8):
                rng = spawn(params.seed, "fresh-candidate", round_index, mi, len(fresh), ci)
                subs = [sorted(draw_subset(rng, u, fresh_size)) for u in unused]
                cd = _subset_density(P, subs, trials=params.density_trials,
                                     seed=spawn_seed(params.seed, 3_000 + ci))
                if cd >= d_i - _EPS:
                    candidate = subs
                    break
            if candidate is None:
                break
            got = find_lower_regular_tuple(
                P, candidate, rho, d_i, mode=params.check_mode,
                trials=params.check_trials,
                density_trials=params.density_trials,
                seed=spawn_seed(params.seed, 5_000 + mi))
            for sub in candidate:
                consumed.update(sub)
            if got is None:
                break
            fresh.append(got)

    recycled: list[RegularTuple] = []
    for tup in Q1.tuples:
        remains = [sorted(p - consumed) for p in tup.parts]
        m_rec = min(len(x) for x in remains)
        if m_rec < 1:
            continue
        trimmed = tuple(frozenset(x[:m_rec]) for x in remains)
        recycled.append(RegularTuple(trimmed, tup.rho, tup.d, UNCERTIFIED))

    tuples = tuple(fresh) + tuple(recycled)
    covered = sum(t.total() for t in tuples)
    if covered < Q1.covered:
        # never regress; keep the previous tiling if this round lost ground
        return Tiling(Q1.tuples, Q1.covered,
                      Q1.telemetry + ({"round": round_index, "no_gain": True},))
    tel = {"round": round_index, "d": d_i, "blocks": r,
           "reduced_edges": len(reduced_edges),
           "reduced_min_degree": reduced_min_deg,
           "degree_floor": deg_floor, "fresh": len(fresh),
           "recycled": len(recycled), "covered": covered}
    return Tiling(tuples, covered, Q1.telemetry + (tel,))


def almost_perfect_tiling(P: Hypergraph, params: TilingParams) -> Tiling:
    """Iterate increments until uncovered <= eta n or the round cap.

    A stalled increment is recorded in the telemetry with its round index
    and the surviving tiling is returned rather than raised away.
    """
    n = len(P.universe)
    target = params.eta * n
    Q = Tiling((), 0)
    for i in range(params.rounds()):
        try:
            Q = tiling_increment(P, Q, params, round_index=i)
        except IncrementStalled as stall:
            tel = Q.telemetry + ({"round": stall.round_index, "stalled": stall.stage,
                                  "details": stall.details},)
            return Tiling(Q.tuples, Q.covered, tel)
        if n - Q.covered <= target:
            break
    return Q
