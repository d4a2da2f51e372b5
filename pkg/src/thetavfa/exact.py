"""Exact stable-set oracles, clique enumeration and instance preprocessing."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterable

import networkx as nx

from .graph import WEIGHT_ATOL, GraphError, StableSet, SubgraphMap, WeightedGraph, induced_subgraph


class InstanceTooLarge(GraphError):
    pass


class CliqueBudgetExceeded(RuntimeError):
    pass


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


class _BranchAndBound:
    """Include-first DFS over vertices in index order with a clique-cover bound.

    Only strict improvements replace the incumbent, so the first optimum met
    in DFS order (the lexicographically smallest one) is returned.
    """

    def __init__(self, g: WeightedGraph, within: int, tol: float):
        self.w = [float(x) for x in g.weights]
        self.nb = g.masks
        self.tol = tol
        self.best_w = -1.0
        self.best: list[int] = []
        self.unit = all(x == 1.0 for x in self.w)
        # bound colouring visits heavy vertices first
        self.by_weight = sorted(range(g.n), key=lambda v: (-self.w[v], v))
        self.root = within

    def bound(self, cand: int) -> float:
        w, nb = self.w, self.nb
        cliques: list[int] = []
        total = 0.0
        for v in self.by_weight:
            if not (cand >> v) & 1:
                continue
            nv = nb[v]
            for k, c in enumerate(cliques):
                if c & nv == c:
                    cliques[k] = c | (1 << v)
                    break
            else:
                cliques.append(1 << v)
                total += w[v]
        return total

    def run(self) -> tuple[list[int], float]:
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 10000))
        try:
            self._expand(self.root, [], 0.0)
        finally:
            sys.setrecursionlimit(limit)
        return self.best, max(self.best_w, 0.0)

    def _expand(self, cand: int, cur: list[int], cur_w: float) -> None:
        nb, w = self.nb, self.w
        forced = []
        # vertices with no candidate neighbour belong to every optimum below this node
        for v in _bits(cand):
            if not nb[v] & cand:
                forced.append(v)
        if forced:
            for v in forced:
                cand &= ~(1 << v)
                cur_w += w[v]
            cur = sorted(cur + forced)
        if not cand:
            if cur_w > self.best_w + self.tol:
                self.best_w, self.best = cur_w, sorted(cur)
            return
        if cur_w + self.bound(cand) <= self.best_w + self.tol:
            return
        v = (cand & -cand).bit_length() - 1
        self._expand(cand & ~nb[v] & ~(1 << v), cur + [v], cur_w + w[v])
        self._expand(cand & ~(1 << v), cur, cur_w)


def _dominated(g: WeightedGraph, within: int) -> int:
    """Vertices of ``within`` that can be dropped without changing the lexicographic optimum.

    ``v`` is dropped when an adjacent ``u`` has ``N[u] ⊆ N[v]`` and either a
    larger weight, or an equal weight and a smaller index.
    """
    drop = 0
    nb = g.masks
    w = g.weights
    for v in _bits(within):
        closed_v = (nb[v] | (1 << v)) & within
        for u in _bits(nb[v] & within):
            if drop >> u & 1:
                continue
            closed_u = (nb[u] | (1 << u)) & within
            if closed_u & ~closed_v:
                continue
            if w[u] > w[v] + WEIGHT_ATOL or (abs(w[u] - w[v]) <= WEIGHT_ATOL and u < v):
                drop |= 1 << v
                break
    return drop


def exact_mwis_bruteforce(
    g: WeightedGraph,
    within: Iterable[int] | None = None,
    limit: int = 40,
    tol: float = WEIGHT_ATOL,
) -> StableSet:
    """Provably maximum weight stable set of ``g`` (or of ``g|within``).

    Branch and bound; raises :class:`InstanceTooLarge` above ``limit``
    vertices.  Among optimal sets the lexicographically smallest sorted
    tuple is returned.
    """
    mask = (1 << g.n) - 1 if within is None else sum(1 << int(v) for v in set(within))
    size = _popcount(mask)
    if size > limit:
        raise InstanceTooLarge(f"{size} vertices exceeds brute-force limit {limit}")
    mask &= ~_dominated(g, mask)
    best, _ = _BranchAndBound(g, mask, tol).run()
    return StableSet.of(g, best)


def stability_number(g: WeightedGraph, within: Iterable[int] | None = None, limit: int = 40) -> float:
    """Weighted stability number ``alpha(G|within)``."""
    if within is not None:
        within = list(within)
        if not within:
            return 0.0
    return exact_mwis_bruteforce(g, within, limit).weight


def optimal_vertices(g: WeightedGraph, within: Iterable[int] | None = None, limit: int = 40,
                     tol: float = 1e-7) -> frozenset[int]:
    """Union of all maximum weight stable sets of ``g|within``."""
    verts = set(range(g.n)) if within is None else set(within)
    alpha = stability_number(g, verts, limit)
    out = set()
    for i in verts:
        rest = verts - g.neighbors(i) - {i}
        if g.weights[i] + stability_number(g, rest, limit) >= alpha - tol:
            out.add(i)
    return frozenset(out)


def enumerate_cliques(g: WeightedGraph, budget: int = 200_000) -> list[tuple[int, ...]]:
    """All maximal cliques (Bron-Kerbosch with pivoting), each sorted, in sorted order."""
    nb = g.masks
    out: list[tuple[int, ...]] = []

    def expand(r: list[int], p: int, x: int) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            if len(out) > budget:
                raise CliqueBudgetExceeded(f"more than {budget} maximal cliques")
            return
        pivot = max(_bits(p | x), key=lambda u: _popcount(p & nb[u]))
        for v in list(_bits(p & ~nb[pivot])):
            expand(r + [v], p & nb[v], x & nb[v])
            p &= ~(1 << v)
            x |= 1 << v

    if g.n:
        expand([], (1 << g.n) - 1, 0)
    return sorted(out)


@dataclass(frozen=True)
class Reduction:
    """Outcome of :func:`preprocess`.

    ``forced`` holds vertices (in the input graph's numbering) selected by
    the isolated-vertex / optimal-leaf rule; ``components`` are the
    remaining connected pieces as induced subgraphs with their maps.
    """

    forced: tuple[int, ...]
    components: tuple[tuple[WeightedGraph, SubgraphMap], ...]

    @property
    def residual(self) -> frozenset[int]:
        return frozenset(v for _, mp in self.components for v in mp.to_parent)


def optimal_leaf_or_isolated(g: WeightedGraph, alive: set[int]) -> int | None:
    """Lowest-index vertex of ``G|alive`` that is isolated or an optimal leaf."""
    w = g.weights
    for v in sorted(alive):
        live_nb = g.neighbors(v) & alive
        if not live_nb:
            return v
        if len(live_nb) == 1:
            (u,) = live_nb
            if w[v] >= w[u] - WEIGHT_ATOL:
                return v
    return None


def preprocess(g: WeightedGraph) -> Reduction:
    """Select isolated vertices and optimal leaves, then split into components."""
    alive = set(range(g.n))
    forced = []
    while True:
        v = optimal_leaf_or_isolated(g, alive)
        if v is None:
            break
        forced.append(v)
        alive -= g.neighbors(v) | {v}
    comps = tuple(induced_subgraph(g, c) for c in g.connected_components(alive))
    return Reduction(tuple(sorted(forced)), comps)


def exact_mwis_generalized_split(g: WeightedGraph, certificate) -> StableSet:
    """Maximum weight stable set using a generalized-split certificate.

    Unipolar: at most one centre vertex and one vertex per cluster.
    Co-unipolar: a stable set is a clique of the unipolar complement, which
    lives inside centre + one cluster; that piece is co-bipartite, so the
    weighted problem reduces to a minimum cut.
    """
    w = g.weights
    centre = sorted(certificate.center)
    clusters = [sorted(c) for c in certificate.clusters]
    if certificate.kind == "unipolar":
        best = [max(c, key=lambda v: (w[v], -v)) for c in clusters]
        best_w = g.weight_of(best)
        for a in centre:
            pick = [a]
            for c in clusters:
                free = [v for v in c if not g.has_edge(a, v)]
                if free:
                    pick.append(max(free, key=lambda v: (w[v], -v)))
            pw = g.weight_of(pick)
            if pw > best_w + WEIGHT_ATOL:
                best, best_w = pick, pw
        return StableSet.of(g, best)
    if certificate.kind != "co-unipolar":
        raise GraphError(f"unknown certificate kind {certificate.kind!r}")
    best, best_w = list(centre), g.weight_of(centre)
    for c in clusters:
        pick = _bipartite_mwis(g, centre, c)
        pw = g.weight_of(pick)
        if pw > best_w + WEIGHT_ATOL:
            best, best_w = pick, pw
    return StableSet.of(g, best)


def _bipartite_mwis(g: WeightedGraph, left: list[int], right: list[int]) -> list[int]:
    net = nx.DiGraph()
    net.add_node("s")
    net.add_node("t")
    for a in left:
        net.add_edge("s", ("L", a), capacity=float(g.weights[a]))
        for b in g.neighbors(a):
            if b in right:
                net.add_edge(("L", a), ("R", b))  # missing capacity means infinite
    rset = set(right)
    for b in right:
        net.add_edge(("R", b), "t", capacity=float(g.weights[b]))
    _, (s_side, _) = nx.minimum_cut(net, "s", "t")
    cover = {a for a in left if ("L", a) not in s_side} | {b for b in rset if ("R", b) in s_side}
    return sorted((set(left) | rset) - cover)
