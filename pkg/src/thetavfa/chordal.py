"""Chordality testing and exact stable sets on chordal and co-chordal graphs."""

from __future__ import annotations

from typing import Sequence

from .graph import GraphError, StableSet, WeightedGraph


def maximum_cardinality_search(g: WeightedGraph) -> list[int]:
    """Visit order of MCS (ties to the smallest vertex).

    The reverse of the visit order is a perfect elimination ordering
    whenever ``g`` is chordal.
    """
    n = g.n
    weight = [0] * n
    visited = [False] * n
    buckets: list[set[int]] = [set(range(n))]
    order = []
    top = 0
    for _ in range(n):
        while top > 0 and not buckets[top]:
            top -= 1
        v = min(buckets[top])
        buckets[top].discard(v)
        visited[v] = True
        order.append(v)
        for u in g.neighbors(v):
            if not visited[u]:
                buckets[weight[u]].discard(u)
                weight[u] += 1
                if weight[u] == len(buckets):
                    buckets.append(set())
                buckets[weight[u]].add(u)
                top = max(top, weight[u])
    return order


def is_perfect_elimination_ordering(g: WeightedGraph, order: Sequence[int]) -> bool:
    """True iff every vertex's later neighbours (in ``order``) form a clique."""
    if sorted(order) != list(range(g.n)):
        return False
    pos = {v: k for k, v in enumerate(order)}
    for v in order:
        later = [u for u in g.neighbors(v) if pos[u] > pos[v]]
        if not later:
            continue
        # checking against the earliest later neighbour suffices (Rose-Tarjan-Lueker)
        parent = min(later, key=pos.__getitem__)
        nb = g.neighbors(parent)
        if any(u != parent and u not in nb for u in later):
            return False
    return True


def is_chordal(g: WeightedGraph) -> tuple[bool, list[int] | None]:
    """Return ``(chordal, peo)``; ``peo`` is ``None`` when not chordal."""
    peo = maximum_cardinality_search(g)[::-1]
    if is_perfect_elimination_ordering(g, peo):
        return True, peo
    return False, None


def exact_mwis_chordal(g: WeightedGraph, peo: Sequence[int] | None = None) -> StableSet:
    """Maximum weight stable set of a chordal graph (Frank's two-pass sweep)."""
    if peo is None:
        ok, peo = is_chordal(g)
        if not ok:
            raise GraphError("graph is not chordal")
    elif not is_perfect_elimination_ordering(g, peo):
        raise GraphError("invalid perfect elimination ordering")
    pos = {v: k for k, v in enumerate(peo)}
    residual = g.weights.astype(float).copy()
    red = []
    for v in peo:
        if residual[v] > 0:
            red.append(v)
            for u in g.neighbors(v):
                if pos[u] > pos[v]:
                    residual[u] = max(0.0, residual[u] - residual[v])
    chosen: set[int] = set()
    for v in reversed(red):
        if not (g.neighbors(v) & chosen):
            chosen.add(v)
    return StableSet.of(g, chosen)


def exact_mwis_cochordal(g: WeightedGraph) -> StableSet:
    """Maximum weight stable set of ``g`` when its complement is chordal.

    Stable sets of ``g`` are cliques of the complement, and every maximal
    clique of a chordal graph is a vertex plus its later neighbours in a PEO.
    """
    h = g.complement()
    ok, peo = is_chordal(h)
    if not ok:
        raise GraphError("complement is not chordal")
    pos = {v: k for k, v in enumerate(peo)}
    best, best_w = (), -1.0
    for v in peo:
        clique = tuple(sorted([v] + [u for u in h.neighbors(v) if pos[u] > pos[v]]))
        w = g.weight_of(clique)
        if w > best_w + 1e-12:
            best, best_w = clique, w
    return StableSet.of(g, best)
