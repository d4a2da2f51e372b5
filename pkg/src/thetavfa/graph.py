"""Weighted simple graphs and stable sets.

A :class:`WeightedGraph` is immutable: vertices are ``0..n-1``, the edge
relation is stored as a tuple of neighbour frozensets, and the weights as a
read-only float64 array.  Everything else in the package consumes this type.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

WEIGHT_ATOL = 1e-9


class GraphError(ValueError):
    """Raised for malformed graph data."""


class WeightedGraph:
    """Undirected simple graph with strictly positive vertex weights.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of (int, int)
        Edge list with 0-based endpoints.  Duplicates (in either
        orientation) are merged; self-loops are rejected.
    weights : sequence of float, optional
        Vertex weights, all > 0.  Defaults to unit weights.
    labels : sequence of str, optional
        External vertex names, e.g. from an input file.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        weights: Sequence[float] | np.ndarray | None = None,
        labels: Sequence[str] | None = None,
    ):
        n = int(n)
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        adj: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            adj[i].add(j)
            adj[j].add(i)
        if weights is None:
            w = np.ones(n)
        else:
            w = np.array(weights, dtype=float).reshape(-1)
        if w.shape[0] != n:
            raise GraphError(f"expected {n} weights, got {w.shape[0]}")
        if n and not (np.all(np.isfinite(w)) and np.all(w > 0)):
            raise GraphError("vertex weights must be finite and strictly positive")
        w.setflags(write=False)
        if labels is not None and len(labels) != n:
            raise GraphError("label count does not match vertex count")
        self._n = n
        self._adj = tuple(frozenset(a) for a in adj)
        self._weights = w
        self._labels = tuple(str(s) for s in labels) if labels is not None else None

    # -- basic accessors -------------------------------------------------
    @property
    def n(self) -> int:
        return self._n

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    @cached_property
    def m(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def neighbors(self, i: int) -> frozenset[int]:
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as sorted ``(i, j)`` pairs with ``i < j``, in lexicographic order."""
        return tuple((i, j) for i in range(self._n) for j in sorted(self._adj[i]) if i < j)

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self._n, self._n), dtype=bool)
        for i, j in self.edges:
            a[i, j] = a[j, i] = True
        a.setflags(write=False)
        return a

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhoods as Python-int bitsets."""
        out = []
        for a in self._adj:
            mk = 0
            for j in a:
                mk |= 1 << j
            out.append(mk)
        return tuple(out)

    # -- derived graphs --------------------------------------------------
    def complement(self) -> "WeightedGraph":
        edges = [
            (i, j)
            for i in range(self._n)
            for j in range(i + 1, self._n)
            if j not in self._adj[i]
        ]
        return WeightedGraph(self._n, edges, self._weights, self._labels)

    def with_weights(self, weights) -> "WeightedGraph":
        return WeightedGraph(self._n, self.edges, weights, self._labels)

    def relabel(self, perm: Sequence[int]) -> "WeightedGraph":
        """Return the graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self._n)):
            raise GraphError("relabel expects a permutation of 0..n-1")
        w = np.empty(self._n)
        w[perm] = self._weights
        return WeightedGraph(self._n, [(perm[i], perm[j]) for i, j in self.edges], w)

    # -- predicates ------------------------------------------------------
    def is_stable(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        s = set(vs)
        if len(s) != len(vs):
            return False
        return all(not (self._adj[v] & s) for v in s)

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(set(vertices))
        return all(vs[b] in self._adj[vs[a]] for a in range(len(vs)) for b in range(a + 1, len(vs)))

    def weight_of(self, vertices: Iterable[int]) -> float:
        idx = list(vertices)
        return float(self._weights[idx].sum()) if idx else 0.0

    def connected_components(self, within: Iterable[int] | None = None) -> list[list[int]]:
        """Connected components (sorted lists) of ``G|within`` ordered by smallest vertex."""
        alive = set(range(self._n)) if within is None else set(within)
        comps = []
        for s in sorted(alive):
            if s not in alive:
                continue
            stack, comp = [s], [s]
            alive.discard(s)
            while stack:
                v = stack.pop()
                for u in self._adj[v]:
                    if u in alive:
                        alive.discard(u)
                        stack.append(u)
                        comp.append(u)
            comps.append(sorted(comp))
        return comps

    # -- equality / repr / serialisation ---------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self._n == other._n
            and self._adj == other._adj
            and np.array_equal(self._weights, other._weights)
        )

    def __hash__(self):
        return hash((self._n, self.edges, self._weights.tobytes()))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self._n}, m={self.m})"

    def to_dict(self) -> dict:
        out = {"n": self._n, "edges": [list(e) for e in self.edges], "weights": self._weights.tolist()}
        if self._labels is not None:
            out["labels"] = list(self._labels)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "WeightedGraph":
        try:
            n = int(data["n"])
            edges = [tuple(e) for e in data.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc
        return cls(n, edges, data.get("weights"), data.get("labels"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class StableSet:
    """A stable set together with its total weight."""

    vertices: tuple[int, ...]
    weight: float

    @classmethod
    def of(cls, g: WeightedGraph, vertices: Iterable[int]) -> "StableSet":
        vs = tuple(sorted(set(int(v) for v in vertices)))
        if not g.is_stable(vs):
            raise GraphError("vertex set is not stable")
        return cls(vs, g.weight_of(vs))

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.vertices


@dataclass(frozen=True)
class SubgraphMap:
    """Bijection between the vertices of an induced subgraph and its host."""

    to_parent: tuple[int, ...]
    to_child: dict = field(repr=False)

    def lift(self, vertices: Iterable[int]) -> list[int]:
        return [self.to_parent[v] for v in vertices]


def induced_subgraph(g: WeightedGraph, s: Iterable[int]) -> tuple[WeightedGraph, SubgraphMap]:
    """Induced subgraph ``G|s`` with vertices renumbered in increasing order."""
    verts = sorted(set(int(v) for v in s))
    for v in verts:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} not in graph")
    pos = {v: k for k, v in enumerate(verts)}
    edges = [(pos[i], pos[j]) for i in verts for j in g.neighbors(i) if j in pos and i < j]
    labels = [g.labels[v] for v in verts] if g.labels is not None else None
    sub = WeightedGraph(len(verts), edges, g.weights[verts] if verts else [], labels)
    return sub, SubgraphMap(tuple(verts), pos)


def closed_neighborhood_removal(g: WeightedGraph, i: int, within: Iterable[int] | None = None) -> frozenset[int]:
    """Vertices of ``within`` (default: all) left after deleting ``i`` and its neighbours."""
    base = frozenset(range(g.n)) if within is None else frozenset(within)
    return base - g.neighbors(i) - {i}


# -- small named graphs used across tests and demos ------------------------

def path_graph(n: int, weights=None) -> WeightedGraph:
    return WeightedGraph(n, [(i, i + 1) for i in range(n - 1)], weights)


def cycle_graph(n: int, weights=None) -> WeightedGraph:
    return WeightedGraph(n, [(i, (i + 1) % n) for i in range(n)], weights)


def complete_graph(n: int, weights=None) -> WeightedGraph:
    return WeightedGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)], weights)


def empty_graph(n: int, weights=None) -> WeightedGraph:
    return WeightedGraph(n, [], weights)


def star_graph(leaves: int, weights=None) -> WeightedGraph:
    """``K_{1,leaves}`` with the centre at vertex 0."""
    return WeightedGraph(leaves + 1, [(0, k) for k in range(1, leaves + 1)], weights)


def petersen_graph() -> WeightedGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return WeightedGraph(10, outer + spokes + inner)
