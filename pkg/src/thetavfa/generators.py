"""Seeded random generators for perfect-graph families and benchmark builders.

All random generators take ``seed`` (anything accepted by
``numpy.random.default_rng``) and relabel vertices by a random permutation
so that vertex indices carry no structural information.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph


@dataclass(frozen=True)
class GeneralizedSplitCertificate:
    kind: str  # "unipolar" | "co-unipolar"
    center: frozenset[int]
    clusters: tuple[frozenset[int], ...]


def check_generalized_split(g: WeightedGraph, cert: GeneralizedSplitCertificate) -> bool:
    """Validate a unipolar / co-unipolar certificate against ``g``."""
    if cert.kind not in ("unipolar", "co-unipolar"):
        return False
    h = g if cert.kind == "unipolar" else g.complement()
    parts = [cert.center, *cert.clusters]
    covered = set().union(*parts)
    if covered != set(range(g.n)) or sum(len(p) for p in parts) != g.n:
        return False
    if any(not c for c in cert.clusters):
        return False
    if not h.is_clique(cert.center):
        return False
    rest = set(range(g.n)) - set(cert.center)
    comps = {frozenset(c) for c in h.connected_components(rest)}
    if comps != set(cert.clusters):
        return False
    return all(h.is_clique(c) for c in cert.clusters)


def _permute(rng, n, edges, weights=None):
    perm = rng.permutation(n)
    g = WeightedGraph(n, edges, weights)
    return g.relabel(perm), perm


def generate_chordal(n: int, density: float = 0.5, seed=None, weights=None) -> WeightedGraph:
    """Random connected chordal graph built by the "growing" scheme.

    Vertex ``v`` attaches to a random clique inside the closed neighbourhood
    of a uniformly chosen earlier vertex ``u``: the clique always contains
    ``u`` and each further neighbour of ``u`` joins with probability
    ``density`` if it keeps the set a clique.  Every vertex is simplicial
    when added, so reverse insertion order is a PEO.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    edges = []
    for v in range(1, n):
        u = int(rng.integers(v))
        clique = [u]
        for x in rng.permutation(sorted(adj[u])):
            x = int(x)
            if rng.random() < density and all(x in adj[c] for c in clique):
                clique.append(x)
        for c in clique:
            adj[v].add(c)
            adj[c].add(v)
            edges.append((c, v))
    g, _ = _permute(rng, n, edges, weights)
    return g


def generate_cochordal(n: int, density: float = 0.5, seed=None, weights=None) -> WeightedGraph:
    """Complement of :func:`generate_chordal`."""
    return generate_chordal(n, density, seed, weights).complement()


def generate_generalized_split(
    n: int,
    center_fraction: float = 0.5,
    edge_prob: float = 0.5,
    max_cluster: int | None = None,
    kind: str | None = None,
    seed=None,
) -> tuple[WeightedGraph, GeneralizedSplitCertificate]:
    """Random unipolar or co-unipolar graph together with its certificate.

    Centre size is Binomial(n, center_fraction); the other vertices are cut
    into clusters of uniform random size in ``1..max_cluster`` (default
    ``ceil(sqrt(n))``).  Centre-cluster pairs are joined independently with
    probability ``edge_prob``; clusters are never joined to each other, so
    they are exactly the components off the centre.  With ``kind=None`` the
    co-unipolar variant (complement) is emitted with probability 1/2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if max_cluster is None:
        max_cluster = max(1, int(np.ceil(np.sqrt(n))))
    k = int(rng.binomial(n, center_fraction))
    center = list(range(k))
    rest = list(range(k, n))
    clusters = []
    pos = 0
    while pos < len(rest):
        size = int(rng.integers(1, max_cluster + 1))
        clusters.append(rest[pos:pos + size])
        pos += size
    edges = list(itertools.combinations(center, 2))
    for c in clusters:
        edges.extend(itertools.combinations(c, 2))
    for c in clusters:
        for v in c:
            for a in center:
                if rng.random() < edge_prob:
                    edges.append((a, v))
    if kind is None:
        kind = "co-unipolar" if rng.random() < 0.5 else "unipolar"
    perm = rng.permutation(n)
    g = WeightedGraph(n, edges).relabel(perm)
    if kind == "co-unipolar":
        g = g.complement()
    elif kind != "unipolar":
        raise ValueError(f"unknown kind {kind!r}")
    cert = GeneralizedSplitCertificate(
        kind,
        frozenset(int(perm[a]) for a in center),
        tuple(sorted((frozenset(int(perm[v]) for v in c) for c in clusters), key=min)),
    )
    return g, cert


def generate_erdos_renyi(n: int, p: float = 0.5, seed=None) -> WeightedGraph:
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.shape[0]) < p
    return WeightedGraph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


# -- DIMACS clique benchmark constructions ---------------------------------

def hamming_graph(bits: int, distance: int) -> WeightedGraph:
    """DIMACS ``hamming<bits>-<distance>``: words joined when Hamming distance >= distance."""
    n = 1 << bits
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if bin(a ^ b).count("1") >= distance]
    return WeightedGraph(n, edges)


def johnson_graph(n: int, w: int, d: int) -> WeightedGraph:
    """DIMACS ``johnson<n>-<w>-<d>``: weight-``w`` words of length ``n``, joined at distance >= d."""
    words = [sum(1 << i for i in c) for c in itertools.combinations(range(n), w)]
    edges = [
        (a, b)
        for a in range(len(words))
        for b in range(a + 1, len(words))
        if bin(words[a] ^ words[b]).count("1") >= d
    ]
    return WeightedGraph(len(words), edges)


def steiner_triples_9() -> list[tuple[int, int, int]]:
    """The 12 lines of the affine plane AG(2,3), the unique STS(9)."""
    pts = [(x, y) for x in range(3) for y in range(3)]
    index = {p: k for k, p in enumerate(pts)}
    lines = set()
    for p, q in itertools.combinations(pts, 2):
        r = ((-p[0] - q[0]) % 3, (-p[1] - q[1]) % 3)
        lines.add(tuple(sorted((index[p], index[q], index[r]))))
    return sorted(lines)


def mann_graph(triples: list[tuple[int, int, int]], points: int) -> WeightedGraph:
    """Clique form of the Mannino-Sassano Steiner-triple covering transformation.

    Conflict graph: a triangle of copies ``(t, p)`` for every triple ``t``
    plus one vertex per point ``p`` adjacent to all copies of ``p``.  The
    returned graph is its complement, matching DIMACS ``MANN_a*``.
    """
    copies = [(t, p) for t, tri in enumerate(triples) for p in tri]
    n = len(copies) + points
    conflict = []
    for a, b in itertools.combinations(range(len(copies)), 2):
        if copies[a][0] == copies[b][0]:
            conflict.append((a, b))
    for a, (_, p) in enumerate(copies):
        conflict.append((a, len(copies) + p))
    return WeightedGraph(n, conflict).complement()
