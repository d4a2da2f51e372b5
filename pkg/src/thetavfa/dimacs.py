"""DIMACS ASCII graph reader/writer.

The clique benchmarks are stored in their original (clique) form; pass
``complement=True`` to obtain the stable-set instance.
"""

from __future__ import annotations

import warnings
from importlib import resources
from pathlib import Path

from .graph import GraphError, WeightedGraph


class DimacsError(GraphError):
    """Malformed DIMACS input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        loc = ""
        if source:
            loc += f"{source}:"
        if line is not None:
            loc += f"{line}:"
        super().__init__(f"{loc} {message}".strip())
        self.line = line
        self.source = source


class EdgeCountWarning(UserWarning):
    pass


def parse_dimacs(
    text: str,
    complement: bool = False,
    strict_edge_count: bool = False,
    source: str | None = None,
) -> WeightedGraph:
    """Parse a DIMACS ``p edge`` document into a unit-weight graph.

    ``n`` lines (``n <vertex> <weight>``) set vertex weights when present.
    A header/edge-count mismatch warns unless ``strict_edge_count`` is set.
    Repeated edges are counted once.
    """
    n = None
    declared_m = None
    edges = []
    weights = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise DimacsError("duplicate problem line", lineno, source)
            if len(parts) != 4 or parts[1] not in ("edge", "col", "clq"):
                raise DimacsError(f"malformed header {line!r}", lineno, source)
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno, source) from None
            if n < 0 or declared_m < 0:
                raise DimacsError("negative counts in header", lineno, source)
            weights = [1.0] * n
        elif tag in ("e", "n"):
            if n is None:
                raise DimacsError(f"'{tag}' line before problem line", lineno, source)
            if len(parts) != 3:
                raise DimacsError(f"malformed line {line!r}", lineno, source)
            try:
                a = int(parts[1])
                b = int(parts[2]) if tag == "e" else float(parts[2])
            except ValueError:
                raise DimacsError(f"malformed line {line!r}", lineno, source) from None
            if not 1 <= a <= n:
                raise DimacsError(f"vertex index {a} out of range 1..{n}", lineno, source)
            if tag == "n":
                if not b > 0:
                    raise DimacsError(f"non-positive weight for vertex {a}", lineno, source)
                weights[a - 1] = b
                continue
            if not 1 <= b <= n:
                raise DimacsError(f"vertex index {b} out of range 1..{n}", lineno, source)
            if a == b:
                raise DimacsError(f"self-loop at vertex {a}", lineno, source)
            edges.append((a - 1, b - 1))
        else:
            raise DimacsError(f"unknown line type {tag!r}", lineno, source)
    if n is None:
        raise DimacsError("missing problem line", None, source)
    g = WeightedGraph(n, edges, weights)
    if g.m != declared_m:
        msg = f"header declares {declared_m} edges, found {g.m} distinct"
        if strict_edge_count:
            raise DimacsError(msg, None, source)
        warnings.warn(msg, EdgeCountWarning, stacklevel=2)
    return g.complement() if complement else g


def emit_dimacs(g: WeightedGraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"c {c}" for c in comment.splitlines())
    lines.append(f"p edge {g.n} {g.m}")
    if any(w != 1.0 for w in g.weights):
        lines.extend(f"n {i + 1} {float(w)!r}" for i, w in enumerate(g.weights))
    lines.extend(f"e {i + 1} {j + 1}" for i, j in g.edges)
    return "\n".join(lines) + "\n"


def read_dimacs(path, complement: bool = False, strict_edge_count: bool = False) -> WeightedGraph:
    path = Path(path)
    return parse_dimacs(path.read_text(), complement, strict_edge_count, source=str(path))


def write_dimacs(g: WeightedGraph, path, comment: str | None = None) -> None:
    Path(path).write_text(emit_dimacs(g, comment))


BUNDLED = ("johnson8-2-4", "hamming6-2", "MANN-a9")


def load_bundled(name: str, complement: bool = True) -> WeightedGraph:
    """Load one of the small DIMACS clique benchmarks shipped with the package."""
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled instance {name!r}; choose from {BUNDLED}")
    text = resources.files("thetavfa").joinpath("data").joinpath(f"{name}.clq").read_text()
    return parse_dimacs(text, complement=complement, source=name)
