"""Rounding a theta solution to a stable set.

* :func:`round_lookahead` -- tight-VFA rounding with one-step look-ahead,
  exact on the graph classes where the VFA is tight and well behaved.
* :func:`round_lookahead_counipolar` -- the same with a second start at a
  neighbour of the first choice when the first run falls short of theta.
* :func:`round_greedy` -- argmax rounding that works with any VFA.
* :func:`round_benson_ye` -- randomized projection baseline.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .exact import optimal_leaf_or_isolated
from .graph import StableSet, WeightedGraph
from .linalg import eigh

EPS_GAP = 1e-4
SUPPORT_REL = 1e-3
MATCH_REL = 1e-3
BUDGET_CONSTANT = 8


# -- trace ------------------------------------------------------------------

@dataclass(frozen=True)
class TraceEvent:
    kind: str
    vertex: int
    value: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def PhaseIDiscard(i: int, x: float) -> TraceEvent:  # noqa: N802 - event constructors
    return TraceEvent("phase1_discard", int(i), float(x))


def Select(i: int) -> TraceEvent:  # noqa: N802
    return TraceEvent("select", int(i))


def Discard(i: int, gap: float) -> TraceEvent:  # noqa: N802
    return TraceEvent("discard", int(i), float(gap))


def LookaheadReject(i: int, drop: float) -> TraceEvent:  # noqa: N802
    return TraceEvent("lookahead_reject", int(i), float(drop))


def ForcedLeaf(i: int) -> TraceEvent:  # noqa: N802
    return TraceEvent("forced_leaf", int(i))


@dataclass
class RoundingTrace:
    """Ordered events of one rounding run plus optional per-iteration snapshots.

    A snapshot records, for one tentative selection of ``vertex``, the
    sets ``I`` and ``I'`` (after the discard loop), their VFA values, the
    vertex weight and whether the selection was committed.
    """

    method: str
    events: list[TraceEvent]
    stable_set: StableSet
    eval_count: int
    n: int
    snapshots: list[dict] | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        terminal = [e.vertex for e in self.events]
        if len(terminal) != len(set(terminal)):
            raise ValueError("a vertex has more than one terminal event")

    @property
    def selected(self) -> list[int]:
        return [e.vertex for e in self.events if e.kind in ("select", "forced_leaf")]

    @property
    def discarded(self) -> list[int]:
        return [e.vertex for e in self.events if e.kind in ("phase1_discard", "discard", "lookahead_reject")]

    def budget_constant(self) -> float:
        """``eval_count / n^3`` (0 for the empty graph)."""
        return self.eval_count / self.n ** 3 if self.n else 0.0

    def to_dict(self) -> dict:
        return {
            "schema": "thetavfa.trace/1",
            "method": self.method,
            "n": self.n,
            "events": [e.to_dict() for e in self.events],
            "stable_set": list(self.stable_set.vertices),
            "weight": self.stable_set.weight,
            "eval_count": self.eval_count,
            "snapshots": self.snapshots,
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, g: WeightedGraph) -> "RoundingTrace":
        return cls(
            method=data["method"],
            events=[TraceEvent(**e) for e in data["events"]],
            stable_set=StableSet.of(g, data["stable_set"]),
            eval_count=int(data["eval_count"]),
            n=int(data["n"]),
            snapshots=data.get("snapshots"),
            params=data.get("params", {}),
        )


# -- look-ahead rounding ----------------------------------------------------

Selector = Callable[[frozenset], int]


def lowest_index(candidates: frozenset) -> int:
    return min(candidates)


def random_selector(seed=None) -> Selector:
    rng = np.random.default_rng(seed)
    return lambda candidates: int(rng.choice(sorted(candidates)))


def _gap_tol(eps_gap: float, w: float) -> float:
    return eps_gap * (1.0 + w)


def phase_one(g: WeightedGraph, x: np.ndarray, eps_supp: float | None = None) -> tuple[frozenset, list[TraceEvent]]:
    """Keep vertices with ``x_i > eps_supp`` (default ``1e-3 * max x``)."""
    if g.n == 0:
        return frozenset(), []
    if eps_supp is None:
        eps_supp = SUPPORT_REL * float(np.max(x))
    keep = frozenset(i for i in range(g.n) if x[i] > eps_supp)
    events = [PhaseIDiscard(i, x[i]) for i in range(g.n) if i not in keep]
    return keep, events


def round_lookahead(
    g: WeightedGraph,
    cert,
    vfa,
    eps_supp: float | None = None,
    eps_gap: float = EPS_GAP,
    selector: Selector = lowest_index,
    lookahead: bool = True,
    start: int | None = None,
    snapshots: bool = False,
) -> tuple[StableSet, RoundingTrace]:
    """Tight-VFA rounding with one-step look-ahead.

    Parameters
    ----------
    cert
        Theta certificate of ``g``; only ``cert.x`` is used (Phase I).
    vfa
        Callable ``V(subset) -> float`` with an ``eval_count`` attribute.
    eps_supp
        Phase I keeps ``{i : x_i > eps_supp}``; default ``1e-3 * max(x)``.
    eps_gap
        Strictness margin: a drop counts as larger than ``w_j`` only when it
        exceeds ``w_j + eps_gap * (1 + w_j)``.
    selector
        Picks the tentative vertex from the current candidate set.
    lookahead
        With ``False`` every tentative selection is committed.
    start
        Vertex to try first (if it survives Phase I).

    Returns
    -------
    (StableSet, RoundingTrace)
    """
    w = g.weights
    count0 = vfa.eval_count
    alive, events = phase_one(g, np.asarray(cert.x), eps_supp)
    S: list[int] = []
    snaps: list[dict] | None = [] if snapshots else None
    first = True
    while alive:
        if first and start is not None and start in alive:
            i = start
        else:
            i = selector(alive)
        first = False
        pending: list[TraceEvent] = []
        cur = alive - g.neighbors(i) - {i}
        changed = True
        while changed and cur:
            changed = False
            v_cur = vfa(cur)
            for j in sorted(cur):
                rest = cur - g.neighbors(j) - {j}
                gap = v_cur - vfa(rest)
                if gap > w[j] + _gap_tol(eps_gap, w[j]):
                    pending.append(Discard(j, gap))
                    cur = cur - {j}
                    changed = True
                    if cur:
                        v_cur = vfa(cur)
        commit = True
        v_alive = v_new = None
        if lookahead or snapshots:
            v_alive, v_new = vfa(alive), vfa(cur)
        if lookahead and v_alive > v_new + w[i] + _gap_tol(eps_gap, w[i]):
            commit = False
        if snaps is not None:
            snaps.append({
                "vertex": i,
                "I": sorted(alive),
                "I_prime": sorted(cur),
                "V_I": v_alive,
                "V_I_prime": v_new,
                "w": float(w[i]),
                "committed": commit,
            })
        if commit:
            S.append(i)
            events.append(Select(i))
            events.extend(pending)
            alive = cur
        else:
            events.append(LookaheadReject(i, v_alive - v_new))
            alive = alive - {i}
    result = StableSet.of(g, S)
    trace = RoundingTrace(
        "lookahead" if lookahead else "no-lookahead",
        events,
        result,
        vfa.eval_count - count0,
        g.n,
        snaps,
        {"eps_supp": eps_supp, "eps_gap": eps_gap, "start": start},
    )
    return result, trace


def round_lookahead_counipolar(
    g: WeightedGraph,
    cert,
    vfa,
    tol_match: float | None = None,
    return_trace: bool = False,
    **kwargs,
):
    """:func:`round_lookahead`, retried from a neighbour of the first choice.

    If the first run's weight is below ``t - tol_match`` (default
    ``1e-3 * (1 + t)`` with ``t = cert.t``), Phase II is rerun starting at
    the lowest-index neighbour, among Phase I survivors, of the first
    selected vertex; the heavier result is returned (the first on ties).
    With ``return_trace`` a ``(StableSet, RoundingTrace)`` pair is returned,
    the trace being that of the chosen run with the eval count of both.
    """
    t = float(cert.t)
    if tol_match is None:
        tol_match = MATCH_REL * (1 + abs(t))
    best, trace = round_lookahead(g, cert, vfa, **kwargs)
    total = trace.eval_count
    restarted = False
    if best.weight < t - tol_match:
        alive, _ = phase_one(g, np.asarray(cert.x), kwargs.get("eps_supp"))
        tried = [e.vertex for e in trace.events if e.kind in ("select", "lookahead_reject")]
        if tried:
            first = tried[0]
            nbrs = sorted(g.neighbors(first) & alive)
            if nbrs:
                restarted = True
                kw = dict(kwargs, start=nbrs[0])
                other, other_trace = round_lookahead(g, cert, vfa, **kw)
                total += other_trace.eval_count
                if other.weight > best.weight + 1e-9:
                    best, trace = other, other_trace
    trace.eval_count = total
    trace.params = dict(trace.params, two_start=True, restarted=restarted)
    return (best, trace) if return_trace else best


# -- greedy rounding -------------------------------------------------------

def round_greedy(
    g: WeightedGraph,
    vfa,
    tie_tol: float = 1e-9,
    snapshots: bool = False,
) -> tuple[StableSet, RoundingTrace]:
    """Argmax rounding for an arbitrary VFA.

    Each step selects an isolated vertex or optimal leaf of ``G|I`` if there
    is one (lowest index first); otherwise the vertex maximising
    ``V(I - N[j]) + w_j``, ties (within ``tie_tol``) to the lowest index.
    """
    w = g.weights
    count0 = vfa.eval_count
    alive = frozenset(range(g.n))
    S: list[int] = []
    events: list[TraceEvent] = []
    snaps: list[dict] | None = [] if snapshots else None
    while alive:
        v = optimal_leaf_or_isolated(g, set(alive))
        if v is not None:
            events.append(ForcedLeaf(v))
        else:
            best_v, best_score = None, -np.inf
            for j in sorted(alive):
                score = vfa(alive - g.neighbors(j) - {j}) + w[j]
                if score > best_score + tie_tol:
                    best_v, best_score = j, score
            v = best_v
            events.append(Select(v))
            if snaps is not None:
                snaps.append({"vertex": v, "I": sorted(alive), "score": best_score})
        S.append(v)
        alive = alive - g.neighbors(v) - {v}
    result = StableSet.of(g, S)
    return result, RoundingTrace("greedy", events, result, vfa.eval_count - count0, g.n, snaps,
                                 {"tie_tol": tie_tol})


# -- Benson-Ye baseline -----------------------------------------------------

@dataclass(frozen=True)
class BensonYeResult:
    best: StableSet
    average: float
    weights: tuple[float, ...]


def _factor_columns(P: np.ndarray) -> np.ndarray:
    """Columns ``b_0..b_n`` with ``P = B'B`` (eigen factorisation, negatives clipped)."""
    dec = eigh(P)
    keep = dec.values > 1e-12 * max(1.0, float(dec.values[0]))
    return (dec.vectors[:, keep] * np.sqrt(dec.values[keep])).T


def round_benson_ye(g: WeightedGraph, cert, runs: int | None = None, seed=0) -> BensonYeResult:
    """Randomized projection rounding of the primal theta solution.

    Per run, a Gaussian direction ``u`` scores vertex ``i`` by
    ``x_i * <b_i, u> * sign(<b_0, u>)`` where ``b_0..b_n`` factor the
    bordered primal matrix; vertices are then added greedily in descending
    score order whenever the set stays stable.  ``runs`` defaults to ``n``.
    Run ``k`` uses the ``k``-th child of ``SeedSequence(seed)``.
    """
    n = g.n
    if runs is None:
        runs = max(n, 1)
    if n == 0:
        empty = StableSet((), 0.0)
        return BensonYeResult(empty, 0.0, (0.0,) * runs)
    x = np.asarray(cert.x, dtype=float)
    B = _factor_columns(cert.primal_matrix())
    nb = g.masks
    w = g.weights
    best, weights = None, []
    for child in np.random.SeedSequence(seed).spawn(runs):
        rng = np.random.default_rng(child)
        u = rng.standard_normal(B.shape[0])
        proj = B.T @ u
        sign = 1.0 if proj[0] >= 0 else -1.0
        score = sign * x * proj[1:]
        order = sorted(range(n), key=lambda i: (-score[i], i))
        chosen, blocked = [], 0
        for i in order:
            if not (blocked >> i) & 1:
                chosen.append(i)
                blocked |= nb[i] | (1 << i)
        s = StableSet.of(g, chosen)
        weights.append(s.weight)
        if best is None or s.weight > best.weight + 1e-12:
            best = s
    return BensonYeResult(best, float(np.mean(weights)), tuple(weights))


# -- diagnostics ------------------------------------------------------------

@dataclass(frozen=True)
class WeightEqualityReport:
    rows: tuple[dict, ...]
    violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_weight_equality_condition(trace: RoundingTrace, vfa, eps_gap: float = EPS_GAP) -> WeightEqualityReport:
    """For every committed selection report ``|V(I) - V(I') - w_i|``.

    The output is optimal exactly when all of them vanish; entries above
    ``eps_gap * (1 + w_i)`` are flagged by vertex.
    """
    if trace.snapshots is None:
        raise ValueError("trace was recorded without snapshots")
    value = getattr(vfa, "value", vfa)
    rows, bad = [], []
    for snap in trace.snapshots:
        if not snap["committed"]:
            continue
        diff = value(snap["I"]) - value(snap["I_prime"]) - snap["w"]
        rows.append({"vertex": snap["vertex"], "difference": diff})
        if abs(diff) > _gap_tol(eps_gap, snap["w"]):
            bad.append(snap["vertex"])
    return WeightEqualityReport(tuple(rows), tuple(bad))
