"""Value-function approximations (VFAs) for the stable set problem.

``V_SDP(S) = q_S' pinv(Q_S) q_S`` comes from a dual theta solution and
``V_LP(S)`` sums clique-LP multipliers over the cliques meeting ``S``.  Both
are monotone, vanish on the empty set, and satisfy
``V(S) - V(S - N[i]) >= w_i``; on perfect graphs with suitable dual
solutions they are tight, ``V(N) = alpha(G)``.
"""

from __future__ import annotations

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import connected_components

from .exact import enumerate_cliques
from .graph import GraphError, WeightedGraph
from .linalg import DEFAULT_RANK_TOL, quad_pinv, solve_regularized_quadratic

log = logging.getLogger(__name__)

RIDGE = 1e-4
EPS_VFA = 1e-6
BACKENDS = ("pinv", "cg")
# Keeps every eigenvalue of an interior (positive definite) dual matrix, so
# the pinv backend is the exact inverse form for which the VFA axioms hold
# structurally.  The default cutoff instead approximates the optimal-face value.
EXACT_RANK_TOL = 1e-14


def _blockwise_pinv(q: np.ndarray, Q: np.ndarray, rank_tol: float) -> float:
    """``q' pinv(Q) q`` summed over the diagonal blocks of ``Q``'s sparsity pattern.

    ``Q_S`` is block diagonal along the components of ``G|S``; evaluating the
    blocks separately keeps no-edge additivity exact instead of leaving it to
    how an eigensolver splits nearly degenerate eigenvalues across blocks.
    """
    k, labels = connected_components(Q != 0, directed=False)
    if k == 1:
        return quad_pinv(q, Q, rank_tol)
    total = 0.0
    for b in range(k):
        idx = np.flatnonzero(labels == b)
        total += quad_pinv(q[idx], Q[np.ix_(idx, idx)], rank_tol)
    return total


class VfaContext:
    """Evaluator for ``V_SDP`` on subsets of one graph's vertices.

    Parameters
    ----------
    q, Q
        Dual vector and matrix (``Q`` symmetric psd, zero on non-edges).
    backend
        ``"pinv"`` evaluates ``q_S' pinv(Q_S) q_S`` exactly (eigen cutoff
        ``rank_tol``); ``"cg"`` returns ``-min_y y'(Q_S + ridge I)y - 2 q_S'y``
        solved by warm-started conjugate gradients to tolerance ``eps_vfa``.
    memo
        Reuse values of subsets already evaluated.  Calls are counted either way.

    Notes
    -----
    A context is stateful (warm-start cache, counters); use one per rounding
    run.  :meth:`value` evaluates without touching any state.
    """

    def __init__(self, q, Q, backend: str = "cg", ridge: float = RIDGE, eps_vfa: float = EPS_VFA,
                 rank_tol: float = DEFAULT_RANK_TOL, memo: bool = True, cache_size: int = 8):
        if backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
        if not (ridge > 0 and eps_vfa > 0 and rank_tol > 0):
            raise ValueError("ridge, eps_vfa and rank_tol must be positive")
        self.q = np.asarray(q, dtype=float)
        self.Q = np.asarray(Q, dtype=float)
        if self.Q.shape != (self.q.shape[0],) * 2:
            raise ValueError(f"shape mismatch: q {self.q.shape}, Q {self.Q.shape}")
        self.backend = backend
        self.ridge = ridge
        self.eps_vfa = eps_vfa
        self.rank_tol = rank_tol
        self.memo = memo
        self.cache_size = cache_size
        self.eval_count = 0
        self.fallbacks = 0
        self.cg_iterations = 0
        self._values: dict[frozenset, float] = {}
        self._warm: OrderedDict[frozenset, np.ndarray] = OrderedDict()
        self.last_y: np.ndarray | None = None

    @classmethod
    def from_certificate(cls, cert, **kwargs) -> "VfaContext":
        return cls(cert.q, cert.Q, **kwargs)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def reset_counters(self) -> None:
        self.eval_count = 0
        self.fallbacks = 0
        self.cg_iterations = 0

    def __call__(self, s: Iterable[int]) -> float:
        return self.evaluate(s)

    def evaluate(self, s: Iterable[int]) -> float:
        """``V(s)``; counts the call and updates the caches."""
        key = frozenset(int(i) for i in s)
        self.eval_count += 1
        if not key:
            return 0.0
        if self.memo and key in self._values:
            return self._values[key]
        idx = np.array(sorted(key), dtype=np.intp)
        if idx[0] < 0 or idx[-1] >= self.n:
            raise IndexError(f"subset has vertices outside 0..{self.n - 1}")
        if self.backend == "pinv":
            val = _blockwise_pinv(self.q[idx], self.Q[np.ix_(idx, idx)], self.rank_tol)
        else:
            val = self._cg(key, idx)
        if self.memo:
            self._values[key] = val
        return val

    def value(self, s: Iterable[int]) -> float:
        """Stateless evaluation (no counting, no caching, cold start)."""
        idx = np.array(sorted({int(i) for i in s}), dtype=np.intp)
        if idx.size == 0:
            return 0.0
        if self.backend == "pinv":
            return _blockwise_pinv(self.q[idx], self.Q[np.ix_(idx, idx)], self.rank_tol)
        sol = solve_regularized_quadratic(self.Q[np.ix_(idx, idx)], self.q[idx], self.ridge, tol=self.eps_vfa)
        if not sol.converged:
            return quad_pinv(self.q[idx], self.Q[np.ix_(idx, idx)], self.rank_tol)
        return -sol.value

    def _warm_start(self, key: frozenset, idx: np.ndarray) -> np.ndarray | None:
        # prefer the most recent cached superset, else the most recent entry
        chosen = None
        for k in reversed(self._warm):
            if key <= k:
                chosen = k
                break
        if chosen is None and self._warm:
            chosen = next(reversed(self._warm))
        if chosen is None:
            return None
        return self._warm[chosen][idx]

    def _cg(self, key: frozenset, idx: np.ndarray) -> float:
        qs = self.q[idx]
        Qs = self.Q[np.ix_(idx, idx)]
        sol = solve_regularized_quadratic(Qs, qs, self.ridge, warm_start=self._warm_start(key, idx),
                                          tol=self.eps_vfa)
        self.cg_iterations += sol.iterations
        if not sol.converged:
            self.fallbacks += 1
            log.warning("CG did not converge on |S|=%d (residual %.2e); using pseudo-inverse",
                        idx.size, sol.residual)
            return quad_pinv(qs, Qs, self.rank_tol)
        full = np.zeros(self.n)
        full[idx] = sol.y
        self._warm[key] = full
        self._warm.move_to_end(key)
        while len(self._warm) > self.cache_size:
            self._warm.popitem(last=False)
        self.last_y = sol.y
        return -sol.value


def eval_sdp_vfa(ctx: VfaContext, s: Iterable[int]) -> float:
    return ctx.evaluate(s)


# -- clique LP --------------------------------------------------------------

@dataclass
class LpDualCertificate:
    """Clique-LP primal/dual pair.

    ``cliques[k]`` carries multiplier ``mu[k]``; ``x`` is the primal point.
    ``complementarity`` holds, per clique and per vertex, the larger member
    of each complementary pair; strict complementarity means all are
    bounded away from zero.
    """

    n: int
    weights: np.ndarray
    cliques: list[tuple[int, ...]]
    mu: np.ndarray
    x: np.ndarray
    value: float
    primal_value: float
    clique_complementarity: np.ndarray = field(repr=False)
    vertex_complementarity: np.ndarray = field(repr=False)
    repaired: float = 0.0
    iterations: int = 0

    @property
    def strict_complementarity(self) -> float:
        """Smallest complementary-pair maximum; > 0 means strictly complementary."""
        vals = np.concatenate([self.clique_complementarity, self.vertex_complementarity])
        return float(vals.min()) if vals.size else 1.0

    def coverage(self) -> np.ndarray:
        cov = np.zeros(self.n)
        for c, m in zip(self.cliques, self.mu):
            cov[list(c)] += m
        return cov

    def singleton_mass(self, eps: float = 1e-7) -> list[int]:
        """Vertices whose singleton clique carries multiplier above ``eps``."""
        return [c[0] for c, m in zip(self.cliques, self.mu) if len(c) == 1 and m > eps]


def _lp_ipm(A: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float = 1e-11, max_iter: int = 200):
    """Mehrotra predictor-corrector for ``min c'z, Az = b, z >= 0``.

    Returns ``(z, y, s, iterations)``; iterates follow the central path so
    the limit is strictly complementary.
    """
    m, k = A.shape
    # standard heuristic starting point
    AAt = A @ A.T
    z = A.T @ np.linalg.solve(AAt, b)
    y = np.linalg.solve(AAt, A @ c)
    s = c - A.T @ y
    dz = max(-1.5 * z.min(), 0.0)
    ds = max(-1.5 * s.min(), 0.0)
    z, s = z + dz, s + ds
    corr = 0.5 * (z @ s)
    z = z + corr / s.sum()
    s = s + corr / z.sum()
    nb, nc = 1 + np.linalg.norm(b), 1 + np.linalg.norm(c)
    it = 0
    for it in range(1, max_iter + 1):
        rp = b - A @ z
        rd = c - A.T @ y - s
        mu = (z @ s) / k
        pobj, dobj = c @ z, b @ y
        if (np.linalg.norm(rp) / nb < tol and np.linalg.norm(rd) / nc < tol
                and abs(pobj - dobj) / (1 + abs(pobj)) < tol):
            break
        d = z / s
        M = (A * d) @ A.T
        L = np.linalg.cholesky(M + 1e-14 * np.trace(M) / m * np.eye(m))

        def solve(rc):
            rhs = rp + A @ (d * rd - rc / s)
            dy = np.linalg.solve(L.T, np.linalg.solve(L, rhs))
            ds_ = rd - A.T @ dy
            dz_ = (rc - z * ds_) / s
            return dz_, dy, ds_

        def ratio(v, dv):
            neg = dv < 0
            return float(np.min(-v[neg] / dv[neg])) if neg.any() else np.inf

        dza, dya, dsa = solve(-z * s)
        ap, ad = min(1.0, ratio(z, dza)), min(1.0, ratio(s, dsa))
        mu_aff = ((z + ap * dza) @ (s + ad * dsa)) / k
        sigma = (mu_aff / mu) ** 3
        dz_, dy, ds_ = solve(-z * s + sigma * mu - dza * dsa)
        ap = min(1.0, 0.99 * ratio(z, dz_))
        ad = min(1.0, 0.99 * ratio(s, ds_))
        z = z + ap * dz_
        y = y + ad * dy
        s = s + ad * ds_
    return z, y, s, it


def solve_clique_lp(g: WeightedGraph, max_n: int = 25, clique_budget: int = 200_000,
                    tol: float = 1e-11) -> LpDualCertificate:
    """Solve the clique LP over all maximal cliques plus all singletons.

    The dual ``min sum mu_C  s.t.  sum_{C ni i} mu_C >= w_i, mu >= 0`` is
    solved by a path-following interior-point method, whose limit point is
    strictly complementary.  Any tiny covering deficit left by the solver is
    moved onto singleton multipliers so that covering holds exactly.
    """
    if g.n > max_n:
        raise GraphError(f"clique LP limited to {max_n} vertices, got {g.n}")
    w = g.weights
    n = g.n
    if n == 0:
        return LpDualCertificate(0, w, [], np.zeros(0), np.zeros(0), 0.0, 0.0, np.zeros(0), np.zeros(0))
    cliques = [c for c in enumerate_cliques(g, clique_budget) if len(c) > 1]
    cliques += [(i,) for i in range(n)]
    K = len(cliques)
    E = np.zeros((n, K))
    for k, c in enumerate(cliques):
        E[list(c), k] = 1.0
    # variables (mu, surplus): E mu - surplus = w
    A = np.hstack([E, -np.eye(n)])
    c = np.concatenate([np.ones(K), np.zeros(n)])
    z, x, s, its = _lp_ipm(A, w, c, tol=tol)
    mu = np.maximum(z[:K], 0.0)
    deficit = np.maximum(w - E @ mu, 0.0)
    for i in range(n):
        mu[K - n + i] += deficit[i]
    x = np.clip(x, 0.0, None)
    clique_slack = 1.0 - E.T @ x
    surplus = E @ mu - w
    cert = LpDualCertificate(
        n=n,
        weights=w,
        cliques=cliques,
        mu=mu,
        x=x,
        value=float(mu.sum()),
        primal_value=float(w @ x),
        clique_complementarity=np.maximum(mu, clique_slack),
        vertex_complementarity=np.maximum(x, surplus),
        repaired=float(deficit.sum()),
        iterations=its,
    )
    return cert


def eval_lp_vfa(cert: LpDualCertificate, s: Iterable[int]) -> float:
    """``V_LP(s)``: total multiplier of the cliques meeting ``s``."""
    s = set(s)
    if not s:
        return 0.0
    return float(sum(m for c, m in zip(cert.cliques, cert.mu) if s.intersection(c)))


class LpVfa:
    """Callable wrapper around :func:`eval_lp_vfa` with the VFA context interface."""

    def __init__(self, cert: LpDualCertificate):
        self.cert = cert
        self.eval_count = 0
        self._masks = [sum(1 << v for v in c) for c in cert.cliques]

    def __call__(self, s) -> float:
        return self.evaluate(s)

    def evaluate(self, s) -> float:
        self.eval_count += 1
        return self.value(s)

    def value(self, s) -> float:
        mask = sum(1 << int(v) for v in set(s))
        return float(sum(m for cm, m in zip(self._masks, self.cert.mu) if cm & mask))


def lp_dual_to_sdp_dual(g: WeightedGraph, cert: LpDualCertificate, tol: float = 1e-9):
    """Build ``M = sum_C p_C p_C' + Diag(b)`` from clique multipliers.

    ``p_C`` has ``sqrt(mu_C)`` in position 0 and ``-sqrt(mu_C)`` on the
    vertices of ``C``; ``b_0 = 0`` and ``b_i = sum_{C ni i} mu_C - w_i``.
    Returns ``(t, q, Q, M)``.  Raises ``ValueError`` if some ``b_i`` is
    below ``-tol * (1 + w_i)`` (the multipliers do not cover ``w``).
    """
    n = g.n
    if cert.n != n:
        raise ValueError(f"certificate is for {cert.n} vertices, graph has {n}")
    w = g.weights
    M = np.zeros((n + 1, n + 1))
    cover = np.zeros(n)
    for c, m in zip(cert.cliques, cert.mu):
        if m < 0:
            raise ValueError("negative clique multiplier")
        if m == 0:
            continue
        if len(c) > 1 and not g.is_clique(c):
            raise ValueError(f"{c} is not a clique of the graph")
        p = np.zeros(n + 1)
        p[0] = np.sqrt(m)
        p[[v + 1 for v in c]] = -np.sqrt(m)
        M += np.outer(p, p)
        cover[list(c)] += m
    b = cover - w
    bad = b < -tol * (1 + w)
    if bad.any():
        raise ValueError(f"multipliers do not cover vertex weights at {np.flatnonzero(bad).tolist()}")
    M[np.arange(1, n + 1), np.arange(1, n + 1)] += b
    return float(M[0, 0]), M[0, 1:].copy(), M[1:, 1:].copy(), M


def essential_cliques(cert: LpDualCertificate, eps: float = 1e-6) -> list[tuple[int, ...]]:
    """Cliques with multiplier above ``eps``."""
    return [c for c, m in zip(cert.cliques, cert.mu) if m > eps]


@dataclass(frozen=True)
class AxiomReport:
    """Worst observed violation per VFA axiom (0 means none)."""

    empty: float
    monotone: float
    singleton: float
    additive: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.empty, self.monotone, self.singleton, self.additive) <= self.tol

    def to_dict(self) -> dict:
        return {"empty": self.empty, "monotone": self.monotone, "singleton": self.singleton,
                "additive": self.additive, "tol": self.tol, "passed": self.passed}


def check_vfa_axioms(g: WeightedGraph, value, samples: int = 200, seed=0, tol: float = 1e-6) -> AxiomReport:
    """Spot-check the VFA axioms of ``value`` (a set function) on ``g``.

    Checks ``V(empty) = 0``, ``V(I) <= V(J)`` on ``samples`` random nested
    pairs, ``V({i}) >= w_i`` for every vertex, and ``V(I + J) = V(I) + V(J)``
    on ``samples`` random pairs with no edge between ``I`` and ``J``.
    """
    rng = np.random.default_rng(seed)
    n = g.n
    w = g.weights
    empty = abs(value(frozenset()))
    singleton = max((max(0.0, w[i] - value({i})) for i in range(n)), default=0.0)
    monotone = additive = 0.0
    for _ in range(samples if n else 0):
        J = {i for i in range(n) if rng.random() < rng.uniform(0.2, 1.0)}
        I = {i for i in J if rng.random() < 0.5}
        monotone = max(monotone, value(I) - value(J))
        A = {i for i in range(n) if rng.random() < 0.3}
        blocked = set(A)
        for a in A:
            blocked |= g.neighbors(a)
        B = {i for i in range(n) if i not in blocked and rng.random() < 0.5}
        additive = max(additive, abs(value(A | B) - value(A) - value(B)))
    return AxiomReport(empty, monotone, singleton, additive, tol)
