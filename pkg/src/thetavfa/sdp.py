"""Theta SDP: standard-form assembly, a dense primal-dual interior-point
solver, certificates and their independent verification.

Standard form used by :func:`solve_sdp`::

    min <C, X>  s.t.  <A_k, X> = b_k,  X psd
    max b'y     s.t.  Z = C - sum_k y_k A_k  psd

Each ``A_k`` is sparse with at most a handful of entries, which keeps the
Schur complement assembly a matter of gathering entries of ``X`` and
``Z^{-1}``.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .graph import WeightedGraph
from .linalg import min_eigenvalue

log = logging.getLogger(__name__)

STEP_FRACTION = 0.98


class SdpNumericalError(RuntimeError):
    def __init__(self, message: str, iteration: int):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class ConstraintBlock:
    """Constraints sharing a sparsity pattern size.

    Constraint ``k`` is ``sum_p vals[k, p] * E[rows[k, p], cols[k, p]]``;
    off-diagonal entries are listed in both orientations.
    """

    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @property
    def size(self) -> int:
        return self.rows.shape[0]

    @property
    def width(self) -> int:
        return self.rows.shape[1]

    @cached_property
    def partner(self) -> tuple[int, ...] | None:
        """``partner[p]`` is the column holding the transposed entry of column ``p``."""
        out = []
        for p in range(self.width):
            for r in range(self.width):
                if (np.array_equal(self.rows[:, r], self.cols[:, p])
                        and np.array_equal(self.cols[:, r], self.rows[:, p])
                        and np.array_equal(self.vals[:, r], self.vals[:, p])):
                    out.append(r)
                    break
            else:
                return None
        return tuple(out)

    @cached_property
    def scalar_vals(self) -> tuple:
        """Per column, the common coefficient if all constraints share it, else ``None``."""
        return tuple(float(v[0]) if np.all(v == v[0]) else None for v in self.vals.T)


def _block(entries: list[list[tuple[int, int, float]]]) -> ConstraintBlock:
    width = len(entries[0])
    r = np.array([[e[0] for e in row] for row in entries], dtype=np.intp).reshape(-1, width)
    c = np.array([[e[1] for e in row] for row in entries], dtype=np.intp).reshape(-1, width)
    v = np.array([[e[2] for e in row] for row in entries], dtype=float).reshape(-1, width)
    return ConstraintBlock(r, c, v)


@dataclass(frozen=True)
class SdpProblem:
    C: np.ndarray
    b: np.ndarray
    blocks: tuple[ConstraintBlock, ...]

    @property
    def dim(self) -> int:
        return self.C.shape[0]

    @property
    def num_constraints(self) -> int:
        return sum(bl.size for bl in self.blocks)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return np.concatenate([(bl.vals * X[bl.rows, bl.cols]).sum(axis=1) for bl in self.blocks])

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(self.C)
        start = 0
        for bl in self.blocks:
            yb = y[start:start + bl.size]
            np.add.at(out, (bl.rows, bl.cols), bl.vals * yb[:, None])
            start += bl.size
        return out

    def constraint_matrix(self, k: int) -> np.ndarray:
        e = np.zeros(self.num_constraints)
        e[k] = 1.0
        return self.adjoint(e)

    @cached_property
    def gram_diagonal(self) -> np.ndarray | None:
        """Diagonal of ``A A*`` when constraint supports are pairwise disjoint, else ``None``."""
        seen = set()
        for bl in self.blocks:
            for rr, cc in zip(bl.rows.tolist(), bl.cols.tolist()):
                cells = set(zip(rr, cc))
                if cells & seen:
                    return None
                seen |= cells
        return np.concatenate([(bl.vals ** 2).sum(axis=1) for bl in self.blocks])

    def project(self, X: np.ndarray) -> np.ndarray | None:
        """Frobenius projection of ``X`` onto ``A(X) = b`` (disjoint supports only)."""
        g = self.gram_diagonal
        if g is None:
            return None
        return X + self.adjoint((self.b - self.apply(X)) / g)

    def schur(self, X: np.ndarray, Zi: np.ndarray) -> np.ndarray:
        """``M[k, l] = <A_k, X A_l Zi>`` (the HKM Schur complement)."""
        K = self.num_constraints
        M = np.empty((K, K))
        offs = np.cumsum([0] + [bl.size for bl in self.blocks])
        for s, bs in enumerate(self.blocks):
            for t in range(s, len(self.blocks)):
                bt = self.blocks[t]
                acc = self._schur_block(bs, bt, X, Zi, diagonal=(s == t))
                M[offs[s]:offs[s + 1], offs[t]:offs[t + 1]] = acc
                if t != s:
                    M[offs[t]:offs[t + 1], offs[s]:offs[s + 1]] = acc.T
        return M

    @staticmethod
    def _schur_block(bs, bt, X, Zi, diagonal):
        # Within a diagonal block, term (p, r) is the transpose of term
        # (partner[r], partner[p]); after symmetrising one of each pair suffices.
        terms = []
        skip = set()
        pt = bs.partner if diagonal else None
        for p in range(bs.width):
            for r in range(bt.width):
                if (p, r) in skip:
                    continue
                mult = 1.0
                if pt is not None:
                    twin = (pt[r], pt[p])
                    if twin != (p, r):
                        skip.add(twin)
                        mult = 2.0
                terms.append((p, r, mult))
        acc = np.zeros((bs.size, bt.size))
        tmp = np.empty_like(acc)
        for p, r, mult in terms:
            gx = np.take(X[bs.cols[:, p]], bt.rows[:, r], axis=1)
            gz = np.take(Zi[bs.rows[:, p]], bt.cols[:, r], axis=1)
            np.multiply(gx, gz, out=tmp)
            cs, ct = bs.scalar_vals[p], bt.scalar_vals[r]
            if cs is not None and ct is not None:
                tmp *= mult * cs * ct
            else:
                tmp *= bs.vals[:, p][:, None]
                tmp *= bt.vals[:, r][None, :]
                if mult != 1.0:
                    tmp *= mult
            acc += tmp
        if diagonal:
            acc += acc.T
            acc *= 0.5
        return acc


@dataclass
class SdpResult:
    X: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    converged: bool
    iterations: int
    rel_gap: float
    pinf: float
    dinf: float
    history: list = field(default_factory=list)


def _max_step(X: np.ndarray, dX: np.ndarray, L: np.ndarray | None = None) -> float:
    """Largest ``a`` with ``X + a dX`` psd (``inf`` if unbounded)."""
    if L is None:
        L = np.linalg.cholesky(X)
    W = scipy.linalg.solve_triangular(L, dX, lower=True)
    W = scipy.linalg.solve_triangular(L, W.T, lower=True)
    lam = float(scipy.linalg.eigvalsh((W + W.T) / 2, subset_by_index=[0, 0])[0])
    return np.inf if lam >= 0 else -1.0 / lam


def _sym(a):
    return (a + a.T) / 2


def solve_sdp(
    prob: SdpProblem,
    gap_tol: float = 1e-8,
    feas_tol: float = 1e-10,
    max_iter: int = 100,
    step_fraction: float = STEP_FRACTION,
    X0: np.ndarray | None = None,
    Z0: np.ndarray | None = None,
    strict: bool = True,
    stall_limit: int = 6,
    monitor=None,
) -> SdpResult:
    """Infeasible-start primal-dual path following (HKM, Mehrotra predictor-corrector).

    Stops when the relative gap ``|<C,X> - b'y| / (1 + |<C,X>| + |b'y|)`` is
    below ``gap_tol`` and both relative infeasibilities are below
    ``feas_tol``.  On a numerical breakdown (Schur system or iterate no
    longer positive definite) raises :class:`SdpNumericalError`, or with
    ``strict=False`` returns the best iterate seen, marked as not converged.
    The same happens when, with the gap already below ``sqrt(gap_tol)``,
    ``stall_limit`` iterations pass without a 10% drop in the worst of the
    three scaled stopping measures.  A ``monitor(X, y, Z)`` callable, if
    given, replaces that measure: the run stops once it returns a value
    at most 1 and otherwise keeps the iterate with the smallest value.

    When all constraint matrices have disjoint supports, every new primal
    iterate is projected back onto ``A(X) = b`` (if it stays positive
    definite), which stops rounding errors in the Schur solve from building
    up primal infeasibility.
    """
    d = prob.dim
    C, b = prob.C, prob.b
    normb = 1.0 + np.linalg.norm(b)
    normC = 1.0 + np.linalg.norm(C)
    if X0 is None or Z0 is None:
        anorm = max(np.sqrt((bl.vals ** 2).sum(axis=1)).max() for bl in prob.blocks)
        xi = max(10.0, np.sqrt(d), d * float(np.max((1 + np.abs(b)) / (1 + anorm))))
        eta = max(10.0, np.sqrt(d), float(np.linalg.norm(C)), anorm)
        X = xi * np.eye(d) if X0 is None else X0.copy()
        Z = eta * np.eye(d) if Z0 is None else Z0.copy()
    else:
        X, Z = X0.copy(), Z0.copy()
    y = np.zeros(prob.num_constraints)
    history = []
    best = None
    stall = 0
    it = 0
    while True:
        Rp = b - prob.apply(X)
        Rd = C - Z - prob.adjoint(y)
        pobj = float(np.sum(C * X))
        dobj = float(b @ y)
        rel_gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pinf = float(np.linalg.norm(Rp)) / normb
        dinf = float(np.linalg.norm(Rd)) / normC
        history.append((it, pobj, dobj, rel_gap, pinf, dinf))
        log.debug("it %d pobj %.10g dobj %.10g gap %.2e pinf %.2e dinf %.2e", *history[-1])
        if monitor is None:
            merit = max(rel_gap / gap_tol, pinf / feas_tol, dinf / feas_tol)
        else:
            merit = monitor(X, y, Z)
        if best is None or merit < 0.9 * best[0] or rel_gap > np.sqrt(gap_tol):
            stall = 0
        else:
            stall += 1
        if best is None or merit < best[0]:
            best = (merit, SdpResult(X, y, Z, merit <= 1.0, it, rel_gap, pinf, dinf, history))
        if merit <= 1.0:
            return best[1]
        if it >= max_iter or stall >= stall_limit:
            return best[1]
        it += 1
        try:
            X, y, Z = _step(prob, X, y, Z, Rp, Rd, step_fraction, it)
        except SdpNumericalError:
            if strict:
                raise
            log.debug("numerical breakdown at iteration %d; returning best iterate", it)
            return best[1]
        Xp = prob.project(X)
        if Xp is not None:
            try:
                np.linalg.cholesky(Xp)
                X = Xp
            except np.linalg.LinAlgError:
                pass


def _step(prob, X, y, Z, Rp, Rd, step_fraction, it):
    d = prob.dim
    mu = float(np.sum(X * Z)) / d
    try:
        LZ = np.linalg.cholesky(Z)
        LX = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        raise SdpNumericalError("iterate lost positive definiteness", it) from None
    Zi = scipy.linalg.cho_solve((LZ, True), np.eye(d))
    Zi = _sym(Zi)
    M = prob.schur(X, Zi)
    try:
        fac = scipy.linalg.cho_factor(M, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        shift = 1e-14 * float(np.max(np.abs(np.diag(M))))
        try:
            fac = scipy.linalg.cho_factor(M + shift * np.eye(M.shape[0]), lower=True)
        except np.linalg.LinAlgError:
            raise SdpNumericalError("Schur complement is not positive definite", it) from None
    XRdZi = X @ Rd @ Zi
    gram = prob.gram_diagonal

    def direction(R):
        rhs = Rp - prob.apply(R - XRdZi)
        dy = scipy.linalg.cho_solve(fac, rhs, check_finite=False)
        dZ = _sym(Rd - prob.adjoint(dy))
        dX = _sym(R - X @ dZ @ Zi)
        if gram is not None:
            # remove the primal residual the ill-conditioned Schur solve left behind
            dX = dX + prob.adjoint((Rp - prob.apply(dX)) / gram)
        return dX, dy, dZ

    dXp, dyp, dZp = direction(-X)
    ap = min(1.0, step_fraction * _max_step(X, dXp, LX))
    ad = min(1.0, step_fraction * _max_step(Z, dZp, LZ))
    mu_aff = float(np.sum((X + ap * dXp) * (Z + ad * dZp))) / d
    # short predictor steps mean poor centrality: centre harder and step
    # more cautiously
    expon = max(1.0, 3.0 * min(ap, ad) ** 2)
    sigma = min(1.0, max(mu_aff, 0.0) / mu) ** expon if mu > 0 else 0.0
    gamma = min(step_fraction, 0.9 + 0.09 * min(ap, ad))
    R = sigma * mu * Zi - X - _sym(dXp @ dZp @ Zi)
    dX, dy, dZ = direction(R)
    ap = min(1.0, gamma * _max_step(X, dX, LX))
    ad = min(1.0, gamma * _max_step(Z, dZ, LZ))
    log.debug("steps %.3f %.3f sigma %.3g", ap, ad, sigma)
    return _sym(X + ap * dX), y + ad * dy, _sym(Z + ad * dZ)


# -- theta formulation ------------------------------------------------------

@dataclass(frozen=True)
class ThetaStandardForm:
    """Standard-form encoding of the theta SDP pair for one graph.

    ``form="edge"``: the variable is the bordered primal ``[[1, x'], [x, X]]``
    with constraints ``Y00 = 1``, ``X_ii = x_i`` and ``X_ij = 0`` on edges
    (``1 + n + m`` of them); the dual slack is ``[[t, q'], [q, Q]]``.

    ``form="complement"``: roles swapped.  The variable is the dual matrix
    with constraints ``Q_ii + 2 q_i = -w_i`` and ``Q_ij = 0`` on non-edges
    (``n + m_bar``), and the slack is the bordered primal.
    """

    graph: WeightedGraph
    form: str
    problem: SdpProblem

    @property
    def dim(self) -> int:
        return self.problem.dim

    @property
    def num_constraints(self) -> int:
        return self.problem.num_constraints


def build_standard_form(g: WeightedGraph, form: str = "edge") -> ThetaStandardForm:
    n = g.n
    d = n + 1
    w = g.weights
    if form == "auto":
        nonedges = n * (n - 1) // 2 - g.m
        form = "complement" if n + nonedges < 1 + n + g.m else "edge"
    if form == "edge":
        C = np.zeros((d, d))
        C[0, 1:] = C[1:, 0] = -w / 2
        b = np.zeros(1 + n + g.m)
        b[0] = 1.0
        blocks = [_block([[(0, 0, 1.0)]])]
        if n:
            blocks.append(_block([[(i + 1, i + 1, 1.0), (0, i + 1, -0.5), (i + 1, 0, -0.5)] for i in range(n)]))
        if g.m:
            blocks.append(_block([[(i + 1, j + 1, 0.5), (j + 1, i + 1, 0.5)] for i, j in g.edges]))
    elif form == "complement":
        C = np.zeros((d, d))
        C[0, 0] = 1.0
        nonedges = [(i, j) for i in range(n) for j in range(i + 1, n) if not g.has_edge(i, j)]
        b = np.concatenate([-w, np.zeros(len(nonedges))])
        blocks = [_block([[(i + 1, i + 1, 1.0), (0, i + 1, 1.0), (i + 1, 0, 1.0)] for i in range(n)])]
        if nonedges:
            blocks.append(_block([[(i + 1, j + 1, 0.5), (j + 1, i + 1, 0.5)] for i, j in nonedges]))
    else:
        raise ValueError(f"unknown form {form!r}")
    return ThetaStandardForm(g, form, SdpProblem(C, b, tuple(blocks)))


@dataclass
class ThetaCertificate:
    """Primal ``(x, X)`` and dual ``(t, q, Q)`` solutions of the theta pair.

    Linear constraints of both sides hold to rounding error (one side by
    construction of the slack, the other by projection); ``primal_res`` and
    ``dual_res`` are the remaining psd violations and linear residuals.
    """

    theta: float
    x: np.ndarray
    X: np.ndarray
    t: float
    q: np.ndarray
    Q: np.ndarray
    gap: float
    primal_res: float
    dual_res: float
    iterations: int
    exact: bool = True
    eps_sdp: float = 1e-8
    form: str = "edge"
    step_fraction: float = STEP_FRACTION
    solve_time: float = 0.0

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def primal_matrix(self) -> np.ndarray:
        return _bordered(1.0, self.x, self.X)

    def dual_matrix(self) -> np.ndarray:
        return _bordered(self.t, self.q, self.Q)

    def support(self, eps_supp: float | None = None, rel: float = 1e-3) -> frozenset[int]:
        """Vertices with ``x_i`` above ``eps_supp`` (default ``rel * max x``)."""
        if self.n == 0:
            return frozenset()
        if eps_supp is None:
            eps_supp = rel * float(np.max(self.x))
        return frozenset(int(i) for i in np.flatnonzero(self.x > eps_supp))

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict:
        hx = lambda a: [float(v).hex() for v in np.asarray(a).ravel()]  # noqa: E731
        return {
            "schema": "thetavfa.certificate/1",
            "n": self.n,
            "theta": float(self.theta).hex(),
            "x": hx(self.x),
            "X": hx(self.X),
            "t": float(self.t).hex(),
            "q": hx(self.q),
            "Q": hx(self.Q),
            "gap": self.gap,
            "primal_res": self.primal_res,
            "dual_res": self.dual_res,
            "iterations": self.iterations,
            "exact": self.exact,
            "eps_sdp": self.eps_sdp,
            "form": self.form,
            "step_fraction": self.step_fraction,
            "solve_time": self.solve_time,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ThetaCertificate":
        n = int(data["n"])
        vec = lambda key: np.array([float.fromhex(v) for v in data[key]])  # noqa: E731
        mat = lambda key: vec(key).reshape(n, n)  # noqa: E731
        return cls(
            theta=float.fromhex(data["theta"]),
            x=vec("x"),
            X=mat("X"),
            t=float.fromhex(data["t"]),
            q=vec("q"),
            Q=mat("Q"),
            gap=float(data["gap"]),
            primal_res=float(data["primal_res"]),
            dual_res=float(data["dual_res"]),
            iterations=int(data["iterations"]),
            exact=bool(data.get("exact", True)),
            eps_sdp=float(data.get("eps_sdp", 1e-8)),
            form=data.get("form", "edge"),
            step_fraction=float(data.get("step_fraction", STEP_FRACTION)),
            solve_time=float(data.get("solve_time", 0.0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "ThetaCertificate":
        return cls.from_dict(json.loads(text))


def _bordered(corner: float, v: np.ndarray, M: np.ndarray) -> np.ndarray:
    n = v.shape[0]
    out = np.empty((n + 1, n + 1))
    out[0, 0] = corner
    out[0, 1:] = out[1:, 0] = v
    out[1:, 1:] = M
    return out


def _project_primal(g: WeightedGraph, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest (Frobenius) bordered matrix satisfying the primal linear constraints."""
    d = Y.shape[0]
    x = np.empty(d - 1)
    X = Y[1:, 1:].copy()
    for i in range(d - 1):
        x[i] = (Y[i + 1, i + 1] + 2 * Y[0, i + 1]) / 3
        X[i, i] = x[i]
    for i, j in g.edges:
        X[i, j] = X[j, i] = 0.0
    return x, X


def _project_dual(g: WeightedGraph, W: np.ndarray, repair: bool = False) -> tuple[float, np.ndarray, np.ndarray]:
    """Nearest (Frobenius) matrix satisfying ``Q_ii + 2q_i = -w_i`` and zero non-edges.

    With ``repair`` the correction ``D`` is followed by
    ``R = [[c, -r'], [-r, 2 Diag(r)]]`` with ``r_i`` the absolute row sums of
    ``D`` and ``c = sum(r_i + |D_0i|)``.  ``R`` leaves the constraints alone
    and ``D + R`` is diagonally dominant, so a psd ``W`` stays psd at the
    price of a slightly larger ``t``.
    """
    n = g.n
    w = g.weights
    q = W[0, 1:].copy()
    Q = W[1:, 1:].copy()
    for i in range(n):
        lam = (-w[i] - Q[i, i] - 2 * q[i]) / 3
        Q[i, i] += lam
        q[i] += lam
    mask = ~g.adjacency
    np.fill_diagonal(mask, False)
    Q[mask] = 0.0
    t = float(W[0, 0])
    if repair:
        dq = q - W[0, 1:]
        dQ = Q - W[1:, 1:]
        r = np.abs(dq) + np.abs(dQ).sum(axis=1)
        t += float(np.sum(r + np.abs(dq)))
        q = q - r
        Q[np.diag_indices(n)] += 2 * r
    return t, q, Q


def certificate_residuals(g: WeightedGraph, x, X, t, q, Q) -> dict:
    """Residual metrics of a candidate pair; independent of how it was produced."""
    n = g.n
    w = g.weights
    x = np.asarray(x, dtype=float)
    X = np.asarray(X, dtype=float)
    q = np.asarray(q, dtype=float)
    Q = np.asarray(Q, dtype=float)
    diag_p = float(np.max(np.abs(np.diag(X) - x))) if n else 0.0
    edge_p = max((abs(X[i, j]) for i, j in g.edges), default=0.0)
    sym_p = float(np.max(np.abs(X - X.T))) if n else 0.0
    psd_p = max(0.0, -min_eigenvalue(_bordered(1.0, x, X)))
    diag_d = float(np.max(np.abs(np.diag(Q) + 2 * q + w))) if n else 0.0
    mask = ~g.adjacency
    np.fill_diagonal(mask, False)
    nonedge_d = float(np.max(np.abs(Q[mask]))) if mask.any() else 0.0
    sym_d = float(np.max(np.abs(Q - Q.T))) if n else 0.0
    psd_d = max(0.0, -min_eigenvalue(_bordered(t, q, Q)))
    wmax = float(np.max(w)) if n else 1.0
    pobj = float(w @ x)
    return {
        "primal_linear": max(diag_p, edge_p, sym_p),
        "primal_psd": psd_p,
        "dual_linear": max(diag_d, nonedge_d, sym_d) / (1 + wmax),
        "dual_psd": psd_d / (1 + wmax),
        "gap": abs(pobj - t) / (1 + abs(t)),
        "primal_objective": pobj,
        "dual_objective": float(t),
    }


def solve_theta(
    g: WeightedGraph,
    eps_sdp: float = 1e-8,
    form: str = "auto",
    max_iter: int = 100,
    step_fraction: float = STEP_FRACTION,
) -> ThetaCertificate:
    """Solve the theta SDP pair of ``g`` to relative gap ``eps_sdp``.

    The returned certificate has ``exact=False`` when the iteration budget
    ran out before the gap and residual targets (``eps_sdp / 10``) were met.
    """
    if g.n < 1:
        raise ValueError("solve_theta needs at least one vertex")
    start = time.perf_counter()
    sf = build_standard_form(g, form)
    prob = sf.problem

    def extract(X, y):
        slack = prob.C - prob.adjoint(y)
        if sf.form == "edge":
            x, Xp = _project_primal(g, X)
            t, q, Q = float(slack[0, 0]), slack[0, 1:].copy(), slack[1:, 1:].copy()
        else:
            x, Xp = slack[0, 1:].copy(), slack[1:, 1:].copy()
            t, q, Q = _project_dual(g, X)
        r = certificate_residuals(g, x, Xp, t, q, Q)
        if sf.form == "complement" and r["dual_psd"] > 0:
            t2, q2, Q2 = _project_dual(g, X, repair=True)
            r2 = certificate_residuals(g, x, Xp, t2, q2, Q2)
            if max(r2["gap"], 10 * r2["dual_psd"]) < max(r["gap"], 10 * r["dual_psd"]):
                t, q, Q, r = t2, q2, Q2, r2
        primal_res = max(r["primal_linear"], r["primal_psd"])
        dual_res = max(r["dual_linear"], r["dual_psd"])
        return (x, Xp, t, q, Q), r["gap"], primal_res, dual_res

    def monitor(X, y, Z):
        _, gap, pres, dres = extract(X, y)
        return max(gap / eps_sdp, 10 * pres / eps_sdp, 10 * dres / eps_sdp)

    res = solve_sdp(prob, gap_tol=eps_sdp / 5, feas_tol=eps_sdp / 100, max_iter=max_iter,
                    step_fraction=step_fraction, strict=False, monitor=monitor)
    (x, X, t, q, Q), gap, primal_res, dual_res = extract(res.X, res.y)
    exact = gap <= eps_sdp and primal_res <= eps_sdp / 10 and dual_res <= eps_sdp / 10
    if not exact:
        log.warning("theta solve inexact: gap %.2e primal %.2e dual %.2e after %d iterations",
                    gap, primal_res, dual_res, res.iterations)
    return ThetaCertificate(
        theta=float(t),
        x=x,
        X=X,
        t=float(t),
        q=q,
        Q=Q,
        gap=gap,
        primal_res=primal_res,
        dual_res=dual_res,
        iterations=res.iterations,
        exact=bool(exact),
        eps_sdp=eps_sdp,
        form=sf.form,
        step_fraction=step_fraction,
        solve_time=time.perf_counter() - start,
    )


@dataclass
class CertificateReport:
    checks: dict  # name -> (value, threshold, passed)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, (_, _, ok) in self.checks.items() if not ok]

    def to_dict(self) -> dict:
        return {k: {"value": v, "threshold": th, "passed": ok} for k, (v, th, ok) in self.checks.items()}


def verify_certificate(g: WeightedGraph, cert: ThetaCertificate, tol: float = 1e-5) -> CertificateReport:
    """Re-check a certificate from scratch: gap within ``tol``, residuals within ``tol / 10``."""
    if cert.n != g.n or cert.X.shape != (g.n, g.n) or cert.Q.shape != (g.n, g.n) or cert.q.shape != (g.n,):
        raise ValueError(f"certificate dimension {cert.n} does not match graph with {g.n} vertices")
    r = certificate_residuals(g, cert.x, cert.X, cert.t, cert.q, cert.Q)
    checks = {
        "gap": (r["gap"], tol, r["gap"] <= tol),
        "primal_linear": (r["primal_linear"], tol / 10, r["primal_linear"] <= tol / 10),
        "primal_psd": (r["primal_psd"], tol / 10, r["primal_psd"] <= tol / 10),
        "dual_linear": (r["dual_linear"], tol / 10, r["dual_linear"] <= tol / 10),
        "dual_psd": (r["dual_psd"], tol / 10, r["dual_psd"] <= tol / 10),
        "theta_matches_t": (abs(cert.theta - cert.t), tol, abs(cert.theta - cert.t) <= tol * (1 + abs(cert.t))),
    }
    return CertificateReport(checks)
