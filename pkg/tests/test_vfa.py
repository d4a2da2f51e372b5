import itertools

import numpy as np
import pytest

from thetavfa.exact import stability_number
from thetavfa.graph import WeightedGraph, complete_graph, cycle_graph, empty_graph, path_graph, petersen_graph
from thetavfa.linalg import min_eigenvalue
from thetavfa.sdp import ThetaCertificate, solve_theta, verify_certificate
from thetavfa.vfa import (
    EXACT_RANK_TOL,
    LpDualCertificate,
    LpVfa,
    VfaContext,
    check_vfa_axioms,
    essential_cliques,
    eval_lp_vfa,
    eval_sdp_vfa,
    lp_dual_to_sdp_dual,
    solve_clique_lp,
)

from conftest import perfect_instances


@pytest.fixture(scope="module")
def p3():
    g = path_graph(3)
    return g, solve_theta(g)


def test_empty_set_is_zero(p3):
    _, cert = p3
    for backend in ("pinv", "cg"):
        ctx = VfaContext.from_certificate(cert, backend=backend)
        assert eval_sdp_vfa(ctx, []) == 0
        assert ctx.eval_count == 1


def test_singleton_with_matching_diagonal():
    # Q_ii = w_i forces q_i = -w_i and V({i}) = q_i^2 / Q_ii = w_i
    ctx = VfaContext([-2.0], [[2.0]], backend="pinv")
    assert ctx([0]) == pytest.approx(2.0)


def test_p3_tight(p3):
    g, cert = p3
    assert VfaContext.from_certificate(cert, backend="pinv")(range(3)) == pytest.approx(2, abs=1e-4)
    # the ridge biases the CG value down by about ridge * |y|^2
    cg = VfaContext.from_certificate(cert, backend="cg")
    v = cg(range(3))
    assert v <= 2 + 1e-6
    assert v == pytest.approx(2, abs=max(1e-4, 10 * cg.ridge * cg.last_y @ cg.last_y))


def test_counter_and_memo(p3):
    _, cert = p3
    ctx = VfaContext.from_certificate(cert)
    ctx([0, 1]); ctx([0, 1]); ctx([2])
    assert ctx.eval_count == 3
    ctx.reset_counters()
    assert ctx.eval_count == 0


def test_bad_context():
    with pytest.raises(ValueError):
        VfaContext([1.0], [[1.0]], backend="lu")
    with pytest.raises(ValueError):
        VfaContext([1.0, 2.0], [[1.0]])
    with pytest.raises(ValueError):
        VfaContext([1.0], [[1.0]], ridge=0)


def test_warm_start_matches_cold():
    g = petersen_graph()
    cert = solve_theta(g)
    ctx = VfaContext.from_certificate(cert, backend="cg", memo=False)
    s = set(range(10))
    while s:
        warm = ctx(s)
        assert warm == pytest.approx(ctx.value(s), abs=1e-5)
        s.discard(max(s))
    assert ctx.fallbacks == 0


def test_no_edge_additivity_is_exact():
    g = WeightedGraph(6, [(0, 1), (1, 2), (3, 4), (4, 5), (3, 5)])
    cert = solve_theta(g)
    for rank_tol in (1e-8, EXACT_RANK_TOL):
        v = VfaContext.from_certificate(cert, backend="pinv", rank_tol=rank_tol).value
        assert v(range(6)) == pytest.approx(v([0, 1, 2]) + v([3, 4, 5]), abs=1e-12)


def test_backends_agree_on_random_subsets():
    rng = np.random.default_rng(1)
    for g in perfect_instances(3, (15, 25), seed=5) + [petersen_graph()]:
        cert = solve_theta(g)
        cg = VfaContext.from_certificate(cert, backend="cg")
        pinv = VfaContext.from_certificate(cert, backend="pinv")
        for _ in range(30):
            s = [i for i in range(g.n) if rng.random() < 0.5]
            a = cg(s)
            y = cg.last_y if s else np.zeros(0)
            tol = max(1e-4, 10 * cg.ridge * float(y @ y))
            assert abs(a - pinv(s)) <= tol


def test_clique_lp_examples():
    k3 = solve_clique_lp(complete_graph(3))
    assert k3.value == pytest.approx(1, abs=1e-8)
    assert essential_cliques(k3) == [(0, 1, 2)]
    assert eval_lp_vfa(k3, [1]) == pytest.approx(1, abs=1e-8)
    assert eval_lp_vfa(k3, []) == 0

    one = solve_clique_lp(WeightedGraph(1, [], [5.0]))
    assert one.cliques == [(0,)] and one.mu[0] == pytest.approx(5)


def test_clique_lp_p3():
    cert = solve_clique_lp(path_graph(3))
    assert cert.value == pytest.approx(2, abs=1e-8)
    mu = dict(zip(cert.cliques, cert.mu))
    assert mu[(0, 1)] > 1e-3 and mu[(1, 2)] > 1e-3
    assert np.allclose(cert.x, [1, 0, 1], atol=1e-6)
    middle = eval_lp_vfa(cert, [1])
    assert middle == pytest.approx(mu[(0, 1)] + mu[(1, 2)])
    assert middle > 1 + 1e-6
    ess = essential_cliques(cert)
    assert (0, 1) in ess and (1, 2) in ess


def test_empty_graph_cliques():
    cert = solve_clique_lp(empty_graph(4))
    assert essential_cliques(cert) == [(0,), (1,), (2,), (3,)]


@pytest.mark.parametrize("k", range(6))
def test_lp_certificate_invariants(k):
    g = perfect_instances(6, (6, 14), seed=9)[k]
    cert = solve_clique_lp(g)
    assert np.all(cert.coverage() >= g.weights - 1e-12)
    assert cert.value == pytest.approx(cert.primal_value, abs=1e-6)
    assert cert.strict_complementarity > 1e-7
    wrapped = LpVfa(cert)
    for s in itertools.islice(itertools.combinations(range(g.n), 3), 20):
        assert wrapped(s) == pytest.approx(eval_lp_vfa(cert, s))


def test_lp_to_sdp_k2_hand_example():
    g = complete_graph(2)
    cert = solve_clique_lp(g)
    t, q, Q, M = lp_dual_to_sdp_dual(g, cert)
    assert np.allclose(M, [[1, -1, -1], [-1, 1, 1], [-1, 1, 1]], atol=1e-9)
    assert t == pytest.approx(1)


def test_lp_to_sdp_single_vertex():
    g = WeightedGraph(1, [])
    t, *_ = lp_dual_to_sdp_dual(g, solve_clique_lp(g))
    assert t == pytest.approx(1)


def test_lp_to_sdp_rejects_infeasible():
    g = path_graph(3)
    cert = solve_clique_lp(g)
    cert.mu = cert.mu * 0.5
    with pytest.raises(ValueError):
        lp_dual_to_sdp_dual(g, cert)


@pytest.mark.parametrize("k", range(5))
def test_lp_to_sdp_is_dual_optimal(k):
    g = perfect_instances(5, (5, 13), seed=17)[k]
    lp = solve_clique_lp(g)
    t, q, Q, M = lp_dual_to_sdp_dual(g, lp)
    assert np.allclose(np.diag(Q) + 2 * q, -g.weights, atol=1e-12)
    off = ~(g.adjacency.astype(bool) | np.eye(g.n, dtype=bool))
    assert np.all(Q[off] == 0)
    assert min_eigenvalue(M) >= -1e-10
    assert t == pytest.approx(lp.value, abs=1e-6)
    theta = solve_theta(g)
    assert t == pytest.approx(theta.theta, abs=1e-6)
    built = ThetaCertificate(theta=t, x=theta.x, X=theta.X, t=t, q=q, Q=Q, gap=0.0,
                             primal_res=0.0, dual_res=0.0, iterations=0)
    rep = verify_certificate(g, built, 1e-5)
    assert rep.checks["dual_linear"][2] and rep.checks["dual_psd"][2]


@pytest.mark.parametrize("k", range(6))
def test_axioms_and_upper_bound(k):
    g = perfect_instances(6, (6, 13), seed=23)[k]
    cert = solve_theta(g)
    lp = solve_clique_lp(g)
    pinv = VfaContext.from_certificate(cert, backend="pinv", rank_tol=EXACT_RANK_TOL)
    for value in (pinv.value, LpVfa(lp).value):
        rep = check_vfa_axioms(g, value, samples=100, seed=k)
        assert rep.passed, rep.to_dict()
    rng = np.random.default_rng(k)
    for _ in range(40):
        s = [i for i in range(g.n) if rng.random() < 0.6]
        alpha = stability_number(g, s)
        assert pinv.value(s) >= alpha - 1e-4
        assert LpVfa(lp).value(s) >= alpha - 1e-4


def test_axiom_checker_detects_bad_function():
    g = path_graph(4)
    rep = check_vfa_axioms(g, lambda s: float(len(s)) ** 2, samples=50)
    assert not rep.passed


def test_tight_on_perfect_families():
    for g in perfect_instances(6, (15, 25), seed=31):
        cert = solve_theta(g)
        alpha = stability_number(g)
        assert abs(VfaContext.from_certificate(cert, backend="pinv")(range(g.n)) - alpha) <= 1e-4 * (1 + alpha)


def test_imperfect_not_tight():
    cert = solve_theta(cycle_graph(5))
    v = VfaContext.from_certificate(cert, backend="pinv")(range(5))
    assert v == pytest.approx(np.sqrt(5), abs=1e-4)
