import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetavfa.chordal import exact_mwis_chordal
from thetavfa.dimacs import load_bundled
from thetavfa.exact import exact_mwis_bruteforce, exact_mwis_generalized_split, stability_number
from thetavfa.generators import generate_chordal, generate_generalized_split
from thetavfa.graph import WeightedGraph, complete_graph, cycle_graph, empty_graph, path_graph, star_graph
from thetavfa.rounding import (
    BUDGET_CONSTANT,
    RoundingTrace,
    Select,
    check_weight_equality_condition,
    phase_one,
    random_selector,
    round_benson_ye,
    round_greedy,
    round_lookahead,
    round_lookahead_counipolar,
)
from thetavfa.sdp import solve_theta
from thetavfa.vfa import LpVfa, VfaContext, solve_clique_lp

from conftest import perfect_instances
from rounding_helpers import iterations, soundness_violations


def _ctx(cert, backend="cg"):
    return VfaContext.from_certificate(cert, backend=backend)


def _check_trace(g, trace):
    assert g.is_stable(trace.stable_set.vertices)
    terminal = [e.vertex for e in trace.events]
    assert len(terminal) == len(set(terminal))
    assert set(trace.selected).isdisjoint(trace.discarded)
    assert trace.eval_count <= BUDGET_CONSTANT * max(g.n, 1) ** 3


def test_lookahead_small_examples():
    g = complete_graph(5)
    cert = solve_theta(g)
    s, trace = round_lookahead(g, cert, _ctx(cert))
    assert len(s) == 1 and s.weight == 1
    _check_trace(g, trace)

    g = path_graph(3)
    cert = solve_theta(g)
    s, trace = round_lookahead(g, cert, _ctx(cert))
    assert s.vertices == (0, 2)
    assert [e.vertex for e in trace.events if e.kind == "phase1_discard"] == [1]


def test_phase_one_support():
    g = path_graph(3)
    keep, events = phase_one(g, solve_theta(g).x)
    assert keep == {0, 2} and events[0].kind == "phase1_discard"


@pytest.mark.parametrize("g", [WeightedGraph(0, []), WeightedGraph(1, [], [3.0]), empty_graph(4)])
def test_degenerate_inputs(g):
    cert = solve_theta(g) if g.n else None
    if cert is None:
        return
    for s, _ in (round_lookahead(g, cert, _ctx(cert)), round_greedy(g, _ctx(cert))):
        assert s.vertices == tuple(range(g.n))


def test_empty_graph_greedy():
    g = WeightedGraph(0, [])
    s, trace = round_greedy(g, VfaContext(np.zeros(0), np.zeros((0, 0))))
    assert s.vertices == () and trace.events == []


@pytest.mark.parametrize("seed", range(4))
def test_lookahead_chordal_n30(seed):
    g = generate_chordal(30, 0.5, seed=seed)
    cert = solve_theta(g, 1e-8)
    s, trace = round_lookahead(g, cert, _ctx(cert))
    assert s.weight == exact_mwis_chordal(g).weight
    _check_trace(g, trace)


@pytest.mark.parametrize("seed", range(6))
def test_counipolar_rule_on_generalized_split(seed):
    g, gs_cert = generate_generalized_split(30, seed=seed)
    cert = solve_theta(g, 1e-8)
    s, trace = round_lookahead_counipolar(g, cert, _ctx(cert), return_trace=True)
    assert s.weight == exact_mwis_generalized_split(g, gs_cert).weight
    assert trace.params["two_start"]


@pytest.mark.parametrize("seed", range(4))
def test_unipolar_needs_one_run(seed):
    g, _ = generate_generalized_split(25, kind="unipolar", seed=seed)
    cert = solve_theta(g, 1e-8)
    s, trace = round_lookahead_counipolar(g, cert, _ctx(cert), return_trace=True)
    assert s.weight == exact_mwis_bruteforce(g).weight
    assert trace.params["restarted"] is False


def test_no_lookahead_mode_commits_everything():
    g = generate_chordal(15, seed=2)
    cert = solve_theta(g)
    _, trace = round_lookahead(g, cert, _ctx(cert), lookahead=False)
    assert not any(e.kind == "lookahead_reject" for e in trace.events)
    assert trace.method == "no-lookahead"


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31))
def test_random_selectors_stay_optimal(seed):
    g = perfect_instances(1, (8, 16), seed=seed)[0]
    cert = solve_theta(g, 1e-8)
    s, trace = round_lookahead_counipolar(g, cert, _ctx(cert), return_trace=True,
                                          selector=random_selector(seed))
    _check_trace(g, trace)
    assert s.weight <= cert.theta + 1e-6
    assert s.weight == pytest.approx(stability_number(g), abs=1e-6)


def test_greedy_examples():
    g = star_graph(4)
    s, trace = round_greedy(g, VfaContext(np.zeros(5), np.eye(5)))
    assert s.vertices == (1, 2, 3, 4) and all(e.kind == "forced_leaf" for e in trace.events)
    g = cycle_graph(5)
    s, _ = round_greedy(g, _ctx(solve_theta(g)))
    assert s.weight == 2


@pytest.mark.parametrize("name,weight", [("johnson8-2-4", 4), ("hamming6-2", 32)])
def test_greedy_dimacs(name, weight):
    g = load_bundled(name)
    s, trace = round_greedy(g, _ctx(solve_theta(g, 1e-5)))
    assert s.weight == weight
    _check_trace(g, trace)


def test_benson_ye_examples():
    g = complete_graph(6)
    res = round_benson_ye(g, solve_theta(g))
    assert res.best.weight == 1 and res.average == 1 and len(res.weights) == 6


def test_benson_ye_hamming():
    g = load_bundled("hamming6-2")
    cert = solve_theta(g, 1e-5)
    res = round_benson_ye(g, cert, runs=64, seed=0)
    assert res.best.weight == 32
    assert res.average <= res.best.weight <= 32


def test_benson_ye_deterministic_and_ordered():
    g = cycle_graph(7)
    cert = solve_theta(g)
    a = round_benson_ye(g, cert, seed=3)
    b = round_benson_ye(g, cert, seed=3)
    assert a.weights == b.weights and a.best == b.best
    assert a.average <= a.best.weight <= 3


def test_weight_equality_on_chordal():
    g = generate_chordal(20, seed=4)
    cert = solve_theta(g, 1e-8)
    _, trace = round_lookahead(g, cert, _ctx(cert), snapshots=True)
    rep = check_weight_equality_condition(trace, _ctx(cert, "pinv"))
    assert rep.ok and rep.rows


def test_weight_equality_on_complete_graph():
    g = complete_graph(4)
    cert = solve_theta(g)
    _, trace = round_lookahead(g, cert, _ctx(cert), snapshots=True)
    rep = check_weight_equality_condition(trace, _ctx(cert, "pinv"))
    assert len(rep.rows) == 1 and rep.ok


def test_weight_equality_flags_forged_selection():
    g = path_graph(3)
    cert = solve_theta(g)
    _, trace = round_lookahead(g, cert, _ctx(cert), snapshots=True)
    trace.snapshots.append({"vertex": 1, "I": [0, 1, 2], "I_prime": [], "V_I": None, "V_I_prime": None,
                            "w": 1.0, "committed": True})
    rep = check_weight_equality_condition(trace, _ctx(cert, "pinv"))
    assert rep.violations == (1,)


def test_weight_equality_needs_snapshots():
    g = path_graph(3)
    cert = solve_theta(g)
    _, trace = round_lookahead(g, cert, _ctx(cert))
    with pytest.raises(ValueError):
        check_weight_equality_condition(trace, _ctx(cert))


def test_trace_validation_and_json():
    g = path_graph(3)
    cert = solve_theta(g)
    s, trace = round_lookahead(g, cert, _ctx(cert), snapshots=True)
    back = RoundingTrace.from_dict(trace.to_dict(), g)
    assert back.events == trace.events and back.stable_set == s
    with pytest.raises(ValueError):
        RoundingTrace("lookahead", [Select(0), Select(0)], s, 0, 3)


@pytest.mark.parametrize("k", range(8))
def test_discard_and_lookahead_soundness(k):
    g = perfect_instances(8, (8, 16), seed=41)[k]
    cert = solve_theta(g, 1e-8)
    for selector in (None, random_selector(k)):
        kw = {} if selector is None else {"selector": selector}
        _, trace = round_lookahead(g, cert, _ctx(cert), snapshots=True, **kw)
        list(iterations(trace))
        assert soundness_violations(g, trace) == []


def test_lookahead_with_lp_vfa():
    g = path_graph(5, [1, 2, 3, 2, 1])
    cert = solve_theta(g)
    lp = LpVfa(solve_clique_lp(g))
    s, _ = round_lookahead(g, cert, lp)
    assert s.weight == stability_number(g)


@pytest.mark.parametrize("k", range(4))
def test_sandwich(k):
    g = perfect_instances(4, (10, 20), seed=61)[k]
    cert = solve_theta(g, 1e-8)
    ctx = _ctx(cert)
    for s in (round_lookahead(g, cert, ctx)[0], round_greedy(g, ctx)[0], round_benson_ye(g, cert).best):
        assert g.is_stable(s.vertices)
        assert s.weight <= cert.theta + 1e-6
    assert abs(round_greedy(g, ctx)[0].weight - cert.theta) <= 1e-4 * (1 + cert.theta)
