import json

import numpy as np
import pytest

from thetavfa.exact import exact_mwis_bruteforce, optimal_vertices
from thetavfa.graph import WeightedGraph, complete_graph, cycle_graph, empty_graph, path_graph, petersen_graph
from thetavfa.linalg import min_eigenvalue
from thetavfa.sdp import (
    ThetaCertificate,
    build_standard_form,
    certificate_residuals,
    solve_theta,
    verify_certificate,
)
from thetavfa.dimacs import load_bundled

from conftest import perfect_instances


def _theta_odd_cycle(n):
    c = np.cos(np.pi / n)
    return n * c / (1 + c)


@pytest.mark.parametrize("g,count", [
    (WeightedGraph(1, []), 2),
    (complete_graph(2), 4),
    (path_graph(3), 6),
])
def test_standard_form_sizes(g, count):
    sf = build_standard_form(g, "edge")
    assert sf.dim == g.n + 1
    assert sf.num_constraints == count


def test_complement_form_size():
    g = path_graph(4)
    sf = build_standard_form(g, "complement")
    assert sf.num_constraints == g.n + (g.n * (g.n - 1) // 2 - g.m)
    assert build_standard_form(complete_graph(6), "auto").form == "complement"
    assert build_standard_form(empty_graph(6), "auto").form == "edge"


@pytest.mark.parametrize("form", ["edge", "complement"])
def test_theta_examples(form):
    cert = solve_theta(empty_graph(3), form=form)
    assert cert.theta == pytest.approx(3, abs=1e-6)
    assert np.allclose(cert.x, 1, atol=1e-6)
    cert = solve_theta(complete_graph(3), form=form)
    assert cert.theta == pytest.approx(1, abs=1e-6)
    assert np.allclose(cert.x, 1 / 3, atol=1e-6)
    cert = solve_theta(cycle_graph(5), form=form)
    assert cert.theta == pytest.approx(_theta_odd_cycle(5), abs=1e-6)
    assert cert.theta == pytest.approx(np.sqrt(5), abs=1e-6)


@pytest.mark.parametrize("n", [7, 9, 11])
def test_odd_cycles(n):
    assert solve_theta(cycle_graph(n)).theta == pytest.approx(_theta_odd_cycle(n), abs=1e-6)


def test_petersen_theta():
    assert solve_theta(petersen_graph()).theta == pytest.approx(4, abs=1e-6)


def test_mann_a9():
    cert = solve_theta(load_bundled("MANN-a9"), eps_sdp=1e-6)
    assert cert.theta == pytest.approx(17.475, abs=1e-2)


def test_certificate_invariants():
    g = petersen_graph().with_weights(np.arange(1, 11, dtype=float))
    cert = solve_theta(g, eps_sdp=1e-8)
    w = g.weights
    assert np.allclose(np.diag(cert.Q) + 2 * cert.q, -w, atol=1e-9)
    off = ~(g.adjacency.astype(bool) | np.eye(g.n, dtype=bool))
    assert np.all(cert.Q[off] == 0)
    assert min_eigenvalue(cert.primal_matrix()) >= -1e-9
    assert min_eigenvalue(cert.dual_matrix()) >= -1e-9
    assert abs(w @ cert.x - cert.t) <= cert.gap * (1 + abs(cert.t)) + 1e-12
    assert cert.gap <= 1e-8 and cert.exact


def test_verify_passes_and_catches_corruption():
    g = complete_graph(3)
    cert = solve_theta(g)
    assert verify_certificate(g, cert, 1e-5).passed
    bad = solve_theta(g)
    bad.q = bad.q.copy()
    bad.q[0] += 1
    rep = verify_certificate(g, bad, 1e-5)
    assert "dual_linear" in rep.failures()
    k2 = complete_graph(2)
    zero = solve_theta(k2)
    zero.X = np.zeros_like(zero.X)
    assert "primal_linear" in verify_certificate(k2, zero, 1e-5).failures()


def test_verify_dimension_mismatch():
    cert = solve_theta(complete_graph(3))
    with pytest.raises(ValueError):
        verify_certificate(complete_graph(4), cert)


def test_json_round_trip_is_exact():
    g = cycle_graph(7)
    cert = solve_theta(g)
    back = ThetaCertificate.from_json(cert.to_json())
    assert np.array_equal(back.X, cert.X) and np.array_equal(back.Q, cert.Q)
    assert back.theta == cert.theta and back.form == cert.form
    assert json.loads(cert.to_json())["schema"] == "thetavfa.certificate/1"


def test_residual_helper_agrees():
    g = path_graph(5)
    cert = solve_theta(g)
    res = certificate_residuals(g, cert.x, cert.X, cert.t, cert.q, cert.Q)
    for key in ("primal_linear", "primal_psd", "dual_linear", "dual_psd"):
        assert res[key] <= 1e-8
    assert res["primal_objective"] == pytest.approx(res["dual_objective"], abs=1e-6)


def test_reporting_tolerance():
    g = perfect_instances(1, (20, 21), seed=3)[0]
    cert = solve_theta(g, eps_sdp=1e-5)
    assert cert.gap <= 1e-5
    assert max(cert.primal_res, cert.dual_res) <= 1e-6
    assert verify_certificate(g, cert, 1e-5).passed


PERFECT = perfect_instances(12, (8, 20), seed=21)


@pytest.mark.parametrize("k", range(len(PERFECT)))
def test_sandwich_tightness_and_support(k):
    g = PERFECT[k]
    cert = solve_theta(g, eps_sdp=1e-8)
    alpha = exact_mwis_bruteforce(g).weight
    eps = 1e-8 * (1 + cert.theta)
    assert alpha <= cert.theta + eps
    assert g.weights @ cert.x <= cert.theta + eps
    assert abs(cert.theta - alpha) <= 1e-4 * (1 + alpha)
    assert cert.support() == optimal_vertices(g)


@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scaling_covariance(c):
    g = PERFECT[1]
    base = solve_theta(g)
    scaled = solve_theta(g.with_weights(c * g.weights))
    assert scaled.theta == pytest.approx(c * base.theta, rel=1e-7)
    assert scaled.support() == base.support()


def test_both_forms_agree():
    g = PERFECT[4]
    a = solve_theta(g, form="edge")
    b = solve_theta(g, form="complement")
    assert a.theta == pytest.approx(b.theta, abs=1e-6)
    assert np.allclose(a.x, b.x, atol=1e-4)
