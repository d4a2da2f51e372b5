import warnings

import pytest
from hypothesis import given

from thetavfa.dimacs import (
    BUNDLED,
    DimacsError,
    EdgeCountWarning,
    emit_dimacs,
    load_bundled,
    parse_dimacs,
    read_dimacs,
    write_dimacs,
)
from thetavfa.graph import WeightedGraph, path_graph

from test_graph import graphs


def test_path_on_three():
    g = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3\n")
    assert g == path_graph(3)


def test_index_out_of_range_reports_line():
    with pytest.raises(DimacsError) as err:
        parse_dimacs("p edge 2 1\ne 1 3\n", source="x.clq")
    assert err.value.line == 2
    assert "x.clq:2" in str(err.value)


@pytest.mark.parametrize("text", [
    "p edge 3\n",
    "p edge a 2\n",
    "e 1 2\n",
    "c only a comment\n",
    "p edge 2 1\ne 1 1\n",
    "p edge 2 1\ne 1 x\n",
    "p edge 2 0\nq 1 2\n",
    "p edge 2 0\np edge 2 0\n",
])
def test_malformed(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_edge_count_mismatch_warns_or_fails():
    text = "p edge 3 5\ne 1 2\n"
    with pytest.warns(EdgeCountWarning):
        g = parse_dimacs(text)
    assert g.m == 1
    with pytest.raises(DimacsError):
        parse_dimacs(text, strict_edge_count=True)


def test_comments_and_weights():
    g = parse_dimacs("c hello\np edge 2 1\nn 2 2.5\ne 1 2\n")
    assert list(g.weights) == [1.0, 2.5]


def test_complement_flag():
    g = parse_dimacs("p edge 3 1\ne 1 2\n", complement=True)
    assert set(g.edges) == {(0, 2), (1, 2)}


@pytest.mark.parametrize("name,n,m", [("johnson8-2-4", 28, 168), ("hamming6-2", 64, 192), ("MANN-a9", 45, 72)])
def test_bundled_complements(name, n, m):
    g = load_bundled(name)
    assert (g.n, g.m) == (n, m)
    raw = load_bundled(name, complement=False)
    assert raw.m == n * (n - 1) // 2 - m


def test_bundled_unknown():
    with pytest.raises(KeyError):
        load_bundled("keller6")
    assert len(BUNDLED) == 3


@given(graphs())
def test_round_trip(g):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert parse_dimacs(emit_dimacs(g, comment="two\nlines")) == g


def test_file_io(tmp_path):
    g = WeightedGraph(4, [(0, 3), (1, 2)], [1, 2, 3, 4])
    p = tmp_path / "g.clq"
    write_dimacs(g, p)
    assert read_dimacs(p) == g
