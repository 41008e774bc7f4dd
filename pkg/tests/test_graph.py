"""Graph model, parsing, serialization and elementary queries."""

from fractions import Fraction

import numpy as np
import pytest

from lapctrl import (GraphFormatError, LeaderSet, SignedGraph, accessible_nodes,
                     build_laplacian, is_connected, neighbors, parse_graph,
                     to_edge_list_text, to_json_text)
from lapctrl.fixtures import OPPOSITE_PAIR_MATRIX, opposite_pair_graph, path_graph

from helpers import np_rng, random_connected_graph, random_directed_graph


def test_parse_basic_edge_list():
    g = parse_graph("u 5\n0 1 1\n1 2 -1")
    assert g.n == 5 and not g.directed
    assert g.edges == ((0, 1, Fraction(1)), (1, 2, Fraction(-1)))


def test_parse_comments_rationals_and_floats():
    g = parse_graph("# header comment\nu 3\n0 1 3/2  # inline\n1 2 -0.5\n")
    assert g.edges[0][2] == Fraction(3, 2)
    assert isinstance(g.edges[1][2], float) and g.edges[1][2] == -0.5
    assert not g.weights_exact


@pytest.mark.parametrize("text,fragment", [
    ("u 2\n0 0 1", "self-loop"),
    ("u 2\n0 1 0", "zero edge weight"),
    ("u 2\n0 1 1\n1 0 2", "duplicate"),
    ("u 2\n0 3 1", "out of range"),
    ("u 2\n0 1", "expected 'i j w'"),
    ("x 2\n", "header"),
    ("u 2\n0 1 1/0", "bad weight"),
    ("", "empty graph file"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(GraphFormatError) as err:
        parse_graph(text)
    assert fragment in str(err.value)


def test_parse_error_reports_line_number():
    with pytest.raises(GraphFormatError) as err:
        parse_graph("u 3\n0 1 1\n0 1 2\n")
    assert err.value.line == 3


def test_opposite_pair_fixture_matches_printed_matrix():
    g = opposite_pair_graph()
    L = build_laplacian(g, "signed")
    assert np.array_equal(L.data, np.array(OPPOSITE_PAIR_MATRIX, dtype=float))


def test_round_trip_edge_list_and_json():
    rng = np_rng(11)
    for k in range(20):
        g = random_connected_graph(rng, int(rng.integers(2, 9)),
                                   weights="rational" if k % 2 else "float")
        assert parse_graph(to_edge_list_text(g)) == g
        assert parse_graph(to_json_text(g)) == g


def test_serialization_is_byte_deterministic():
    g = random_connected_graph(np_rng(3), 6)
    assert to_edge_list_text(g) == to_edge_list_text(parse_graph(to_edge_list_text(g)))
    assert to_json_text(g) == to_json_text(parse_graph(to_json_text(g)))


def test_json_labels_round_trip():
    text = '{"directed": false, "n": 2, "edges": [[0, 1, "1/3"]], "labels": ["a", "b"]}'
    g = parse_graph(text)
    assert g.labels == ("a", "b")
    assert g.edges[0][2] == Fraction(1, 3)
    assert parse_graph(to_json_text(g)) == g


def test_neighbors_path_and_isolated():
    g = parse_graph("u 3\n0 1 2\n1 2 -3")
    assert neighbors(g, 1) == [(0, Fraction(2)), (2, Fraction(-3))]
    g_iso = SignedGraph(2, False, ())
    assert neighbors(g_iso, 0) == []


def test_neighbors_opposite_pair_fixture_node4():
    # row 5 of the printed matrix: entries -a at columns 2,3,4
    g = opposite_pair_graph()
    assert sorted(neighbors(g, 4)) == [(1, Fraction(1)), (2, Fraction(-1)),
                                       (3, Fraction(1))]


def test_is_connected():
    assert is_connected(SignedGraph(1, False, ()))
    assert not is_connected(SignedGraph(2, False, ()))
    assert is_connected(parse_graph("u 3\n0 1 1\n1 2 -1"))


def test_accessible_nodes_examples():
    path = path_graph(3)
    assert accessible_nodes(path, [0]) == {0, 1, 2}
    two_comp = SignedGraph(4, False, ((0, 1, Fraction(1)), (2, 3, Fraction(1))))
    assert accessible_nodes(two_comp, [0]) == {0, 1}
    chain = SignedGraph(3, True, ((0, 1, Fraction(1)), (1, 2, Fraction(1))))
    assert accessible_nodes(chain, [2]) == {2}
    assert accessible_nodes(chain, [0]) == {0, 1, 2}


def test_accessible_nodes_monotone_in_leaders():
    rng = np_rng(5)
    for _ in range(25):
        g = random_directed_graph(rng, int(rng.integers(2, 8)))
        ids = list(rng.permutation(g.n))
        small = sorted(ids[:1 + int(rng.integers(0, g.n - 1))])
        big = sorted(set(small) | {ids[-1]})
        assert accessible_nodes(g, small) <= accessible_nodes(g, big)


def test_accessible_all_for_connected_undirected():
    rng = np_rng(6)
    for _ in range(15):
        g = random_connected_graph(rng, int(rng.integers(2, 9)))
        leader = int(rng.integers(0, g.n))
        assert accessible_nodes(g, [leader]) == set(range(g.n))


def test_leader_set_validation():
    with pytest.raises(GraphFormatError):
        LeaderSet(())
    with pytest.raises(GraphFormatError):
        LeaderSet((2, 1))
    ls = LeaderSet.of([3, 1])
    assert ls.ids == (1, 3)
    with pytest.raises(GraphFormatError):
        ls.check_against(3)
