"""Pattern detectors, multiplicity prediction and the input-deficit test."""

from fractions import Fraction

import pytest

from lapctrl import (BudgetExceededError, SignedGraph, build_laplacian,
                     degeneracy_report, find_identical_groups,
                     find_opposite_pairs, find_zero_circles, insufficiency_check,
                     pair_certifies_kernel, predict_multiplicity,
                     scan_zero_circles, zero_multiplicity)
from lapctrl.degeneracy import (ALTERNANT, INCONCLUSIVE, TWO_ADJACENT_PAIRS,
                                UNCONTROLLABLE, contributing_circles)
from lapctrl.fixtures import (alternant_cycle, complete_graph, cycle_graph,
                              degeneracy_fixtures, identical_nodes_graph,
                              opposite_pair_graph, path_graph, two_run_cycle)

from helpers import np_rng, random_connected_graph, relabel


def test_alternant_cycle_detected():
    circles = find_zero_circles(alternant_cycle(6))
    assert len(circles) == 1
    assert circles[0].mode == ALTERNANT
    assert circles[0].nodes == (0, 1, 2, 3, 4, 5)


def test_two_run_cycle_detected():
    circles = find_zero_circles(two_run_cycle(6))
    assert len(circles) == 1 and circles[0].mode == TWO_ADJACENT_PAIRS


def test_odd_cycle_not_detected():
    assert find_zero_circles(cycle_graph(3)) == []
    # even cycle, but all-positive weights
    assert find_zero_circles(cycle_graph(6)) == []


def test_unequal_magnitude_cycle_is_near_miss():
    g = SignedGraph(4, False, ((0, 1, Fraction(1)), (1, 2, Fraction(-2)),
                               (2, 3, Fraction(1)), (3, 0, Fraction(-2))))
    scan = scan_zero_circles(g)
    assert scan.circles == () and len(scan.near_misses) == 1
    # and indeed the kernel is simple: the pattern alone is not enough
    assert zero_multiplicity(build_laplacian(g, "signed")) == 1


def test_identical_group_fixture():
    groups = find_identical_groups(identical_nodes_graph())
    assert len(groups) == 1
    grp = groups[0]
    assert grp.inside == (3, 4, 5) and grp.outside == (0, 1, 2)
    assert grp.alpha == Fraction(1)


def test_identical_groups_absent():
    assert find_identical_groups(path_graph(4)) == []
    # triangle without the required outside connections
    assert find_identical_groups(complete_graph(3)) == []


def test_opposite_pair_fixture():
    pairs = find_opposite_pairs(opposite_pair_graph())
    assert [(p.i, p.j, p.common) for p in pairs] == [(3, 4, (1, 2))]
    assert pair_certifies_kernel(opposite_pair_graph(), pairs[0])


def test_opposite_pairs_absent_on_positive_graphs():
    assert find_opposite_pairs(complete_graph(4)) == []


def test_opposite_pair_four_node_example():
    g = SignedGraph(4, False, ((0, 2, Fraction(1)), (0, 3, Fraction(1)),
                               (1, 2, Fraction(-1)), (1, 3, Fraction(-1))))
    pairs = find_opposite_pairs(g)
    assert [(p.i, p.j) for p in pairs] == [(0, 1)]
    k, _ = predict_multiplicity(g)
    assert k == 2 == zero_multiplicity(build_laplacian(g, "signed"))


def test_predict_multiplicity_fixture_values():
    for case in degeneracy_fixtures():
        k, _ = predict_multiplicity(case.graph)
        assert k == case.expected_multiplicity, case.name


def test_reports_agree_on_fixtures():
    for case in degeneracy_fixtures():
        rep = degeneracy_report(case.graph)
        assert rep.agree and rep.k_numeric == case.expected_multiplicity, case.name


def test_report_json_shape():
    doc = degeneracy_report(opposite_pair_graph()).to_dict()
    assert set(doc) == {"circles", "groups", "pairs", "k_structural",
                        "k_numeric", "agree"}


def test_removing_circle_edge_drops_multiplicity():
    g = alternant_cycle(6)
    k_before, _ = predict_multiplicity(g)
    pruned = SignedGraph(6, False, g.edges[1:])
    k_after, _ = predict_multiplicity(pruned)
    assert k_before == 2 and k_after == 1
    assert zero_multiplicity(build_laplacian(pruned, "signed")) == 1


def test_detectors_equivariant_under_relabeling():
    rng = np_rng(23)
    for case in degeneracy_fixtures():
        perm = list(rng.permutation(case.graph.n))
        mapped = relabel(case.graph, perm)
        k1, _ = predict_multiplicity(case.graph)
        k2, _ = predict_multiplicity(mapped)
        assert k1 == k2, case.name
        orig_groups = {frozenset(perm[i] for i in grp.inside)
                       for grp in find_identical_groups(case.graph)}
        assert orig_groups == {frozenset(grp.inside)
                               for grp in find_identical_groups(mapped)}
        orig_circles = {frozenset(perm[i] for i in c.nodes)
                        for c in contributing_circles(case.graph)}
        assert orig_circles == {frozenset(c.nodes)
                                for c in contributing_circles(mapped)}


def test_agree_flag_is_honest_on_random_graphs():
    rng = np_rng(77)
    for _ in range(60):
        g = random_connected_graph(rng, int(rng.integers(3, 9)), weights="unit")
        rep = degeneracy_report(g)
        assert rep.agree == (rep.k_structural == rep.k_numeric)
        # firing detectors must explain at least the baseline kernel
        assert rep.k_structural >= 1 and rep.k_numeric >= 1


def test_contributing_patterns_match_numeric_on_clean_embeddings():
    # zero circle and opposite pair attached to a host path: still exact
    base = alternant_cycle(4)
    host = SignedGraph(7, False, base.edges + (
        (0, 4, Fraction(2)), (4, 5, Fraction(-1)), (5, 6, Fraction(1))))
    rep = degeneracy_report(host)
    assert rep.agree and rep.k_structural == 2


def test_cycle_budget_exceeded():
    with pytest.raises(BudgetExceededError):
        find_zero_circles(complete_graph(8), budget=3)


def test_insufficiency_examples():
    assert insufficiency_check(alternant_cycle(6), [0]).verdict == UNCONTROLLABLE
    assert insufficiency_check(path_graph(4), [0]).verdict == INCONCLUSIVE
    v = insufficiency_check(identical_nodes_graph(), [0, 1])
    assert v.verdict == UNCONTROLLABLE and v.k_numeric == 3 and v.q == 2
