"""Structural controllability: verdicts, witnesses, dilations, tree ranks."""

from fractions import Fraction

import pytest

from lapctrl import (NotATreeError, Protocol, SignPattern, SignedGraph,
                     build_laplacian, dilation_check, kalman_dim, pst_check,
                     structural_verdict, system_pattern, witness_search)
from lapctrl.fixtures import (dilation_cactus, path_graph, pst_tree, star_graph,
                              t_star)
from lapctrl.graph import FREE

from helpers import np_rng, random_connected_graph, random_directed_graph


def test_verdict_connected_path():
    v = structural_verdict(path_graph(4), [0])
    assert v.controllable and v.reason == "ok"


def test_verdict_disconnected():
    g = SignedGraph(4, False, ((0, 1, Fraction(1)), (2, 3, Fraction(1))))
    v = structural_verdict(g, [0])
    assert not v.controllable and v.reason == "disconnected"


def test_verdict_directed_chain_unaccessible():
    chain = SignedGraph(3, True, ((0, 1, Fraction(1)), (1, 2, Fraction(-1))))
    v = structural_verdict(chain, [1])
    assert not v.controllable and v.unaccessible == (0,)


def test_verdicts_protocol_independent():
    rng = np_rng(41)
    for _ in range(20):
        g = random_directed_graph(rng, int(rng.integers(2, 8)))
        leaders = [int(rng.integers(0, g.n))]
        va = structural_verdict(g, leaders, protocol=Protocol.ABS)
        vs = structural_verdict(g, leaders, protocol=Protocol.SIGNED)
        assert va.verdict == vs.verdict and va.reason == vs.reason


def test_witness_search_finds_weights_quickly():
    g = random_connected_graph(np_rng(1), 6)
    witness = witness_search(g, [0], trials=5, seed=9)
    assert witness is not None
    dim = kalman_dim(build_laplacian(witness, Protocol.SIGNED), [0],
                     with_witnesses=False).dim
    assert dim == 6


def test_witness_search_none_on_disconnected():
    g = SignedGraph(4, False, ((0, 1, Fraction(1)), (2, 3, Fraction(1))))
    assert witness_search(g, [0], trials=30, seed=2) is None


def test_witness_search_requires_seed():
    with pytest.raises(ValueError):
        witness_search(path_graph(3), [0])


def test_t_star_free_pattern_has_witness():
    # unequal leader-edge weights break the fixed-dimension premise
    pattern = SignPattern.from_graph(t_star(5), free=True)
    witness = witness_search(pattern, [0], protocol=Protocol.SIGNED,
                             trials=20, seed=5)
    assert witness is not None


def test_dilation_cactus_example():
    A, leaders = dilation_cactus(with_self_loop=False)
    hit = dilation_check(A, leaders)
    assert hit is not None and set(hit.nodes) == {2, 3} and hit.neighborhood == (1,)
    A2, leaders = dilation_cactus(with_self_loop=True)
    assert dilation_check(A2, leaders) is None


def test_single_actuated_node_no_dilation():
    assert dilation_check([[False]], [0]) is None


def test_laplacian_form_never_has_dilation():
    rng = np_rng(44)
    for _ in range(15):
        g = random_connected_graph(rng, int(rng.integers(2, 7)))
        leaders = [int(rng.integers(0, g.n))]
        A = system_pattern(g, Protocol.SIGNED)
        assert dilation_check(A, leaders) is None


def test_pst_equal_sibling_weights_drop_rank():
    report = pst_check(pst_tree(2, 2), 0)
    assert report.is_pst
    assert report.sibling_conflicts == ((1, (2, 3)),)
    assert report.failing == (-2.0,)
    assert dict(report.checked)[-2.0] == 6


def test_pst_distinct_sibling_weights_full_rank():
    report = pst_check(pst_tree(2, 3), 0)
    assert report.full_rank_off_zero and not report.sibling_conflicts
    assert all(rank == 7 for _, rank in report.checked)


def test_pst_single_path_any_weights():
    g = SignedGraph(4, True, ((0, 1, Fraction(2)), (1, 2, Fraction(2)),
                              (2, 3, Fraction(2))))
    report = pst_check(g, 0)
    assert report.full_rank_off_zero and not report.sibling_conflicts


def test_pst_rejects_non_trees():
    cyc = SignedGraph(3, True, ((0, 1, Fraction(1)), (1, 2, Fraction(1)),
                                (2, 0, Fraction(1))))
    with pytest.raises(NotATreeError):
        pst_check(cyc, 0)
    with pytest.raises(NotATreeError):
        pst_check(path_graph(3), 0)  # undirected input


def test_positive_verdict_implies_witness_on_random_graphs():
    rng = np_rng(47)
    for trial in range(15):
        g = random_connected_graph(rng, int(rng.integers(2, 8)))
        leaders = [int(rng.integers(0, g.n))]
        v = structural_verdict(g, leaders, witness_trials=20, seed=trial)
        assert v.controllable and v.witness is not None


def test_negative_verdict_never_reaches_full_rank():
    rng = np_rng(48)
    chain = SignedGraph(4, True, ((0, 1, Fraction(1)), (1, 2, Fraction(1)),
                                  (2, 3, Fraction(1))))
    pattern = SignPattern.from_graph(chain, free=True)
    assert not structural_verdict(chain, [1]).controllable
    for protocol in (Protocol.ABS, Protocol.SIGNED):
        for _ in range(50):
            sample = pattern.sample(rng)
            dim = kalman_dim(build_laplacian(sample, protocol), [1],
                             with_witnesses=False).dim
            assert dim < 4
