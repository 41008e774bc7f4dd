"""Shared generators for randomized tests (seeded, deterministic)."""

from fractions import Fraction

import numpy as np

from lapctrl import SignedGraph


def random_connected_graph(rng, n, weights="rational", extra_edge_prob=0.3,
                           signed=True):
    """Random spanning tree plus extra edges; weights rational or float."""
    edges = {}
    order = list(rng.permutation(n))
    for idx in range(1, n):
        child = order[idx]
        parent = order[int(rng.integers(0, idx))]
        edges[frozenset((child, parent))] = None
    for i in range(n):
        for j in range(i + 1, n):
            if frozenset((i, j)) not in edges and rng.random() < extra_edge_prob:
                edges[frozenset((i, j))] = None
    out = []
    for pair in sorted(edges, key=sorted):
        i, j = sorted(pair)
        sign = -1 if (signed and rng.random() < 0.5) else 1
        if weights == "rational":
            w = Fraction(sign * int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        elif weights == "unit":
            w = Fraction(sign)
        else:
            w = sign * float(rng.uniform(0.1, 2.0))
        out.append((i, j, w))
    return SignedGraph(n, False, tuple(out))


def random_balanced_graph(rng, n, extra_edge_prob=0.3):
    """Positive rational weights gauge-flipped by a random +-1 vector."""
    g = random_connected_graph(rng, n, weights="rational",
                               extra_edge_prob=extra_edge_prob, signed=False)
    sigma = [1 if rng.random() < 0.5 else -1 for _ in range(n)]
    edges = tuple((i, j, w * sigma[i] * sigma[j]) for i, j, w in g.edges)
    return SignedGraph(n, False, edges), sigma


def random_directed_graph(rng, n, edge_prob=0.35):
    edges = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < edge_prob:
                sign = -1 if rng.random() < 0.5 else 1
                edges.append((i, j, Fraction(sign * int(rng.integers(1, 4)))))
    if not edges:
        edges.append((0, (1 % n), Fraction(1)))
    return SignedGraph(n, True, tuple(edges))


def relabel(g, perm):
    """Graph with node i renamed perm[i]."""
    return SignedGraph(g.n, g.directed, tuple(
        (perm[i], perm[j], w) for i, j, w in g.edges))


def np_rng(seed):
    return np.random.default_rng(seed)
