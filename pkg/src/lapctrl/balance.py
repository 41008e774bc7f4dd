"""Structural balance: gauge certificates, the three equivalent criteria and
the gauge-invariance audit of the controllable subspace.

A connected signed graph is balanced exactly when a diagonal +-1 similarity
(the gauge) makes every weight nonnegative; the node bipartition is then the
sign classes of the gauge.  Balance propagation runs in linear time over a
BFS tree; the cycle-sign criterion is kept as an independent verification
mode.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraphError, GraphFormatError, NotBalancedError
from .graph import LeaderSet, SignedGraph
from .spectral import Protocol, build_laplacian, kalman_dim, zero_multiplicity


@dataclass(frozen=True)
class GaugeVector:
    """Diagonal +-1 assignment; the certificate of structural balance."""

    sigma: tuple

    def __post_init__(self):
        sig = tuple(int(s) for s in self.sigma)
        if any(s not in (1, -1) for s in sig):
            raise GraphFormatError("gauge entries must be +1 or -1")
        object.__setattr__(self, "sigma", sig)

    def __len__(self):
        return len(self.sigma)

    def sign_classes(self):
        plus = tuple(i for i, s in enumerate(self.sigma) if s > 0)
        minus = tuple(i for i, s in enumerate(self.sigma) if s < 0)
        return plus, minus


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    gauge: GaugeVector | None
    witness_cycle: tuple | None

    def to_dict(self):
        return {
            "balanced": self.balanced,
            "sigma": list(self.gauge.sigma) if self.gauge else None,
            "witness_cycle": list(self.witness_cycle) if self.witness_cycle else None,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def _sign(w):
    return 1 if float(w) > 0 else -1


def check_balance(g):
    """BFS sign propagation.  Balanced input yields the gauge normalized to
    +1 at the smallest node id of each component; an inconsistency yields the
    closing cycle with an odd number of negative edges as witness."""
    sigma = [0] * g.n
    parent = {}
    for comp in g.components():
        root = comp[0]
        sigma[root] = 1
        parent[root] = None
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, w in sorted(g.neighbors(u)) if not g.directed else _both_dirs(g, u):
                want = sigma[u] * _sign(w)
                if sigma[v] == 0:
                    sigma[v] = want
                    parent[v] = u
                    queue.append(v)
                elif sigma[v] != want:
                    return BalanceResult(False, None, _closing_cycle(parent, u, v))
    return BalanceResult(True, GaugeVector(tuple(sigma)), None)


def _both_dirs(g, u):
    pairs = {}
    for v, w in g._in_adj[u]:
        pairs[v] = w
    for v, w in g._out_adj[u]:
        pairs.setdefault(v, w)
    return sorted(pairs.items())


def _closing_cycle(parent, u, v):
    """Tree paths of u and v up to their lowest common ancestor, closed by (u, v)."""
    anc_u = [u]
    x = u
    while parent[x] is not None:
        x = parent[x]
        anc_u.append(x)
    index = {node: k for k, node in enumerate(anc_u)}
    path_v = [v]
    x = v
    while x not in index:
        x = parent[x]
        path_v.append(x)
    lca = path_v[-1]
    cycle = anc_u[:index[lca] + 1] + path_v[-2::-1]
    return tuple(cycle)


def cycle_sign(g, nodes):
    """Product of edge signs around a closed node sequence."""
    sign = 1
    k = len(nodes)
    for t in range(k):
        w = g.weight(nodes[t], nodes[(t + 1) % k])
        if w is None:
            raise GraphFormatError(f"({nodes[t]},{nodes[(t + 1) % k]}) is not an edge")
        sign *= _sign(w)
    return sign


def fundamental_cycles(g):
    """One cycle per non-tree edge of a BFS spanning forest."""
    parent = {}
    depth = {}
    tree_edges = set()
    for comp in g.components():
        root = comp[0]
        parent[root] = None
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in g.underlying_neighbors(u):
                if v not in parent:
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    tree_edges.add(frozenset((u, v)))
                    queue.append(v)
    cycles = []
    for i, j, _ in g.edges:
        if frozenset((i, j)) in tree_edges:
            continue
        pu, pv = [i], [j]
        a, b = i, j
        while depth[a] > depth[b]:
            a = parent[a]
            pu.append(a)
        while depth[b] > depth[a]:
            b = parent[b]
            pv.append(b)
        while a != b:
            a, b = parent[a], parent[b]
            pu.append(a)
            pv.append(b)
        cycles.append(tuple(pu + pv[-2::-1]))
    return cycles


@dataclass(frozen=True)
class EquivalenceReport:
    """Mutual consistency of the three balance criteria."""

    cycles_positive: bool
    gauge_exists: bool
    zero_in_abs_spectrum: bool
    mode: str

    @property
    def consistent(self):
        return self.cycles_positive == self.gauge_exists == self.zero_in_abs_spectrum

    def to_dict(self):
        return {"cycles_positive": self.cycles_positive,
                "gauge_exists": self.gauge_exists,
                "zero_in_abs_spectrum": self.zero_in_abs_spectrum,
                "consistent": self.consistent, "mode": self.mode}


def verify_equivalences(g, tol=None):
    """Cross-check cycle signs, gauge existence and a zero eigenvalue of the
    absolute-diagonal Laplacian; any disagreement is a defect."""
    if not g.is_connected():
        raise DisconnectedGraphError("the three balance criteria assume a connected graph")
    cycles_ok = all(cycle_sign(g, c) > 0 for c in fundamental_cycles(g))
    gauge_ok = check_balance(g).balanced
    L = build_laplacian(g, Protocol.ABS)
    zero_ok = zero_multiplicity(L, tol=tol) >= 1
    mode = "exact-rational" if L.is_exact else "float"
    return EquivalenceReport(cycles_positive=cycles_ok, gauge_exists=gauge_ok,
                             zero_in_abs_spectrum=zero_ok, mode=mode)


def gauge_transform(g, gauge):
    """Edge weights ``a_ij -> sigma_i a_ij sigma_j``; involutive."""
    sigma = gauge.sigma if isinstance(gauge, GaugeVector) else GaugeVector(tuple(gauge)).sigma
    if len(sigma) != g.n:
        raise GraphFormatError(f"gauge length {len(sigma)} does not match n={g.n}")
    return SignedGraph(g.n, g.directed, tuple(
        (i, j, w * sigma[i] * sigma[j]) for i, j, w in g.edges
    ), labels=g.labels)


@dataclass(frozen=True)
class InvarianceAudit:
    base_dim: int
    dims: tuple
    samples: int
    equal: int

    @property
    def rate(self):
        return self.equal / self.samples if self.samples else 1.0

    def to_dict(self):
        return {"base_dim": self.base_dim, "dims": list(self.dims),
                "samples": self.samples, "equal": self.equal, "rate": self.rate}


def invariance_audit(g, leaders, flips, seed, protocol=Protocol.ABS, force_signed=False):
    """Compare the controllable-subspace dimension before and after random
    gauge transforms of a balanced graph.  The claim is stated for the
    absolute-diagonal protocol; the signed protocol runs only when forced."""
    protocol = Protocol.of(protocol)
    if protocol is Protocol.SIGNED and not force_signed:
        raise NotBalancedError(
            "gauge-invariance audit is stated for the abs protocol; "
            "pass force_signed=True to run it under the signed protocol")
    if not check_balance(g).balanced:
        raise NotBalancedError("gauge-invariance audit requires a balanced graph")
    leaders = LeaderSet.of(leaders)
    leaders.check_against(g.n)
    base = kalman_dim(build_laplacian(g, protocol), leaders, with_witnesses=False)
    rng = np.random.default_rng(seed)
    dims = []
    for _ in range(flips):
        sigma = tuple(1 if rng.random() < 0.5 else -1 for _ in range(g.n))
        flipped = gauge_transform(g, GaugeVector(sigma))
        dims.append(kalman_dim(build_laplacian(flipped, protocol), leaders,
                               with_witnesses=False).dim)
    equal = sum(1 for d in dims if d == base.dim)
    return InvarianceAudit(base_dim=base.dim, dims=tuple(dims),
                           samples=flips, equal=equal)
