"""Detection of the patterns that inflate the zero eigenvalue of the signed
row-sum Laplacian: sign-cancelling circles, identical-node groups and
opposite pairs, plus the structural multiplicity prediction they imply.

All three detectors demand exact weight equalities (float inputs are compared
at relative tolerance 1e-12), mirroring the exact-equality nature of the
patterns.  The numeric nullity is always reported next to the structural
prediction; a mismatch sets ``agree=False`` and is never silenced.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .errors import BudgetExceededError, DisconnectedGraphError, GraphFormatError
from .graph import LeaderSet
from .spectral import Protocol, build_laplacian, zero_multiplicity

_REL_TOL = 1e-12

ALTERNANT = "alternant"
TWO_ADJACENT_PAIRS = "two-adjacent-pairs"


def _weights_equal(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= _REL_TOL * max(abs(float(a)), abs(float(b)), 1.0)


@dataclass(frozen=True)
class ZeroCircle:
    """Even cycle, half positive weights, uniform magnitude, in one of the two
    sign arrangements that zero out the circle's reciprocal weight sum."""

    nodes: tuple
    mode: str

    def to_dict(self):
        return {"nodes": list(self.nodes), "mode": self.mode}


@dataclass(frozen=True)
class IdenticalNodeGroup:
    inside: tuple
    outside: tuple
    alpha: object

    def to_dict(self):
        a = self.alpha
        return {"inside": list(self.inside), "outside": list(self.outside),
                "alpha": str(a) if isinstance(a, Fraction) else float(a)}


@dataclass(frozen=True)
class OppositePair:
    i: int
    j: int
    common: tuple

    def to_dict(self):
        return {"i": self.i, "j": self.j, "common": list(self.common)}


@dataclass(frozen=True)
class ZeroCircleScan:
    circles: tuple
    near_misses: tuple        # sign pattern matched, magnitudes did not
    overlap_violations: tuple  # circle index pairs sharing >= 2 nodes


def _canonical_cycle(nodes):
    """Rotation/reflection-invariant representative starting at the min node."""
    k = len(nodes)
    start = nodes.index(min(nodes))
    fwd = tuple(nodes[(start + t) % k] for t in range(k))
    bwd = tuple(nodes[(start - t) % k] for t in range(k))
    return min(fwd, bwd)


def _classify_cycle(g, nodes):
    """Return a mode string if the cycle's sign arrangement matches, else None,
    plus whether the magnitudes pass the uniform-magnitude requirement."""
    k = len(nodes)
    if k % 2 != 0:
        return None, False
    weights = []
    for t in range(k):
        w = g.weight(nodes[t], nodes[(t + 1) % k])
        if w is None:
            return None, False
        weights.append(w)
    signs = [1 if float(w) > 0 else -1 for w in weights]
    if sum(1 for s in signs if s > 0) != k // 2:
        return None, False
    changes = sum(1 for t in range(k) if signs[t] != signs[(t + 1) % k])
    if changes == k:
        mode = ALTERNANT
    elif changes == 2:
        mode = TWO_ADJACENT_PAIRS
    else:
        return None, False
    mags_ok = all(_weights_equal(abs(w), abs(weights[0])) for w in weights[1:])
    return mode, mags_ok


def scan_zero_circles(g, budget=10**5):
    """Exhaustive cycle-space search for zero circles.

    Also collects near-misses (right signs, wrong magnitudes) and violations
    of the at-most-one-shared-node overlap constraint between detected
    circles.
    """
    if g.directed:
        raise GraphFormatError("zero-circle detection is defined for undirected graphs")
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from((i, j) for i, j, _ in g.edges)
    circles = []
    near = []
    for count, cyc in enumerate(nx.simple_cycles(G)):
        if count >= budget:
            raise BudgetExceededError(
                f"cycle enumeration exceeded budget of {budget} cycles")
        mode, mags_ok = _classify_cycle(g, cyc)
        if mode is None:
            continue
        circle = ZeroCircle(nodes=_canonical_cycle(cyc), mode=mode)
        (circles if mags_ok else near).append(circle)
    circles.sort(key=lambda c: c.nodes)
    near.sort(key=lambda c: c.nodes)
    violations = []
    for a, b in itertools.combinations(range(len(circles)), 2):
        if len(set(circles[a].nodes) & set(circles[b].nodes)) > 1:
            violations.append((a, b))
    return ZeroCircleScan(circles=tuple(circles), near_misses=tuple(near),
                          overlap_violations=tuple(violations))


def find_zero_circles(g, budget=10**5):
    return list(scan_zero_circles(g, budget=budget).circles)


def _uniform_cliques(g, budget):
    """All cliques of size >= 2 whose edges share one exact weight."""
    by_weight = {}
    for i, j, w in g.edges:
        by_weight.setdefault(w, []).append((i, j))
    seen = 0
    for alpha, pairs in sorted(by_weight.items(), key=lambda kv: str(kv[0])):
        H = nx.Graph(pairs)
        for maximal in nx.find_cliques(H):
            members = sorted(maximal)
            for size in range(2, len(members) + 1):
                for sub in itertools.combinations(members, size):
                    seen += 1
                    if seen > budget:
                        raise BudgetExceededError(
                            f"clique enumeration exceeded budget of {budget}")
                    yield alpha, sub


def find_identical_groups(g, budget=10**5):
    """Maximal disjoint identical-node groups.

    A group is a complete subgraph with common weight alpha whose members all
    connect to one shared outside set of the same size with weight -alpha and
    have no other neighbors.
    """
    if g.directed:
        raise GraphFormatError("identical-node detection is defined for undirected graphs")
    found = {}
    for alpha, clique in _uniform_cliques(g, budget):
        cset = set(clique)
        outside = None
        ok = True
        for i in clique:
            out_i = set()
            for j, w in g.neighbors(i):
                if j in cset:
                    if not _weights_equal(w, alpha):
                        ok = False
                        break
                    continue
                if not _weights_equal(w, -alpha):
                    ok = False
                    break
                out_i.add(j)
            if not ok:
                break
            if len(out_i) != len(clique):
                ok = False
                break
            if outside is None:
                outside = out_i
            elif out_i != outside:
                ok = False
                break
        if ok and outside:
            found[clique] = IdenticalNodeGroup(
                inside=tuple(clique), outside=tuple(sorted(outside)), alpha=alpha)
    # keep maximal groups only, then enforce disjointness (largest first)
    keys = sorted(found, key=len, reverse=True)
    maximal = [k for k in keys if not any(set(k) < set(other) for other in keys)]
    taken = set()
    groups = []
    for k in maximal:
        if taken & set(k):
            continue
        taken |= set(k)
        groups.append(found[k])
    groups.sort(key=lambda grp: grp.inside)
    return groups


def find_opposite_pairs(g):
    """All node pairs whose weights to every common neighbor are exact
    negatives; pairs without common neighbors are excluded."""
    if g.directed:
        raise GraphFormatError("opposite-pair detection is defined for undirected graphs")
    pairs = []
    for i, j in itertools.combinations(range(g.n), 2):
        wi = dict(g.neighbors(i))
        wj = dict(g.neighbors(j))
        common = sorted(set(wi) & set(wj) - {i, j})
        if not common:
            continue
        if all(_weights_equal(wi[k], -wj[k]) for k in common):
            pairs.append(OppositePair(i=i, j=j, common=tuple(common)))
    return pairs


def pair_certifies_kernel(g, pair):
    """Strict local certificate that ``e_i + e_j`` lies in the kernel of the
    signed-diagonal Laplacian: no private neighbors and cancelling weights."""
    wi = dict(g.neighbors(pair.i))
    wj = dict(g.neighbors(pair.j))
    if set(wi) - {pair.j} != set(pair.common) or set(wj) - {pair.i} != set(pair.common):
        return False
    total = sum(wi[k] for k in pair.common)
    return _weights_equal(total, total * 0)


def _cleanly_embedded(g, circle):
    """A circle only carries its kernel vector when no other connection joins
    two of its nodes: with the circle's own edges removed, its nodes must lie
    in pairwise distinct components (this also excludes chords)."""
    nodes = circle.nodes
    k = len(nodes)
    banned = {frozenset((nodes[t], nodes[(t + 1) % k])) for t in range(k)}
    circle_set = set(nodes)
    for start in nodes:
        seen = {start}
        queue = [start]
        while queue:
            u = queue.pop()
            for v in g.underlying_neighbors(u):
                if frozenset((u, v)) in banned or v in seen:
                    continue
                if v in circle_set and v != start:
                    return False
                seen.add(v)
                queue.append(v)
    return True


def contributing_circles(g, budget=10**5):
    """Zero circles that actually add a kernel dimension: the sign/magnitude
    pattern plus clean embedding in the host graph."""
    return [c for c in scan_zero_circles(g, budget=budget).circles
            if _cleanly_embedded(g, c)]


def _pair_contribution(g, pair, counted_circles):
    """Kernel dimensions added by an opposite pair, by local case analysis.

    Pairs with private neighbors do not carry a local kernel certificate and
    count zero.  Pairs fully covered by a counted circle are the circle's own
    kernel vector and count zero.  Otherwise the cancelling-weight pair gives
    the vector e_i + e_j (one dimension); failing that, isolated common
    neighbors give common-neighbor-supported vectors (|common| - 1).
    """
    wi = dict(g.neighbors(pair.i))
    wj = dict(g.neighbors(pair.j))
    if set(wi) - {pair.j} != set(pair.common) or set(wj) - {pair.i} != set(pair.common):
        return 0
    cluster = set(pair.common) | {pair.i, pair.j}
    if any(cluster <= set(c.nodes) for c in counted_circles):
        return 0
    total = sum(wi[k] for k in pair.common)
    if _weights_equal(total, total * 0):
        return 1
    if all(set(dict(g.neighbors(k))) <= {pair.i, pair.j} for k in pair.common):
        return len(pair.common) - 1
    return 0


def predict_multiplicity(g, budget=10**5):
    """Structural prediction of the zero multiplicity of the signed-diagonal
    Laplacian of a connected graph: 1 for the all-ones kernel vector, plus
    one per cleanly embedded zero circle, plus (size - 1) per identical-node
    group, plus the local kernel count of each contributing opposite pair."""
    if not g.is_connected():
        raise DisconnectedGraphError("multiplicity prediction requires a connected graph")
    circles = contributing_circles(g, budget=budget)
    groups = find_identical_groups(g, budget=budget)
    pairs = find_opposite_pairs(g)
    breakdown = {
        "baseline": 1,
        "zero_circles": len(circles),
        "identical_nodes": sum(len(grp.inside) - 1 for grp in groups),
        "opposite_pairs": sum(_pair_contribution(g, p, circles) for p in pairs),
    }
    return sum(breakdown.values()), breakdown


@dataclass(frozen=True)
class DegeneracyReport:
    circles: tuple
    groups: tuple
    pairs: tuple
    k_structural: int
    k_numeric: int
    agree: bool

    def to_dict(self):
        return {
            "circles": [c.to_dict() for c in self.circles],
            "groups": [grp.to_dict() for grp in self.groups],
            "pairs": [p.to_dict() for p in self.pairs],
            "k_structural": self.k_structural,
            "k_numeric": self.k_numeric,
            "agree": self.agree,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def degeneracy_report(g, tol=None, budget=10**5):
    """Detect the contributing patterns and compare the structural prediction
    against the numeric nullity.  The listed circles and pairs are the ones
    entering ``k_structural`` (use the ``find_*`` operations for every raw
    pattern match)."""
    k_structural, _ = predict_multiplicity(g, budget=budget)
    circles = contributing_circles(g, budget=budget)
    pairs = [p for p in find_opposite_pairs(g) if _pair_contribution(g, p, circles)]
    L = build_laplacian(g, Protocol.SIGNED)
    k_numeric = zero_multiplicity(L, tol=tol)
    return DegeneracyReport(
        circles=tuple(circles),
        groups=tuple(find_identical_groups(g, budget=budget)),
        pairs=tuple(pairs),
        k_structural=k_structural,
        k_numeric=k_numeric,
        agree=k_structural == k_numeric,
    )


UNCONTROLLABLE = "UNCONTROLLABLE"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class InsufficiencyVerdict:
    verdict: str
    q: int
    k_numeric: int
    k_structural: int
    agree: bool

    def to_dict(self):
        return {"verdict": self.verdict, "q": self.q, "k_numeric": self.k_numeric,
                "k_structural": self.k_structural, "agree": self.agree}


def insufficiency_check(g, leaders, tol=None, budget=10**5):
    """Input-deficit test: fewer inputs than the zero multiplicity of the
    signed-diagonal Laplacian certifies uncontrollability; otherwise the test
    is silent (the condition is sufficient only)."""
    leaders = LeaderSet.of(leaders)
    leaders.check_against(g.n)
    report = degeneracy_report(g, tol=tol, budget=budget)
    q = len(leaders)
    verdict = UNCONTROLLABLE if q < report.k_numeric else INCONCLUSIVE
    return InsufficiencyVerdict(verdict=verdict, q=q, k_numeric=report.k_numeric,
                                k_structural=report.k_structural, agree=report.agree)
