"""Reference topologies used throughout the test and fixture suites.

Each builder returns an exact-rational graph (or sign pattern) so every
fixture supports the tolerance-free analysis mode.  The degeneracy fixtures
reproduce the worked matrices the detectors are calibrated against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import FREE, LeaderSet, SignedGraph, SignPattern


def path_graph(n, weight=1):
    return SignedGraph(n, False, tuple((i, i + 1, Fraction(weight)) for i in range(n - 1)))


def cycle_graph(n, weight=1):
    return SignedGraph(n, False, tuple((i, (i + 1) % n, Fraction(weight)) for i in range(n)))


def star_graph(n, weight=1):
    return SignedGraph(n, False, tuple((0, i, Fraction(weight)) for i in range(1, n)))


def complete_graph(n, weight=1):
    return SignedGraph(n, False, tuple(
        (i, j, Fraction(weight)) for i in range(n) for j in range(i + 1, n)))


def alternant_cycle(n, magnitude=1):
    """Even cycle with antagonistic weights in alternant order."""
    if n % 2 != 0:
        raise ValueError("alternant cycles need an even node count")
    mag = Fraction(magnitude)
    return SignedGraph(n, False, tuple(
        (i, (i + 1) % n, mag if i % 2 == 0 else -mag) for i in range(n)))


def two_run_cycle(n, magnitude=1):
    """Even cycle whose positive and negative weights form two adjacent runs."""
    if n % 2 != 0:
        raise ValueError("two-run cycles need an even node count")
    mag = Fraction(magnitude)
    return SignedGraph(n, False, tuple(
        (i, (i + 1) % n, mag if i < n // 2 else -mag) for i in range(n)))


def identical_nodes_graph(alpha=1):
    """Three mutually connected nodes sharing negated links to three outside
    nodes; the signed-diagonal Laplacian gains two extra kernel vectors."""
    a = Fraction(alpha)
    edges = [(3, 4, a), (3, 5, a), (4, 5, a)]
    edges += [(i, j, -a) for i in (3, 4, 5) for j in (0, 1, 2)]
    return SignedGraph(6, False, tuple(edges))


def opposite_pair_graph(scale=1):
    """Five-node graph whose nodes 3 and 4 carry exactly negated weights to
    their common neighbors; contributes the kernel vector (0,0,0,1,1)."""
    s = Fraction(scale)
    edges = [(0, 1, -s), (0, 2, -s), (1, 2, -s), (1, 3, -s), (1, 4, s),
             (2, 3, s), (2, 4, -s), (3, 4, s)]
    return SignedGraph(5, False, tuple(edges))


def t_star(n, alpha=1):
    """Star with the center as single leader and equal leader-edge weights."""
    return star_graph(n, weight=alpha)


def t_star_expansion(n, alpha, follower_edges):
    """T-star plus arbitrary follower-follower links (iterable of (i, j, w)
    with 1 <= i < j < n)."""
    edges = [(0, i, Fraction(alpha)) for i in range(1, n)]
    for i, j, w in follower_edges:
        if i == 0 or j == 0:
            raise ValueError("expansion edges must connect followers")
        edges.append((i, j, w if isinstance(w, (Fraction, float)) else Fraction(w)))
    return SignedGraph(n, False, tuple(edges))


def pst_tree(w_left=2, w_right=3):
    """Seven-node directed spanning tree rooted at node 0 with one branch
    point at node 1; the two branch edges carry ``w_left`` and ``w_right``.

    Equal branch weights create a repeated nonzero eigenvalue that drops the
    pencil rank to n-1; distinct weights keep full rank off zero.
    """
    e = [
        (0, 1, Fraction(1)),
        (1, 2, Fraction(w_left)),
        (1, 3, Fraction(w_right)),
        (2, 4, Fraction(5)),
        (3, 5, Fraction(7)),
        (4, 6, Fraction(11)),
    ]
    return SignedGraph(7, True, tuple(e))


def dilation_cactus(with_self_loop=True):
    """Complex-network pattern of the five-node branched chain: input at node
    0, chain 0->1->{2,3}, 3->4, optional self-loop at node 2.

    Without the self-loop the subset {2, 3} has only node 1 feeding it: a
    dilation.  Returns (pattern matrix, leader ids).
    """
    A = np.zeros((5, 5), dtype=bool)
    A[1, 0] = True
    A[2, 1] = True
    A[3, 1] = True
    A[4, 3] = True
    if with_self_loop:
        A[2, 2] = True
    return A, LeaderSet.of([0])


def ssc_full_rank_pattern():
    """Eight-node pattern whose leader layer {4,5,6,7} connects to followers
    {0,1,2,3} through a connection matrix with one zero per row in distinct
    columns; the leaders do not form a zero forcing set, yet every weight
    choice keeps full rank.  Returns (pattern, leaders)."""
    missing = {(0, 5), (1, 6), (2, 7), (3, 4)}
    edges = [(c, f, FREE) for c in range(4) for f in range(4, 8)
             if (c, f) not in missing]
    return SignPattern(8, False, tuple(edges)), LeaderSet.of([4, 5, 6, 7])


def ssc_rank_deficient_pattern():
    """Nine-node pattern with four non-adjacent leaders {0,1,2,3} and five
    followers; the leader-follower block has rank at most 4 < 5, but the
    follower-follower link (7, 8) restores strong structural
    controllability.  Returns (pattern, leaders)."""
    adjacency = {
        4: (0, 1, 2),
        5: (1, 2, 3),
        6: (0, 2, 3),
        7: (0, 1, 3),
        8: (0, 1, 2, 3),
    }
    edges = [(leader, follower, FREE)
             for follower, leaders in sorted(adjacency.items())
             for leader in leaders]
    edges.append((7, 8, FREE))
    return SignPattern(9, False, tuple(edges)), LeaderSet.of([0, 1, 2, 3])


@dataclass(frozen=True)
class FixtureCase:
    """Named degeneracy fixture with its expected kernel multiplicity."""

    name: str
    graph: SignedGraph
    expected_multiplicity: int


def degeneracy_fixtures():
    cases = [FixtureCase(f"alternant-cycle-{n}", alternant_cycle(n), 2)
             for n in (4, 6, 8, 10)]
    cases += [FixtureCase(f"two-run-cycle-{n}", two_run_cycle(n), 2)
              for n in (6, 8)]
    cases.append(FixtureCase("identical-nodes", identical_nodes_graph(), 3))
    cases.append(FixtureCase("opposite-pair", opposite_pair_graph(), 2))
    return cases


IDENTICAL_NODES_MATRIX = [
    [-3, 0, 0, 1, 1, 1],
    [0, -3, 0, 1, 1, 1],
    [0, 0, -3, 1, 1, 1],
    [1, 1, 1, -1, -1, -1],
    [1, 1, 1, -1, -1, -1],
    [1, 1, 1, -1, -1, -1],
]

OPPOSITE_PAIR_MATRIX = [
    [-2, 1, 1, 0, 0],
    [1, -2, 1, 1, -1],
    [1, 1, -2, -1, 1],
    [0, 1, -1, 1, -1],
    [0, -1, 1, -1, 1],
]


@dataclass(frozen=True)
class FixtureResult:
    name: str
    basis: str
    passed: bool
    detail: str

    def to_dict(self):
        return {"name": self.name, "basis": self.basis,
                "passed": self.passed, "detail": self.detail}


def _fixture_checks(seed, samples):
    """Yield (name, basis, callable) triples; each callable returns
    (passed, detail)."""
    from . import balance as bal
    from . import degeneracy as deg
    from . import spectral as spec
    from . import strong
    from . import structural as struc
    from .errors import UnreachableTargetError
    from .graph import accessible_nodes

    def matrices_match():
        L2 = spec.build_laplacian(identical_nodes_graph(), spec.Protocol.SIGNED)
        L3 = spec.build_laplacian(opposite_pair_graph(), spec.Protocol.SIGNED)
        ok = (np.array_equal(L2.data, np.array(IDENTICAL_NODES_MATRIX, float))
              and np.array_equal(L3.data, np.array(OPPOSITE_PAIR_MATRIX, float)))
        return ok, "printed matrices reproduced"

    yield "printed-matrices", "kernel-multiplicity-count", matrices_match

    for case in degeneracy_fixtures():
        def check(case=case):
            rep = deg.degeneracy_report(case.graph)
            ok = (rep.agree and rep.k_structural == case.expected_multiplicity)
            return ok, f"k_structural={rep.k_structural} k_numeric={rep.k_numeric}"
        yield f"degeneracy-{case.name}", "kernel-multiplicity-count", check

    def abs_simple():
        oks = []
        for n in (4, 8):
            L = spec.build_laplacian(alternant_cycle(n), spec.Protocol.ABS)
            oks.append(spec.zero_multiplicity(L) == 1)
        for n in (6, 10):
            L = spec.build_laplacian(alternant_cycle(n), spec.Protocol.ABS)
            oks.append(spec.zero_multiplicity(L) == 0)
        return all(oks), "abs-protocol kernel simple or empty on cycles"

    yield "abs-kernel-on-cycles", "kernel-multiplicity-count", abs_simple

    def insufficiency():
        v1 = deg.insufficiency_check(alternant_cycle(6), [0])
        v2 = deg.insufficiency_check(identical_nodes_graph(), [0, 3])
        v3 = deg.insufficiency_check(path_graph(4), [0])
        ok = (v1.verdict == deg.UNCONTROLLABLE and v2.verdict == deg.UNCONTROLLABLE
              and v3.verdict == deg.INCONCLUSIVE)
        return ok, f"{v1.verdict}/{v2.verdict}/{v3.verdict}"

    yield "input-deficit", "zero-multiplicity-input-deficit", insufficiency

    def t_star_dim():
        rng = np.random.default_rng(seed)
        oks = []
        for n in (4, 6, 8):
            extra = []
            for i in range(1, n):
                for j in range(i + 1, n):
                    if rng.random() < 0.4:
                        extra.append((i, j, Fraction(int(rng.integers(1, 5)),
                                                     int(rng.integers(1, 4)))
                                      * (1 if rng.random() < 0.5 else -1)))
            g = t_star_expansion(n, 1, extra)
            L = spec.build_laplacian(g, spec.Protocol.SIGNED)
            oks.append(spec.kalman_dim(L, [0]).dim == 2)
        return all(oks), "center-led star expansions all dimension 2"

    yield "t-star-dimension", "t-star-dimension", t_star_dim

    def balance_checks():
        tri = SignedGraph(3, False, ((0, 1, Fraction(1)), (1, 2, Fraction(1)),
                                     (0, 2, Fraction(-1))))
        r1 = bal.check_balance(tri)
        eq1 = bal.verify_equivalences(tri)
        g = alternant_cycle(4)
        r2 = bal.check_balance(g)
        eq2 = bal.verify_equivalences(g)
        ok = (not r1.balanced and r1.witness_cycle is not None and eq1.consistent
              and not eq1.cycles_positive and r2.balanced and eq2.consistent
              and eq2.cycles_positive)
        return ok, "balance certificates and equivalences"

    yield "balance-certificates", "balance-criteria-equivalence", balance_checks

    def invariance():
        g = alternant_cycle(4)
        audit = bal.invariance_audit(g, [0], flips=8, seed=seed)
        return audit.rate == 1.0, f"equality rate {audit.rate:.0%}"

    yield "gauge-invariance", "gauge-invariance-of-controllable-subspace", invariance

    def structural_checks():
        v1 = struc.structural_verdict(path_graph(3), [0])
        chain = SignedGraph(3, True, ((0, 1, Fraction(1)), (1, 2, Fraction(1))))
        v2 = struc.structural_verdict(chain, [2])
        ok = v1.controllable and not v2.controllable and v2.unaccessible == (0, 1)
        return ok, f"{v1.verdict}/{v2.verdict}"

    yield "connectivity-accessibility", "connectivity-accessibility-criterion", structural_checks

    def dilation():
        A1, leaders = dilation_cactus(with_self_loop=False)
        d1 = struc.dilation_check(A1, leaders)
        A2, leaders = dilation_cactus(with_self_loop=True)
        d2 = struc.dilation_check(A2, leaders)
        ok = d1 is not None and set(d1.nodes) == {2, 3} and d2 is None
        return ok, f"without loop: {d1}, with loop: {d2}"

    yield "dilation-search", "dilation-search", dilation

    def pst():
        equal = struc.pst_check(pst_tree(2, 2), 0)
        distinct = struc.pst_check(pst_tree(2, 3), 0)
        ok = (not equal.full_rank_off_zero and equal.sibling_conflicts
              and distinct.full_rank_off_zero)
        return ok, f"equal-weight failing eigenvalues {equal.failing}"

    yield "pseudo-spanning-tree", "pseudo-spanning-tree-rank", pst

    def zero_forcing():
        p = path_graph(5)
        c = cycle_graph(6)
        ok = (strong.zero_forcing_closure(p, [0]) == set(range(5))
              and strong.zero_forcing_closure(c, [0]) == {0}
              and strong.zero_forcing_closure(c, [0, 1]) == set(range(6)))
        return ok, "path leaf and adjacent cycle leaders force the graph"

    yield "zero-forcing", "zero-forcing-closure", zero_forcing

    def full_rank_pattern():
        pattern, leaders = ssc_full_rank_pattern()
        layered = strong.layered_rank_test(pattern, leaders, seed=seed)
        audit = strong.ssc_random_audit(pattern, leaders, samples=samples, seed=seed)
        zf = strong.zero_forcing_closure(pattern.skeleton(), leaders)
        ok = (layered.passed and len(zf) < pattern.n
              and all(d == 8 for d in audit.min_dim.values())
              and audit.bound_violations == 0)
        return ok, f"layered pass, audit min dims {audit.min_dim}"

    yield "layered-full-rank", "layered-connection-rank", full_rank_pattern

    def rank_deficient_pattern():
        pattern, leaders = ssc_rank_deficient_pattern()
        audit = strong.ssc_random_audit(pattern, leaders, samples=samples, seed=seed)
        ok = all(d == 9 for d in audit.min_dim.values()) and audit.bound_violations == 0
        return ok, f"audit min dims {audit.min_dim}"

    yield "follower-compensated-rank", "ssc-random-audit", rank_deficient_pattern

    def symmetry():
        star = star_graph(5)
        orbits = strong.symmetric_followers(star, [0])
        path_orbits = strong.symmetric_followers(path_graph(4), [0])
        ok = orbits == [(1, 2, 3, 4)] and path_orbits == []
        return ok, f"star orbits {orbits}"

    yield "symmetric-followers", "symmetric-follower-orbits", symmetry

    def steering():
        L = spec.build_laplacian(path_graph(3), spec.Protocol.ABS)
        res = spec.steer(L, [0], [0, 0, 0], [1, 1, 1], horizon=5.0)
        ok = res.terminal_error < 1e-6
        Lt = spec.build_laplacian(t_star(5), spec.Protocol.SIGNED)
        try:
            spec.steer(Lt, [0], [0] * 5, [1, 2, 3, 4, 5], horizon=3.0)
            ok = False
        except UnreachableTargetError:
            pass
        return ok, f"terminal error {res.terminal_error:.2e}, unreachable raised"

    yield "minimum-energy-steering", "controllability-gramian-steering", steering

    def accessibility_monotone():
        g = path_graph(4)
        a1 = accessible_nodes(g, [0])
        a2 = accessible_nodes(g, [0, 2])
        return a1 <= a2 and a1 == set(range(4)), "accessible sets monotone"

    yield "accessibility", "connectivity-accessibility-criterion", accessibility_monotone


def run_fixture_suite(seed=7, samples=300, jobs=1):
    """Execute every figure-derived check; returns the result list."""
    checks = list(_fixture_checks(seed, samples))
    results = []
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [(name, basis, pool.submit(fn)) for name, basis, fn in checks]
            for name, basis, fut in futures:
                passed, detail = fut.result()
                results.append(FixtureResult(name, basis, passed, detail))
    else:
        for name, basis, fn in checks:
            passed, detail = fn()
            results.append(FixtureResult(name, basis, passed, detail))
    return results


def suite_summary(results):
    by_basis = {}
    for r in results:
        slot = by_basis.setdefault(r.basis, {"pass": 0, "fail": 0})
        slot["pass" if r.passed else "fail"] += 1
    return {"results": [r.to_dict() for r in results],
            "by_basis": by_basis,
            "passed": all(r.passed for r in results)}
