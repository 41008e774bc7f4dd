"""Structural controllability verdicts.

The headline test is purely topological: a leader-follower system under
either protocol is structurally controllable exactly when the underlying
graph is connected and every node is accessible from some leader.  The
module also carries the complex-network machinery that explains why: the
dilation search over the self-loop form of the system digraph, and the
pseudo-spanning-tree rank check for directed trees with distinct sibling
weights.  A randomized weight-witness search turns the structural verdict
into a concrete controllable weight assignment.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, NotATreeError
from .graph import FREE, LeaderSet, SignedGraph, SignPattern, accessible_nodes
from .spectral import Protocol, _float_rank, build_laplacian, kalman_dim

STRUCTURALLY_CONTROLLABLE = "STRUCTURALLY_CONTROLLABLE"
NOT_STRUCTURALLY_CONTROLLABLE = "NOT_STRUCTURALLY_CONTROLLABLE"


@dataclass(frozen=True)
class StructuralVerdict:
    verdict: str
    reason: str
    unaccessible: tuple
    witness: SignedGraph | None
    seed: int | None = None

    @property
    def controllable(self):
        return self.verdict == STRUCTURALLY_CONTROLLABLE

    def to_dict(self):
        witness = None
        if self.witness is not None:
            witness = {"edges": [[i, j, float(w)] for i, j, w in self.witness.edges]}
        return {"verdict": self.verdict, "reason": self.reason,
                "unaccessible": list(self.unaccessible), "witness": witness,
                "seed": self.seed}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def _as_pattern(g_or_pattern):
    if isinstance(g_or_pattern, SignPattern):
        return g_or_pattern
    return SignPattern.from_graph(g_or_pattern)


def structural_verdict(g_or_pattern, leaders, protocol=Protocol.SIGNED,
                       witness_trials=0, seed=None):
    """Connectivity + accessibility decide the verdict; both protocols agree.

    With ``witness_trials > 0`` and a seed, a positive verdict is backed by a
    concrete weight assignment of full Kalman rank.
    """
    pattern = _as_pattern(g_or_pattern)
    skeleton = pattern.skeleton()
    leaders = LeaderSet.of(leaders)
    leaders.check_against(skeleton.n)
    if not skeleton.is_connected():
        return StructuralVerdict(NOT_STRUCTURALLY_CONTROLLABLE, "disconnected",
                                 (), None, seed)
    missing = sorted(set(range(skeleton.n)) - accessible_nodes(skeleton, leaders))
    if missing:
        return StructuralVerdict(NOT_STRUCTURALLY_CONTROLLABLE, "unaccessible nodes",
                                 tuple(missing), None, seed)
    witness = None
    if witness_trials > 0:
        if seed is None:
            raise ValueError("witness search requires a seed")
        witness = witness_search(pattern, leaders, protocol=protocol,
                                 trials=witness_trials, seed=seed)
    return StructuralVerdict(STRUCTURALLY_CONTROLLABLE, "ok", (), witness, seed)


def witness_search(pattern, leaders, protocol=Protocol.SIGNED, trials=20, seed=None):
    """Sample weights (magnitudes in [0.1, 2], signs respecting the pattern)
    until some assignment reaches full Kalman rank; None after the budget.

    Magnitudes below 0.1 are excluded so near-degenerate ranks cannot leak
    through the floating rank tolerance.
    """
    if seed is None:
        raise ValueError("witness search requires a seed")
    pattern = _as_pattern(pattern)
    leaders = LeaderSet.of(leaders)
    leaders.check_against(pattern.n)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        candidate = pattern.sample(rng)
        M = build_laplacian(candidate, protocol)
        if kalman_dim(M, leaders, with_witnesses=False).dim == pattern.n:
            return candidate
    return None


@dataclass(frozen=True)
class Dilation:
    """Node subset with fewer distinct in-neighbors than members."""

    nodes: tuple
    neighborhood: tuple

    def to_dict(self):
        return {"nodes": list(self.nodes), "neighborhood": list(self.neighborhood)}


def system_pattern(g, protocol=Protocol.SIGNED):
    """Zero/nonzero pattern of the system matrix ``-L`` in complex-network
    form: off-diagonal entries follow in-neighborhoods; a self-loop appears
    wherever the protocol diagonal is generically nonzero (any in-neighbor)."""
    n = g.n
    A = [[False] * n for _ in range(n)]
    for i in range(n):
        nbrs = g.neighbors(i)
        for j, _ in nbrs:
            A[i][j] = True
        if nbrs:
            A[i][i] = True
    return A


def dilation_check(pattern_matrix, leaders, max_subset=None, budget=10**5):
    """Exhaustive dilation search over the complex-network digraph.

    ``pattern_matrix[i][j]`` nonzero means an edge from j into i (diagonal
    entries are self-loops).  Leaders contribute their input node to every
    neighborhood that touches them, so an actuated node is never part of a
    dilation on its own.  Returns the first dilation found (subsets scanned
    by size, then lexicographically) or None.
    """
    A = [[bool(x) for x in row] for row in np.asarray(pattern_matrix, dtype=object)]
    n = len(A)
    leaders = LeaderSet.of(leaders)
    leaders.check_against(n)
    limit = n if max_subset is None else min(max_subset, n)
    visited = 0
    for size in range(1, limit + 1):
        for subset in itertools.combinations(range(n), size):
            visited += 1
            if visited > budget:
                raise BudgetExceededError(f"dilation search exceeded budget {budget}")
            neighborhood = set()
            for i in subset:
                for j in range(n):
                    if A[i][j]:
                        neighborhood.add(j)
                if i in leaders:
                    neighborhood.add(n + leaders.ids.index(i))  # input node
            if len(neighborhood) < size:
                labeled = sorted(v for v in neighborhood if v < n)
                labeled += [f"u{v - n}" for v in sorted(neighborhood) if v >= n]
                return Dilation(nodes=subset, neighborhood=tuple(labeled))
    return None


@dataclass(frozen=True)
class PSTReport:
    """Rank profile of a directed spanning tree in self-loop form."""

    is_pst: bool
    sibling_conflicts: tuple  # (parent, (children sharing a weight))
    checked: tuple            # (eigenvalue, pencil rank)
    failing: tuple            # eigenvalues != 0 where the pencil drops rank

    @property
    def full_rank_off_zero(self):
        return not self.failing

    def to_dict(self):
        return {"is_pst": self.is_pst,
                "sibling_conflicts": [[p, list(c)] for p, c in self.sibling_conflicts],
                "checked": [[lam, r] for lam, r in self.checked],
                "failing": list(self.failing),
                "full_rank_off_zero": self.full_rank_off_zero}


def _tree_parents(g, root):
    parents = {root: None}
    weights = {}
    for i, j, w in g.edges:
        if j in weights:
            raise NotATreeError(f"node {j} has more than one parent")
        parents[j] = i
        weights[j] = w
    if root in weights:
        raise NotATreeError(f"root {root} has a parent edge")
    if len(parents) != g.n or len(weights) != g.n - 1:
        raise NotATreeError("edges do not form a spanning tree rooted at the leader")
    # every node must be reachable from the root through parent links
    for v in range(g.n):
        seen = set()
        x = v
        while x is not None:
            if x in seen:
                raise NotATreeError("parent links contain a cycle")
            seen.add(x)
            x = parents.get(x)
        if root not in seen:
            raise NotATreeError(f"node {v} is not reachable from the root")
    return parents, weights


def pst_check(g, leader, protocol=Protocol.SIGNED, tol=1e-9):
    """Verify full pencil rank off zero for a directed spanning tree.

    In the self-loop form of the tree, each non-root node carries the
    diagonal entry ``-w`` of its parent edge, so the eigenvalues are exactly
    those diagonals.  Siblings with equal weights force a repeated eigenvalue
    whose pencil rank drops below ``n``; distinct sibling weights give full
    rank at every nonzero eigenvalue.  Both the pairwise distinctness check
    and the numeric pencil ranks are reported.
    """
    if not g.directed:
        raise NotATreeError("pst_check expects a directed tree")
    parents, _ = _tree_parents(g, leader)
    protocol = Protocol.of(protocol)
    children = {}
    for v, p in parents.items():
        if p is not None:
            children.setdefault(p, []).append(v)
    conflicts = []
    for p, kids in sorted(children.items()):
        groups = {}
        for c in kids:
            w = g.weight(p, c)
            key = abs(w) if protocol is Protocol.ABS else w
            groups.setdefault(float(key), []).append(c)
        for key, same in sorted(groups.items()):
            if len(same) > 1:
                conflicts.append((p, tuple(sorted(same))))
    A = -build_laplacian(g, protocol).data
    n = g.n
    B = np.zeros((n, 1))
    B[leader, 0] = 1.0
    checked = []
    failing = []
    seen = set()
    for lam in sorted(np.diag(A)):
        lam = float(lam)
        key = round(lam, 12)
        if key in seen:
            continue
        seen.add(key)
        if abs(lam) <= tol:
            continue
        rank = _float_rank(np.hstack([lam * np.eye(n) - A, B]))
        checked.append((lam, rank))
        if rank < n:
            failing.append(lam)
    return PSTReport(is_pst=True, sibling_conflicts=tuple(conflicts),
                     checked=tuple(checked), failing=tuple(failing))
