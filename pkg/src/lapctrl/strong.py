"""Strong structural controllability: zero forcing, lower bounds, symmetry
screening, the layered connection-rank certificate and Monte-Carlo audits.

Certification policy: SSC_CERTIFIED is granted only through zero forcing or
the layered connection-matrix conditions; random audits alone produce
BOUND_ONLY evidence, with any sub-``n`` sample kept as a concrete
counterexample.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rational
from .errors import BudgetExceededError, DisconnectedGraphError, GraphFormatError
from .graph import FREE, LeaderSet, SignPattern
from .spectral import Protocol, build_laplacian, kalman_dim


def zero_forcing_closure(g, leaders):
    """Iterate the color-change rule from the leader set to fixpoint: a black
    node with exactly one white neighbor forces that neighbor black."""
    if g.directed:
        raise GraphFormatError("zero forcing is defined on undirected graphs")
    leaders = LeaderSet.of(leaders)
    leaders.check_against(g.n)
    black = set(leaders.ids)
    changed = True
    while changed:
        changed = False
        for u in sorted(black):
            white = [v for v in g.underlying_neighbors(u) if v not in black]
            if len(white) == 1:
                black.add(white[0])
                changed = True
    return black


@dataclass(frozen=True)
class SSCLowerBound:
    bound: int
    distance_bound: int
    path_bound: int
    longest_path: tuple | None
    budget_exceeded: bool

    def to_dict(self):
        return {"bound": self.bound, "distance_bound": self.distance_bound,
                "path_bound": self.path_bound,
                "longest_path": list(self.longest_path) if self.longest_path else None,
                "budget_exceeded": self.budget_exceeded}


def _longest_control_path(g, leaders, budget):
    """Longest induced simple path from a leader to a degree-1 node, by
    exhaustive DFS under a step budget.

    The induced requirement keeps the path's principal submatrix tridiagonal,
    which is what makes the bound hold for every weight choice.
    """
    best = (0, None)
    steps = 0
    adj = {u: set(g.underlying_neighbors(u)) for u in range(g.n)}

    def extend(path, on_path):
        nonlocal best, steps
        steps += 1
        if steps > budget:
            raise BudgetExceededError("control-path search budget exhausted")
        tail = path[-1]
        if len(adj[tail]) == 1 and len(path) > best[0]:
            best = (len(path), tuple(path))
        for v in sorted(adj[tail]):
            if v in on_path:
                continue
            # induced: v may touch only the current tail among path nodes
            if adj[v] & on_path != {tail}:
                continue
            path.append(v)
            on_path.add(v)
            extend(path, on_path)
            on_path.remove(v)
            path.pop()

    for leader in leaders:
        extend([leader], {leader})
    return best


def ssc_lower_bound(g, leaders, budget=10**6):
    """Larger of the eccentricity-style distance bound and the longest
    control-path bound; past the DFS budget only the distance bound stands."""
    if g.directed:
        raise GraphFormatError("the lower bounds are stated for undirected graphs")
    if not g.is_connected():
        raise DisconnectedGraphError("lower bounds require a connected graph")
    leaders = LeaderSet.of(leaders)
    leaders.check_against(g.n)
    dist_rows = [g.distances_from(i) for i in leaders]
    followers = [j for j in range(g.n) if j not in leaders]
    if followers:
        distance_bound = max(min(row[j] for row in dist_rows) for j in followers) + 1
    else:
        distance_bound = 1
    path_bound, path = 0, None
    exceeded = False
    try:
        path_bound, path = _longest_control_path(g, leaders, budget)
    except BudgetExceededError:
        exceeded = True
    return SSCLowerBound(bound=max(distance_bound, path_bound),
                         distance_bound=distance_bound, path_bound=path_bound,
                         longest_path=path, budget_exceeded=exceeded)


# -- symmetry screening ------------------------------------------------------

def _edge_labels(g_or_pattern):
    """Direction-sensitive edge labels: label of (u, v) covers both u->v and
    v->u entries so directed structure is preserved under comparison."""
    fwd = {}
    for i, j, w in g_or_pattern.edges:
        val = "free" if w is FREE else (w if isinstance(w, (Fraction, int)) else float(w))
        fwd[(i, j)] = val
        if not g_or_pattern.directed:
            fwd[(j, i)] = val

    def label(u, v):
        return (fwd.get((u, v)), fwd.get((v, u)))

    adj = [set() for _ in range(g_or_pattern.n)]
    for i, j in fwd:
        adj[i].add(j)
        adj[j].add(i)
    return label, [sorted(a) for a in adj]


def _refine_colors(n, label, adj, colors):
    """Weighted color refinement to a fixpoint."""
    while True:
        signatures = []
        for u in range(n):
            sig = tuple(sorted((colors[v], str(label(u, v))) for v in adj[u]))
            signatures.append((colors[u], sig))
        palette = {s: c for c, s in enumerate(sorted(set(signatures), key=repr))}
        new = [palette[s] for s in signatures]
        if new == colors:
            return colors
        colors = new


def _find_automorphism(n, label, adj, colors, src, dst, budget):
    """Backtracking search for a label-preserving automorphism mapping
    src -> dst while fixing every node whose color class is a singleton of
    the leader seed (leaders each own a unique color)."""
    perm = [-1] * n
    used = [False] * n
    steps = 0

    def consistent(u, img):
        if colors[u] != colors[img]:
            return False
        if len(adj[u]) != len(adj[img]):
            return False
        for v in adj[u]:
            pv = perm[v]
            if pv >= 0 and label(img, pv) != label(u, v):
                return False
        return True

    order = sorted(range(n), key=lambda u: (u != src, u))

    def assign(k):
        nonlocal steps
        steps += 1
        if steps > budget:
            raise BudgetExceededError("automorphism search budget exhausted")
        if k == n:
            return True
        u = order[k]
        candidates = [dst] if u == src else [
            v for v in range(n) if not used[v] and colors[v] == colors[u]]
        for img in candidates:
            if used[img] or not consistent(u, img):
                continue
            perm[u] = img
            used[img] = True
            if assign(k + 1):
                return True
            perm[u] = -1
            used[img] = False
        return False

    return assign(0)


def symmetric_followers(g_or_pattern, leaders, budget=10**6):
    """Nontrivial orbits of label-preserving automorphisms that fix every
    leader pointwise.  An empty list certifies no symmetric follower exists.

    Concrete graphs compare exact weights; patterns compare sign classes.
    """
    n = g_or_pattern.n
    leaders = LeaderSet.of(leaders)
    leaders.check_against(n)
    label, adj = _edge_labels(g_or_pattern)
    # seed colors: each leader gets its own color so automorphisms fix leaders
    colors = [leaders.ids.index(u) if u in leaders else len(leaders) for u in range(n)]
    colors = _refine_colors(n, label, adj, colors)
    uf = list(range(n))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    followers = [u for u in range(n) if u not in leaders]
    for a, b in itertools.combinations(followers, 2):
        if colors[a] != colors[b] or find(a) == find(b):
            continue
        if _find_automorphism(n, label, adj, colors, a, b, budget):
            uf[find(a)] = find(b)
    orbits = {}
    for u in followers:
        orbits.setdefault(find(u), []).append(u)
    return [tuple(sorted(v)) for v in sorted(orbits.values()) if len(v) > 1]


# -- layered connection-rank certificate --------------------------------------

def bfs_layers(g, leaders):
    """Default layer partition: BFS shells of the leader set."""
    leaders = LeaderSet.of(leaders)
    leaders.check_against(g.n)
    layers = [tuple(leaders.ids)]
    seen = set(leaders.ids)
    frontier = list(leaders.ids)
    while frontier:
        nxt = sorted({v for u in frontier for v in g.underlying_neighbors(u)} - seen)
        if not nxt:
            break
        layers.append(tuple(nxt))
        seen |= set(nxt)
        frontier = nxt
    return layers


def _term_rank(pattern_rows):
    """Maximum bipartite matching size of the nonzero pattern."""
    nrows = len(pattern_rows)
    ncols = len(pattern_rows[0]) if nrows else 0
    match_col = [-1] * ncols

    def augment(r, visited):
        for c in range(ncols):
            if pattern_rows[r][c] and c not in visited:
                visited.add(c)
                if match_col[c] < 0 or augment(match_col[c], visited):
                    match_col[c] = r
                    return True
        return False

    size = 0
    for r in range(nrows):
        if augment(r, set()):
            size += 1
    return size


@dataclass(frozen=True)
class LayeredRankResult:
    passed: bool
    layers: tuple
    block_term_ranks: tuple
    block_generic_full: tuple
    symmetric_orbits: tuple
    reason: str

    def to_dict(self):
        return {"passed": self.passed, "layers": [list(s) for s in self.layers],
                "block_term_ranks": list(self.block_term_ranks),
                "block_generic_full": list(self.block_generic_full),
                "symmetric_orbits": [list(o) for o in self.symmetric_orbits],
                "reason": self.reason}


def layered_rank_test(g_or_pattern, leaders, partition=None, seed=0, draws=3):
    """Certify SSC through full-row-rank connection blocks plus no symmetric
    followers.

    Each consecutive layer pair contributes the child-rows x father-columns
    weight-pattern block; the block must have term rank equal to its row
    count and keep full row rank at ``draws`` independent random rational
    evaluations respecting the sign pattern (evaluated exactly).
    """
    pattern = g_or_pattern if isinstance(g_or_pattern, SignPattern) \
        else SignPattern.from_graph(g_or_pattern)
    leaders = LeaderSet.of(leaders)
    leaders.check_against(pattern.n)
    if partition is None:
        partition = bfs_layers(pattern.skeleton(), leaders)
    layers = [tuple(layer) for layer in partition]
    flat = [u for layer in layers for u in layer]
    if sorted(flat) != list(range(pattern.n)) or tuple(sorted(layers[0])) != leaders.ids:
        raise GraphFormatError("partition must cover all nodes with layer 1 = leaders")
    signs = {}
    for i, j, s in pattern.edges:
        signs[(i, j)] = s
        if not pattern.directed:
            signs[(j, i)] = s
    rng = np.random.default_rng(seed)
    term_ranks = []
    generic_full = []
    ok = True
    reason = "ok"
    for a, b in zip(layers, layers[1:]):
        rows = [[1 if (child, father) in signs else 0 for father in a] for child in b]
        tr = _term_rank(rows)
        term_ranks.append(tr)
        if tr < len(b):
            ok = False
            reason = "connection block below full term rank"
            generic_full.append(False)
            continue
        full_all = True
        for _ in range(draws):
            block = []
            for child in b:
                row = []
                for father in a:
                    if (child, father) not in signs:
                        row.append(Fraction(0))
                        continue
                    s = signs[(child, father)]
                    mag = Fraction(int(rng.integers(1, 64)), int(rng.integers(1, 16)))
                    sign = s if s is not FREE else (1 if rng.random() < 0.5 else -1)
                    row.append(sign * mag)
                block.append(row)
            if rational.rank(block) < len(b):
                full_all = False
                break
        generic_full.append(full_all)
        if not full_all:
            ok = False
            reason = "connection block rank-deficient at a random evaluation"
    orbits = tuple(symmetric_followers(pattern, leaders))
    if orbits and ok:
        ok = False
        reason = "symmetric follower orbit present"
    return LayeredRankResult(passed=ok, layers=tuple(layers),
                             block_term_ranks=tuple(term_ranks),
                             block_generic_full=tuple(generic_full),
                             symmetric_orbits=orbits, reason=reason)


# -- Monte-Carlo audit ---------------------------------------------------------

@dataclass(frozen=True)
class SSCAudit:
    samples: int
    seed: int
    min_dim: dict
    histogram: dict
    counterexample: dict
    bound: int
    bound_violations: int

    def to_dict(self):
        return {"samples": self.samples, "seed": self.seed,
                "min_dim": dict(self.min_dim),
                "histogram": {k: dict(v) for k, v in self.histogram.items()},
                "counterexample": {k: (None if v is None else
                                       [[i, j, float(w)] for i, j, w in v.edges])
                                   for k, v in self.counterexample.items()},
                "bound": self.bound, "bound_violations": self.bound_violations}


def ssc_random_audit(pattern, leaders, samples, seed, protocol="both", check_bound=True):
    """Sample admissible weights and track the Kalman dimension per protocol.

    A minimum of ``n`` across samples is evidence (not proof) of SSC; any
    sample below ``n`` disproves SSC and is kept as the counterexample.
    Every sampled dimension is checked against the control-path/distance
    lower bound when requested.
    """
    if seed is None:
        raise ValueError("the audit requires a seed")
    pattern = pattern if isinstance(pattern, SignPattern) else SignPattern.from_graph(pattern)
    leaders = LeaderSet.of(leaders)
    leaders.check_against(pattern.n)
    protocols = [Protocol.ABS, Protocol.SIGNED] if protocol == "both" \
        else [Protocol.of(protocol)]
    bound = 0
    if check_bound and not pattern.directed:
        bound = ssc_lower_bound(pattern.skeleton(), leaders).bound
    rng = np.random.default_rng(seed)
    min_dim = {p.value: pattern.n + 1 for p in protocols}
    histogram = {p.value: {} for p in protocols}
    counterexample = {p.value: None for p in protocols}
    violations = 0
    for _ in range(samples):
        candidate = pattern.sample(rng)
        for p in protocols:
            dim = kalman_dim(build_laplacian(candidate, p), leaders,
                             with_witnesses=False).dim
            histogram[p.value][dim] = histogram[p.value].get(dim, 0) + 1
            if dim < min_dim[p.value]:
                min_dim[p.value] = dim
                if dim < pattern.n:
                    counterexample[p.value] = candidate
            if dim < bound:
                violations += 1
    return SSCAudit(samples=samples, seed=seed, min_dim=min_dim,
                    histogram=histogram, counterexample=counterexample,
                    bound=bound, bound_violations=violations)


SSC_CERTIFIED = "SSC_CERTIFIED"
BOUND_ONLY = "BOUND_ONLY"


@dataclass(frozen=True)
class SSCReport:
    lower_bound: int
    zf_closure: tuple
    zf_complete: bool
    layered_pass: bool
    layers: tuple
    symmetric_followers: tuple
    audit_min_dim: dict
    verdict: str

    def to_dict(self):
        return {"lower_bound": self.lower_bound, "zf_closure": list(self.zf_closure),
                "zf_complete": self.zf_complete, "layered_pass": self.layered_pass,
                "layers": [list(s) for s in self.layers],
                "symmetric_followers": [list(o) for o in self.symmetric_followers],
                "audit_min_dim": dict(self.audit_min_dim), "verdict": self.verdict}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def ssc_report(g_or_pattern, leaders, samples=200, seed=0, protocol="both",
               partition=None):
    """Full strong-structural-controllability work-up of one topology."""
    pattern = g_or_pattern if isinstance(g_or_pattern, SignPattern) \
        else SignPattern.from_graph(g_or_pattern)
    skeleton = pattern.skeleton()
    leaders = LeaderSet.of(leaders)
    bound = ssc_lower_bound(skeleton, leaders)
    closure = zero_forcing_closure(skeleton, leaders)
    layered = layered_rank_test(pattern, leaders, partition=partition, seed=seed)
    audit = ssc_random_audit(pattern, leaders, samples=samples, seed=seed,
                             protocol=protocol)
    zf_complete = len(closure) == pattern.n
    verdict = SSC_CERTIFIED if (zf_complete or layered.passed) else BOUND_ONLY
    return SSCReport(lower_bound=bound.bound, zf_closure=tuple(sorted(closure)),
                     zf_complete=zf_complete, layered_pass=layered.passed,
                     layers=layered.layers,
                     symmetric_followers=layered.symmetric_orbits,
                     audit_min_dim=audit.min_dim, verdict=verdict)
