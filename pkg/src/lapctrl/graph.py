"""Signed graph data model, file formats and elementary queries.

Node ids are dense integers ``0..n-1``.  External labels, when present in a
JSON input, are carried along for reporting but never used for indexing.
Weights are either exact rationals (:class:`fractions.Fraction`, produced by
the parsers for integer and ``p/q`` tokens) or floats; a graph whose weights
are all rational supports the exact-arithmetic analysis mode.
"""

from __future__ import annotations

import hashlib
import json
import operator
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import GraphFormatError

Weight = "Fraction | float"


def _check_weight(w, where=""):
    if not isinstance(w, (Fraction, float, int)):
        raise GraphFormatError(f"unsupported weight type {type(w).__name__}{where}")
    if isinstance(w, int):
        w = Fraction(w)
    if w == 0:
        raise GraphFormatError(f"zero edge weight{where}")
    return w


@dataclass(frozen=True)
class SignedGraph:
    """Immutable weighted signed graph.

    ``edges`` holds one entry per edge as ``(tail, head, weight)``.  For
    undirected graphs each unordered pair is stored once with ``tail < head``;
    the symmetric weight is implied.  For directed graphs the pair is the
    influence direction: ``tail -> head`` means ``head`` listens to ``tail``.
    """

    n: int
    directed: bool
    edges: tuple = ()
    labels: tuple | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "n", operator.index(self.n))
        except TypeError:
            raise GraphFormatError(f"node count must be an integer, got {self.n!r}") from None
        if self.n < 1:
            raise GraphFormatError(f"node count must be positive, got {self.n}")
        norm = []
        seen = set()
        for e in self.edges:
            if len(e) != 3:
                raise GraphFormatError(f"edge must be (tail, head, weight), got {e!r}")
            i, j, w = e
            try:
                i, j = operator.index(i), operator.index(j)
            except TypeError:
                raise GraphFormatError(
                    f"edge endpoints must be integers, got {e!r}") from None
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphFormatError(f"edge ({i},{j}) out of range for n={self.n}")
            if i == j:
                raise GraphFormatError(f"self-loop at node {i}")
            w = _check_weight(w, f" on edge ({i},{j})")
            if not self.directed and i > j:
                i, j = j, i
            if (i, j) in seen:
                raise GraphFormatError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
            norm.append((i, j, w))
        norm.sort(key=lambda e: (e[0], e[1]))
        object.__setattr__(self, "edges", tuple(norm))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.n:
                raise GraphFormatError(f"expected {self.n} labels, got {len(labels)}")
            object.__setattr__(self, "labels", labels)
        # in_adj[i]: nodes whose state enters agent i's update; out_adj[i]: nodes i influences.
        in_adj = [[] for _ in range(self.n)]
        out_adj = [[] for _ in range(self.n)]
        for i, j, w in self.edges:
            in_adj[j].append((i, w))
            out_adj[i].append((j, w))
            if not self.directed:
                in_adj[i].append((j, w))
                out_adj[j].append((i, w))
        object.__setattr__(self, "_in_adj", tuple(tuple(a) for a in in_adj))
        object.__setattr__(self, "_out_adj", tuple(tuple(a) for a in out_adj))

    # -- queries ---------------------------------------------------------

    @property
    def weights_exact(self):
        """True when every weight is an exact rational."""
        return all(isinstance(w, Fraction) for _, _, w in self.edges)

    def neighbors(self, i):
        """Nodes contributing to agent ``i``'s update, as ``(node, weight)`` pairs."""
        if not 0 <= i < self.n:
            raise GraphFormatError(f"node {i} out of range for n={self.n}")
        return list(self._in_adj[i])

    def weight(self, i, j):
        """Weight of the stored edge covering ``(i, j)``, or None."""
        for k, w in self._in_adj[j]:
            if k == i:
                return w
        return None

    def degree(self, i):
        return len(self._in_adj[i]) if not self.directed else len(
            set(k for k, _ in self._in_adj[i]) | set(k for k, _ in self._out_adj[i])
        )

    def underlying_neighbors(self, i):
        """Neighbor ids of ``i`` in the underlying undirected topology."""
        return sorted(set(k for k, _ in self._in_adj[i]) | set(k for k, _ in self._out_adj[i]))

    def is_connected(self):
        """Connectivity of the underlying undirected topology; signs are ignored."""
        if self.n == 1:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.underlying_neighbors(u):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n

    def components(self):
        """Node sets of the underlying undirected components, each sorted."""
        seen = set()
        out = []
        for s in range(self.n):
            if s in seen:
                continue
            comp = {s}
            queue = deque([s])
            seen.add(s)
            while queue:
                u = queue.popleft()
                for v in self.underlying_neighbors(u):
                    if v not in seen:
                        seen.add(v)
                        comp.add(v)
                        queue.append(v)
            out.append(sorted(comp))
        return out

    def distances_from(self, source):
        """BFS hop counts on the underlying undirected topology (-1 = unreachable)."""
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self.underlying_neighbors(u):
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def fingerprint(self):
        """Stable short hash of the canonical serialization."""
        return hashlib.sha256(to_json_text(self).encode()).hexdigest()[:12]


@dataclass(frozen=True)
class LeaderSet:
    """Strictly increasing node ids receiving external inputs."""

    ids: tuple

    def __post_init__(self):
        ids = tuple(int(i) for i in self.ids)
        if not ids:
            raise GraphFormatError("leader set must be nonempty")
        if any(b <= a for a, b in zip(ids, ids[1:])):
            raise GraphFormatError(f"leader ids must be strictly increasing, got {ids}")
        if ids[0] < 0:
            raise GraphFormatError(f"negative leader id {ids[0]}")
        object.__setattr__(self, "ids", ids)

    @classmethod
    def of(cls, leaders):
        if isinstance(leaders, LeaderSet):
            return leaders
        if isinstance(leaders, int):
            return cls((leaders,))
        return cls(tuple(sorted(set(int(i) for i in leaders))))

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def __contains__(self, i):
        return i in self.ids

    def check_against(self, n):
        if self.ids[-1] >= n:
            raise GraphFormatError(f"leader id {self.ids[-1]} out of range for n={n}")


FREE = None  # sign marker for edges whose sign is unconstrained


@dataclass(frozen=True)
class SignPattern:
    """Edge sign/zero pattern: each edge carries ``+1``, ``-1`` or FREE."""

    n: int
    directed: bool
    edges: tuple = ()

    def __post_init__(self):
        norm = []
        seen = set()
        for i, j, s in self.edges:
            if s not in (1, -1, FREE):
                raise GraphFormatError(f"sign must be +1, -1 or FREE, got {s!r}")
            if i == j or not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphFormatError(f"bad pattern edge ({i},{j})")
            if not self.directed and i > j:
                i, j = j, i
            if (i, j) in seen:
                raise GraphFormatError(f"duplicate pattern edge ({i},{j})")
            seen.add((i, j))
            norm.append((i, j, s))
        norm.sort(key=lambda e: (e[0], e[1]))
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def from_graph(cls, g, free=False):
        """Sign pattern of a concrete graph; ``free=True`` drops the signs."""
        return cls(g.n, g.directed, tuple(
            (i, j, FREE if free else (1 if w > 0 else -1)) for i, j, w in g.edges
        ))

    def skeleton(self):
        """Unit-weight graph over the pattern's support (FREE treated as +1)."""
        return SignedGraph(self.n, self.directed, tuple(
            (i, j, Fraction(s if s is not FREE else 1)) for i, j, s in self.edges
        ))

    def sample(self, rng, low=0.1, high=2.0):
        """Concrete weights: magnitudes uniform in [low, high], signs per pattern."""
        edges = []
        for i, j, s in self.edges:
            mag = float(rng.uniform(low, high))
            sign = s if s is not FREE else (1 if rng.random() < 0.5 else -1)
            edges.append((i, j, sign * mag))
        return SignedGraph(self.n, self.directed, tuple(edges))

    def sample_rational(self, rng, denom=16, max_num=32):
        """Concrete rational weights with the same sign discipline."""
        edges = []
        for i, j, s in self.edges:
            num = int(rng.integers(1, max_num + 1))
            den = int(rng.integers(1, denom + 1))
            sign = s if s is not FREE else (1 if rng.random() < 0.5 else -1)
            edges.append((i, j, Fraction(sign * num, den)))
        return SignedGraph(self.n, self.directed, tuple(edges))


# -- operations on graphs --------------------------------------------------

def neighbors(g, i):
    return g.neighbors(i)


def is_connected(g):
    return g.is_connected()


def accessible_nodes(g, leaders):
    """Nodes reachable from some leader along influence edges; leaders included."""
    leaders = LeaderSet.of(leaders)
    leaders.check_against(g.n)
    seen = set(leaders.ids)
    queue = deque(leaders.ids)
    while queue:
        u = queue.popleft()
        for v, _ in g._out_adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


# -- parsing and serialization ---------------------------------------------

def _parse_weight_token(tok, line):
    try:
        if "/" in tok:
            num, den = tok.split("/", 1)
            return Fraction(int(num), int(den))
        if any(c in tok for c in ".eE"):
            return float(tok)
        return Fraction(int(tok))
    except (ValueError, ZeroDivisionError) as exc:
        raise GraphFormatError(f"bad weight {tok!r} ({exc})", line=line) from None


def parse_edge_list(text):
    """Parse the edge-list format: header ``u N``/``d N``, then ``i j w`` lines."""
    header = None
    edges = []
    seen_pairs = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if header is None:
            if len(parts) != 2 or parts[0] not in ("u", "d"):
                raise GraphFormatError(
                    f"expected header 'u N' or 'd N', got {stripped!r}", line=lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFormatError(f"bad node count {parts[1]!r}", line=lineno) from None
            header = (parts[0] == "d", n)
            continue
        if len(parts) != 3:
            raise GraphFormatError(f"expected 'i j w', got {stripped!r}", line=lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"bad node id in {stripped!r}", line=lineno) from None
        w = _parse_weight_token(parts[2], lineno)
        directed, n = header
        try:
            SignedGraph(n, directed, ((i, j, w),))
        except GraphFormatError as exc:
            raise GraphFormatError(str(exc), line=lineno) from None
        key = (i, j) if directed else (min(i, j), max(i, j))
        if key in seen_pairs:
            raise GraphFormatError(f"duplicate edge ({i},{j})", line=lineno)
        seen_pairs.add(key)
        edges.append((i, j, w))
    if header is None:
        raise GraphFormatError("empty graph file (missing header)")
    directed, n = header
    return SignedGraph(n, directed, tuple(edges))


def _weight_from_json(w):
    if isinstance(w, bool):
        raise GraphFormatError(f"bad JSON weight {w!r}")
    if isinstance(w, int):
        return Fraction(w)
    if isinstance(w, float):
        return w
    if isinstance(w, str):
        return _parse_weight_token(w, None)
    raise GraphFormatError(f"bad JSON weight {w!r}")


def parse_json_graph(text):
    """Parse the JSON format: {"directed": bool, "n": int, "edges": [[i,j,w],...]}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise GraphFormatError("JSON graph must be an object")
    for key in ("directed", "n", "edges"):
        if key not in doc:
            raise GraphFormatError(f"JSON graph missing field {key!r}")
    edges = []
    for idx, e in enumerate(doc["edges"]):
        if not isinstance(e, (list, tuple)) or len(e) != 3:
            raise GraphFormatError(f"edge #{idx} must be [i, j, w], got {e!r}")
        edges.append((e[0], e[1], _weight_from_json(e[2])))
    labels = doc.get("labels")
    return SignedGraph(int(doc["n"]), bool(doc["directed"]), tuple(edges),
                       labels=tuple(labels) if labels is not None else None)


def parse_graph(text):
    """Parse either supported format, dispatched on the leading character."""
    for ch in text:
        if ch.isspace():
            continue
        if ch == "{":
            return parse_json_graph(text)
        break
    return parse_edge_list(text)


def load_graph(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def _weight_token(w):
    if isinstance(w, Fraction):
        return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"
    return repr(w)


def to_edge_list_text(g):
    """Canonical edge-list serialization (edges already sorted by (i, j))."""
    lines = [f"{'d' if g.directed else 'u'} {g.n}"]
    for i, j, w in g.edges:
        lines.append(f"{i} {j} {_weight_token(w)}")
    return "\n".join(lines) + "\n"


def _weight_json(w):
    if isinstance(w, Fraction):
        if w.denominator == 1:
            return int(w)
        return f"{w.numerator}/{w.denominator}"
    return w


def to_json_dict(g):
    doc = {
        "directed": g.directed,
        "n": g.n,
        "edges": [[i, j, _weight_json(w)] for i, j, w in g.edges],
    }
    if g.labels is not None:
        doc["labels"] = list(g.labels)
    return doc


def to_json_text(g):
    return json.dumps(to_json_dict(g), sort_keys=True, separators=(",", ":")) + "\n"
