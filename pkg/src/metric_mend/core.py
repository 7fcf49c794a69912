"""Graph model, exact shortest-path machinery, and unbalanced-cycle checkers.

Everything downstream (solver, repair, reductions, oracle) is built on the
primitives in this module.  All weight arithmetic is exact rational; there is
deliberately no floating point anywhere near a comparison.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator

Weight = Fraction
Edge = tuple[int, int]

#: Sentinel distance for unreachable pairs.  Compares greater than every
#: Weight and absorbs addition, which is all the code ever does with it.
INFINITY = float("inf")


class InstanceFormatError(ValueError):
    """Malformed instance text; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InternalConsistencyError(RuntimeError):
    """A mathematically guaranteed invariant failed at runtime: a bug, not bad input."""


def canonical_edge(u: int, v: int) -> Edge:
    """Normalize an unordered vertex pair to (min, max)."""
    return (u, v) if u < v else (v, u)


def _as_weight(value) -> Weight:
    if isinstance(value, float):
        raise TypeError(f"refusing float weight {value!r}; weights are exact rationals")
    return Fraction(value)


class Graph:
    """Undirected simple graph with exact rational edge weights.

    Immutable after construction; the "mutators" (:meth:`with_weight`,
    :meth:`without_edge`, :meth:`scaled`) return new graphs.  Input weights
    must be strictly positive; zero weights are tolerated only when
    ``allow_zero`` is set, which the repair machinery uses for transient
    states.
    """

    __slots__ = ("n", "_weights", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, object]], *, allow_zero: bool = False):
        if n < 1:
            raise ValueError(f"vertex count must be positive, got {n}")
        self.n = n
        weights: dict[Edge, Weight] = {}
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"vertex id out of range in edge ({u}, {v})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            e = canonical_edge(u, v)
            if e in weights:
                raise ValueError(f"duplicate edge {e}")
            wf = _as_weight(w)
            if wf < 0 or (wf == 0 and not allow_zero):
                raise ValueError(f"nonpositive weight {wf} on edge {e}")
            weights[e] = wf
        self._weights = weights
        adj: list[list[tuple[int, Weight]]] = [[] for _ in range(n)]
        for (u, v), wf in weights.items():
            adj[u].append((v, wf))
            adj[v].append((u, wf))
        for row in adj:
            row.sort()
        self._adj = adj

    @property
    def m(self) -> int:
        return len(self._weights)

    def edges(self) -> list[Edge]:
        """Edge pairs in (u, v) lexicographic order."""
        return sorted(self._weights)

    def edge_items(self) -> list[tuple[Edge, Weight]]:
        return sorted(self._weights.items())

    def weight(self, u: int, v: int) -> Weight:
        return self._weights[canonical_edge(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return canonical_edge(u, v) in self._weights

    def neighbors(self, u: int) -> list[tuple[int, Weight]]:
        return self._adj[u]

    def with_weight(self, edge: Edge, w, *, allow_zero: bool = True) -> "Graph":
        e = canonical_edge(*edge)
        if e not in self._weights:
            raise KeyError(f"no edge {e}")
        items = [(u, v, w if (u, v) == e else wf) for (u, v), wf in self._weights.items()]
        return Graph(self.n, items, allow_zero=allow_zero)

    def without_edge(self, edge: Edge) -> "Graph":
        e = canonical_edge(*edge)
        if e not in self._weights:
            raise KeyError(f"no edge {e}")
        items = [(u, v, wf) for (u, v), wf in self._weights.items() if (u, v) != e]
        return Graph(self.n, items, allow_zero=True)

    def scaled(self, factor) -> "Graph":
        """Multiply every weight by a positive rational factor."""
        f = _as_weight(factor)
        if f <= 0:
            raise ValueError("scale factor must be positive")
        return Graph(self.n, [(u, v, wf * f) for (u, v), wf in self._weights.items()],
                     allow_zero=True)

    def has_zero_weight(self) -> bool:
        return any(w == 0 for w in self._weights.values())

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and self._weights == other._weights)

    def __hash__(self):
        return hash((self.n, frozenset(self._weights.items())))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------------------
# Instance text format


def _parse_weight_token(token: str, line: int) -> Weight:
    if "/" in token:
        num_s, _, den_s = token.partition("/")
        try:
            num, den = int(num_s), int(den_s)
        except ValueError:
            raise InstanceFormatError(f"malformed weight {token!r}", line) from None
        if den <= 0:
            raise InstanceFormatError(f"malformed weight {token!r} (denominator must be positive)", line)
        return Fraction(num, den)
    try:
        return Fraction(int(token))
    except ValueError:
        raise InstanceFormatError(f"malformed weight {token!r}", line) from None


def _significant_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_instance(text: str) -> Graph:
    """Parse the shared edge-list instance format.

    First significant line is ``n m``; then exactly m lines ``u v w`` where w
    is a positive integer or fraction ``p/q``.  ``#`` starts a comment.  All
    violations are reported with their line number.
    """
    lines = _significant_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise InstanceFormatError("empty instance") from None
    parts = header.split()
    if len(parts) != 2:
        raise InstanceFormatError(f"expected header 'n m', got {header!r}", lineno)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise InstanceFormatError(f"expected header 'n m', got {header!r}", lineno) from None
    if n < 1:
        raise InstanceFormatError(f"vertex count must be positive, got {n}", lineno)
    if m < 0:
        raise InstanceFormatError(f"edge count must be nonnegative, got {m}", lineno)

    edges: list[tuple[int, int, Weight]] = []
    seen: set[Edge] = set()
    for _ in range(m):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise InstanceFormatError(f"expected {m} edge lines, got {len(edges)}") from None
        parts = line.split()
        if len(parts) != 3:
            raise InstanceFormatError(f"expected 'u v w', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InstanceFormatError(f"expected 'u v w', got {line!r}", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceFormatError(f"vertex id out of range in edge ({u}, {v})", lineno)
        if u == v:
            raise InstanceFormatError(f"self-loop at vertex {u}", lineno)
        e = canonical_edge(u, v)
        if e in seen:
            raise InstanceFormatError(f"duplicate edge {e}", lineno)
        w = _parse_weight_token(parts[2], lineno)
        if w <= 0:
            raise InstanceFormatError(f"nonpositive weight {w} on edge {e}", lineno)
        seen.add(e)
        edges.append((u, v, w))

    for lineno, line in lines:
        raise InstanceFormatError(f"unexpected trailing content {line!r}", lineno)
    return Graph(n, edges)


def format_weight(w: Weight) -> str:
    """Render a rational exactly: integer or ``p/q``."""
    if w == INFINITY:
        return "inf"
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def serialize_instance(g: Graph) -> str:
    """Canonical text form; ``parse_instance`` round-trips it exactly."""
    out = [f"{g.n} {g.m}"]
    for (u, v), w in g.edge_items():
        out.append(f"{u} {v} {format_weight(w)}")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Shortest paths


def dijkstra(g: Graph, source: int,
             skip_edges: frozenset[Edge] = frozenset()) -> tuple[list, list]:
    """Single-source shortest paths with exact weights.

    Returns (dist, parent); dist entries are Fractions or INFINITY, parent is
    a deterministic shortest-path tree (ties resolved by heap order on
    (distance, vertex id), updates on strict improvement only).
    """
    n = g.n
    dist: list = [INFINITY] * n
    parent: list = [None] * n
    done = [False] * n
    dist[source] = Fraction(0)
    heap: list[tuple[Weight, int]] = [(Fraction(0), source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in g.neighbors(u):
            if done[v]:
                continue
            if skip_edges and canonical_edge(u, v) in skip_edges:
                continue
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def _path_from_parents(parent: list, source: int, target: int) -> list[int]:
    path = [target]
    while path[-1] != source:
        prev = parent[path[-1]]
        if prev is None:
            raise InternalConsistencyError(f"no parent chain from {target} to {source}")
        path.append(prev)
    path.reverse()
    return path


class DistanceTables:
    """All-pairs shortest-path distances and shortest-path counts.

    ``dist(u, v)`` is exact (INFINITY when unreachable); ``spcount(u, v)`` is
    the number of distinct shortest u-v paths as an unbounded integer, with
    the conventions spcount(v, v) = 1 and spcount = 0 for unreachable pairs.
    Immutable after construction.
    """

    __slots__ = ("n", "_dist", "_count")

    def __init__(self, n: int, dist_rows: list[list], count_rows: list[list[int]] | None):
        self.n = n
        self._dist = dist_rows
        self._count = count_rows

    def dist(self, u: int, v: int):
        return self._dist[u][v]

    def spcount(self, u: int, v: int) -> int:
        if self._count is None:
            raise ValueError("tables were built without path counts")
        return self._count[u][v]

    @property
    def has_counts(self) -> bool:
        return self._count is not None


def all_pairs_shortest_paths(g: Graph, *, counts: bool = True) -> DistanceTables:
    """Build the full distance (and, by default, path-count) tables.

    Counts are obtained per source by processing vertices in increasing
    distance and summing the counts of the predecessors that realize that
    distance; strictly positive weights make the recurrence well founded, so
    counting demands a zero-free graph.
    """
    if counts and g.has_zero_weight():
        raise ValueError("path counting requires strictly positive weights")
    dist_rows: list[list] = []
    count_rows: list[list[int]] | None = [] if counts else None
    for s in range(g.n):
        dist, _ = dijkstra(g, s)
        dist_rows.append(dist)
        if count_rows is None:
            continue
        row = [0] * g.n
        row[s] = 1
        order = sorted((d, v) for v, d in enumerate(dist) if v != s and d != INFINITY)
        for d, v in order:
            total = 0
            for x, w in g.neighbors(v):
                dx = dist[x]
                if dx != INFINITY and dx + w == d:
                    total += row[x]
            row[v] = total
        count_rows.append(row)
    return DistanceTables(g.n, dist_rows, count_rows)


# ---------------------------------------------------------------------------
# Deficits and covers


def graph_deficit(g: Graph, tables: DistanceTables) -> Weight:
    """Maximum cycle deficit, computed as max(w(e) - d(endpoints), 0).

    Every cycle's deficit is at most its top edge's excess over the endpoint
    distance, and each positive excess is realized by the cycle closing the
    edge with a shortest path, so the edge scan equals the cycle maximum.
    """
    best = Fraction(0)
    for (u, v), w in g.edge_items():
        excess = w - tables.dist(u, v)
        if excess > best:
            best = excess
    return best


def is_metric(g: Graph) -> bool:
    """True iff every edge weight equals its endpoints' shortest-path distance."""
    tables = all_pairs_shortest_paths(g, counts=False)
    return graph_deficit(g, tables) == 0


@dataclass(frozen=True)
class CycleWitness:
    """An explicit unbalanced cycle: top edge, the ordered non-top path, deficit."""

    top: Edge
    nontop: tuple[Edge, ...]
    deficit: Weight

    @property
    def edges(self) -> tuple[Edge, ...]:
        return (self.top,) + self.nontop

    def __str__(self) -> str:
        path = " ".join(f"({u},{v})" for u, v in self.nontop)
        return f"top ({self.top[0]},{self.top[1]}) nontop [{path}] deficit {format_weight(self.deficit)}"


class CoverKind(Enum):
    """Which part of every unbalanced cycle a cover must contain."""

    REGULAR = "regular"
    NONTOP = "nontop"
    TOP = "top"


def _check_edge_subset(g: Graph, edges: Iterable[Edge], label: str) -> frozenset[Edge]:
    out = frozenset(canonical_edge(*e) for e in edges)
    for e in out:
        if e not in g._weights:
            raise ValueError(f"{label} contains non-edge {e}")
    return out


def find_uncovered_cycle(g: Graph, top_cover: Iterable[Edge],
                         nontop_cover: Iterable[Edge]) -> CycleWitness | None:
    """Find an unbalanced cycle escaping (top_cover as tops, nontop_cover as non-tops).

    A cycle escapes iff its top edge is outside ``top_cover`` and none of its
    non-top edges lie in ``nontop_cover``.  Equivalently: some edge e = (u, v)
    not in ``top_cover`` has dist(u, v) < w(e) in the graph without the
    ``nontop_cover`` edges (such a shortest path is simple and cannot use e).
    Returns a maximum-deficit witness, ties broken by lexicographic top edge,
    or None when every unbalanced cycle is covered.
    """
    a = _check_edge_subset(g, top_cover, "top_cover")
    b = _check_edge_subset(g, nontop_cover, "nontop_cover")
    runs: dict[int, tuple[list, list]] = {}
    best: tuple[Weight, Edge] | None = None
    for (u, v), w in g.edge_items():
        if (u, v) in a:
            continue
        if u not in runs:
            runs[u] = dijkstra(g, u, skip_edges=b)
        d = runs[u][0][v]
        if d < w:
            deficit = w - d
            if best is None or deficit > best[0]:
                best = (deficit, (u, v))
    if best is None:
        return None
    deficit, (u, v) = best
    vertices = _path_from_parents(runs[u][1], u, v)
    nontop = tuple(canonical_edge(x, y) for x, y in zip(vertices, vertices[1:]))
    return CycleWitness(top=(u, v), nontop=nontop, deficit=deficit)


def validate_cover(g: Graph, cover: Iterable[Edge], kind: CoverKind) -> CycleWitness | None:
    """None when ``cover`` is a valid cover of the given kind, else a witness cycle."""
    s = frozenset(canonical_edge(*e) for e in cover)
    if kind is CoverKind.REGULAR:
        return find_uncovered_cycle(g, s, s)
    if kind is CoverKind.NONTOP:
        return find_uncovered_cycle(g, frozenset(), s)
    if kind is CoverKind.TOP:
        return find_uncovered_cycle(g, s, frozenset())
    raise ValueError(f"unknown cover kind {kind!r}")
