"""Constructive instance transformers and random-instance generation.

Each transformer returns the produced instance together with a back-mapping
from its edges to source-problem objects, so optimal covers of the output can
be translated into source solutions and cross-validated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .core import (
    Edge,
    Graph,
    INFINITY,
    InstanceFormatError,
    all_pairs_shortest_paths,
    canonical_edge,
    dijkstra,
    graph_deficit,
    _significant_lines,
)
from .solver import ProblemKind


def _check_simple_edges(n: int, edges: Iterable[Edge], what: str) -> tuple[Edge, ...]:
    seen: set[Edge] = set()
    out: list[Edge] = []
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"{what}: vertex id out of range in ({u}, {v})")
        if u == v:
            raise ValueError(f"{what}: self-loop at {u}")
        e = canonical_edge(u, v)
        if e in seen:
            raise ValueError(f"{what}: duplicate edge {e}")
        seen.add(e)
        out.append(e)
    return tuple(sorted(out))


@dataclass(frozen=True)
class MulticutInstance:
    """Unweighted graph plus demand pairs to disconnect."""

    n: int
    edges: tuple[Edge, ...]
    demands: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = _check_simple_edges(self.n, self.edges, "multicut")
        object.__setattr__(self, "edges", edges)
        edge_set = set(edges)
        seen: set[Edge] = set()
        demands = []
        for s, t in self.demands:
            if not (0 <= s < self.n and 0 <= t < self.n) or s == t:
                raise ValueError(f"invalid demand pair ({s}, {t})")
            d = canonical_edge(s, t)
            if d in edge_set:
                raise ValueError(f"demand pair {d} is an edge; strip it first")
            if d in seen:
                raise ValueError(f"duplicate demand pair {d}")
            seen.add(d)
            demands.append(d)
        object.__setattr__(self, "demands", tuple(demands))


@dataclass(frozen=True)
class LbCutInstance:
    """Unweighted graph with a source, a sink, and a path-length bound."""

    n: int
    edges: tuple[Edge, ...]
    source: int
    sink: int
    bound: int

    def __post_init__(self):
        edges = _check_simple_edges(self.n, self.edges, "lb-cut")
        object.__setattr__(self, "edges", edges)
        if not (0 <= self.source < self.n and 0 <= self.sink < self.n):
            raise ValueError("source/sink out of range")
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        if canonical_edge(self.source, self.sink) in set(edges):
            raise ValueError("the (source, sink) edge must be stripped first")
        if self.bound < 1:
            raise ValueError("length bound must be a positive integer")


@dataclass(frozen=True)
class ReductionArtifact:
    """A produced instance plus the mapping back to the source problem."""

    instance: Graph
    kind: ProblemKind
    back_map: Mapping[Edge, Edge]
    added_edges: frozenset[Edge]
    added_vertices: frozenset[int]

    def map_back(self, edges: Iterable[Edge]) -> list[Edge]:
        """Translate output edges to source objects; rejects introduced edges."""
        out = []
        for e in edges:
            e = canonical_edge(*e)
            if e in self.added_edges:
                raise ValueError(f"edge {e} was introduced by the reduction")
            if e not in self.back_map:
                raise ValueError(f"edge {e} is not in the reduced instance")
            out.append(self.back_map[e])
        return sorted(out)


def multicut_to_gmvid(mc: MulticutInstance) -> ReductionArtifact:
    """Weight the instance edges 1 and add a weight-n edge per demand pair.

    The unbalanced cycles of the output are exactly a demand edge plus a unit
    path between its endpoints, so minimum non-top covers coincide with
    minimum multicuts.
    """
    items = [(u, v, Fraction(1)) for u, v in mc.edges]
    heavy = Fraction(mc.n)
    items += [(s, t, heavy) for s, t in mc.demands]
    graph = Graph(mc.n, items)
    return ReductionArtifact(
        instance=graph,
        kind=ProblemKind.GMVID,
        back_map={e: e for e in mc.edges},
        added_edges=frozenset(mc.demands),
        added_vertices=frozenset(),
    )


def lbcut_to_gmvid(lb: LbCutInstance) -> ReductionArtifact:
    """Weight the instance edges 1 and add a weight-(bound+1) source-sink edge.

    Unbalanced cycles of the output are exactly that edge plus a source-sink
    path of at most ``bound`` unit edges.
    """
    items = [(u, v, Fraction(1)) for u, v in lb.edges]
    st = canonical_edge(lb.source, lb.sink)
    items.append((st[0], st[1], Fraction(lb.bound + 1)))
    graph = Graph(lb.n, items)
    return ReductionArtifact(
        instance=graph,
        kind=ProblemKind.GMVID,
        back_map={e: e for e in lb.edges},
        added_edges=frozenset({st}),
        added_vertices=frozenset(),
    )


def gmvid_to_gmvd(g: Graph) -> ReductionArtifact:
    """Gadget reduction from the increase-only problem to the full problem.

    For each edge that tops an unbalanced cycle (detected as weight exceeding
    the endpoint distance) the construction attaches m+1 fresh degree-two
    vertices, each joined to the heavy edge's endpoints by a weight-L edge and
    a weight L - w edge, with L one more than the maximum weight.  Gadget
    vertex ids are appended after the original ids, heavy edges in
    lexicographic order, copies in increasing order, so the artifact is
    reproducible.
    """
    tables = all_pairs_shortest_paths(g, counts=False)
    tops = [(u, v) for (u, v), w in g.edge_items() if w > tables.dist(u, v)]
    if not tops:
        return ReductionArtifact(instance=g, kind=ProblemKind.GMVD,
                                 back_map={e: e for e in g.edges()},
                                 added_edges=frozenset(), added_vertices=frozenset())
    big = 1 + max(w for _, w in g.edge_items())
    copies = g.m + 1
    items = [(u, v, w) for (u, v), w in g.edge_items()]
    added_edges: set[Edge] = set()
    added_vertices: set[int] = set()
    for i, (s, t) in enumerate(tops):
        for j in range(copies):
            vid = g.n + i * copies + j
            added_vertices.add(vid)
            for endpoint, weight in ((s, big), (t, big - g.weight(s, t))):
                e = canonical_edge(endpoint, vid)
                items.append((e[0], e[1], weight))
                added_edges.add(e)
    graph = Graph(g.n + len(tops) * copies, items)
    return ReductionArtifact(instance=graph, kind=ProblemKind.GMVD,
                             back_map={e: e for e in g.edges()},
                             added_edges=frozenset(added_edges),
                             added_vertices=frozenset(added_vertices))


# ---------------------------------------------------------------------------
# Random instances


def gen_random(n: int, density: float, weight_max: int, violations: int,
               seed: int, *, max_attempts: int = 50) -> Graph:
    """Random instance: a metric base with a chosen number of planted violations.

    Edges are sampled with the given probability and random integer weights,
    then every weight is replaced by the endpoint shortest-path distance (a
    metric graph by construction).  Perturbing the chosen edges upward jumps
    above the best alternative path, so at least one planted violation
    registers whenever the sampled graph has a cycle; downward perturbations
    may or may not create violations on other edges.  Deterministic per seed;
    resamples a bounded number of times when a draw cannot express the
    requested violations.
    """
    if n < 3:
        raise ValueError("need at least 3 vertices")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    if weight_max < 1:
        raise ValueError("weight_max must be a positive integer")
    if violations < 0:
        raise ValueError("violations must be nonnegative")
    rng = random.Random(seed)
    density = float(density)

    for _ in range(max_attempts):
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < density]
        if len(pairs) < violations or (violations > 0 and len(pairs) < 3):
            continue
        base = Graph(n, [(u, v, Fraction(rng.randint(1, weight_max)))
                         for u, v in pairs])
        tables = all_pairs_shortest_paths(base, counts=False)
        work = Graph(n, [(u, v, tables.dist(u, v)) for u, v in pairs])
        if violations == 0:
            return work
        for e in rng.sample(sorted(work.edges()), violations):
            w = work.weight(*e)
            if rng.random() < 0.5:
                dist, _ = dijkstra(work, e[0], skip_edges=frozenset({e}))
                alt = dist[e[1]]
                bump = Fraction(rng.randint(1, weight_max))
                work = work.with_weight(e, (alt if alt != INFINITY else w) + bump,
                                        allow_zero=False)
            elif w > 1:
                work = work.with_weight(e, Fraction(rng.randint(1, int(w) - 1)),
                                        allow_zero=False)
        if graph_deficit(work, all_pairs_shortest_paths(work, counts=False)) > 0:
            return work
    raise ValueError(
        f"could not realize {violations} violations at n={n}, density={density}; "
        "the sampled graphs have too few cycles")


# ---------------------------------------------------------------------------
# Source-problem file formats (core edge-list style, unweighted, one trailer)


def _parse_unweighted_header(lines) -> tuple[int, int, list[Edge]]:
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
    edges: list[Edge] = []
    for _ in range(m):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise InstanceFormatError(f"expected {m} edge lines, got {len(edges)}") from None
        parts = line.split()
        if len(parts) != 2:
            raise InstanceFormatError(f"expected 'u v', got {line!r}", lineno)
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise InstanceFormatError(f"expected 'u v', got {line!r}", lineno) from None
    return n, m, edges


def parse_multicut(text: str) -> MulticutInstance:
    """Parse 'n m', m unweighted edge lines, then 'D k' and k demand lines."""
    lines = _significant_lines(text)
    n, _, edges = _parse_unweighted_header(lines)
    try:
        lineno, trailer = next(lines)
    except StopIteration:
        raise InstanceFormatError("missing demand section 'D k'") from None
    parts = trailer.split()
    if len(parts) != 2 or parts[0] != "D":
        raise InstanceFormatError(f"expected 'D k', got {trailer!r}", lineno)
    k = int(parts[1])
    demands: list[tuple[int, int]] = []
    for _ in range(k):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise InstanceFormatError(f"expected {k} demand lines, got {len(demands)}") from None
        parts = line.split()
        if len(parts) != 2:
            raise InstanceFormatError(f"expected demand 's t', got {line!r}", lineno)
        demands.append((int(parts[0]), int(parts[1])))
    for lineno, line in lines:
        raise InstanceFormatError(f"unexpected trailing content {line!r}", lineno)
    try:
        return MulticutInstance(n=n, edges=tuple(edges), demands=tuple(demands))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def serialize_multicut(mc: MulticutInstance) -> str:
    out = [f"{mc.n} {len(mc.edges)}"]
    out += [f"{u} {v}" for u, v in mc.edges]
    out.append(f"D {len(mc.demands)}")
    out += [f"{s} {t}" for s, t in mc.demands]
    return "\n".join(out)


def parse_lbcut(text: str) -> LbCutInstance:
    """Parse 'n m', m unweighted edge lines, then one 'LB s t L' line."""
    lines = _significant_lines(text)
    n, _, edges = _parse_unweighted_header(lines)
    try:
        lineno, trailer = next(lines)
    except StopIteration:
        raise InstanceFormatError("missing 'LB s t L' line") from None
    parts = trailer.split()
    if len(parts) != 4 or parts[0] != "LB":
        raise InstanceFormatError(f"expected 'LB s t L', got {trailer!r}", lineno)
    for lineno, line in lines:
        raise InstanceFormatError(f"unexpected trailing content {line!r}", lineno)
    try:
        return LbCutInstance(n=n, edges=tuple(edges), source=int(parts[1]),
                             sink=int(parts[2]), bound=int(parts[3]))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def serialize_lbcut(lb: LbCutInstance) -> str:
    out = [f"{lb.n} {len(lb.edges)}"]
    out += [f"{u} {v}" for u, v in lb.edges]
    out.append(f"LB {lb.source} {lb.sink} {lb.bound}")
    return "\n".join(out)
