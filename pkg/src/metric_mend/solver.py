"""Deficit-layered greedy cover solver and its counting primitives.

The solver repeatedly computes the current maximum cycle deficit, counts for
every edge how many maximum-deficit unbalanced cycles it lies on (as top edge
and/or as non-top edge, both answerable from shortest-path distances and
counts alone), removes the edge with the largest count from the working
graph, and stops when no unbalanced cycle remains.  The removed edges form a
regular cover (full variant) or a non-top cover (increase-only variant) of
the original graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import (
    CoverKind,
    DistanceTables,
    Edge,
    Graph,
    InternalConsistencyError,
    Weight,
    all_pairs_shortest_paths,
    canonical_edge,
    graph_deficit,
    validate_cover,
)


class ProblemKind(Enum):
    """Which weight edits are allowed when turning the graph metric."""

    GMVD = "gmvd"      # arbitrary changes; needs a regular cover
    GMVID = "gmvid"    # increases only; needs a non-top cover
    GMVDD = "gmvdd"    # decreases only; exactly solvable

    @property
    def cover_kind(self) -> CoverKind:
        return {ProblemKind.GMVD: CoverKind.REGULAR,
                ProblemKind.GMVID: CoverKind.NONTOP,
                ProblemKind.GMVDD: CoverKind.TOP}[self]


class Role(Enum):
    INCREASE = "increase"
    DECREASE = "decrease"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class CoverSolution:
    """An ordered cover with per-edge roles and the deficit layers encountered."""

    kind: ProblemKind
    edges: tuple[Edge, ...]
    roles: tuple[Role, ...]
    layer_deficits: tuple[Weight, ...]

    def __post_init__(self):
        if len(self.edges) != len(set(self.edges)):
            raise ValueError("solution edges must be distinct")
        if len(self.roles) != len(self.edges):
            raise ValueError("one role per edge required")
        if any(a <= b for a, b in zip(self.layer_deficits, self.layer_deficits[1:])):
            raise ValueError("layer deficits must be strictly decreasing")

    @property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @property
    def size(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class CountReport:
    """Per-edge occurrence counts in maximum-deficit unbalanced cycles."""

    edge: Edge
    n_top: int
    n_nontop: int
    count: int


def count_top(g: Graph, tables: DistanceTables, delta: Weight, edge: Edge) -> int:
    """Number of deficit-``delta`` unbalanced cycles whose top edge is ``edge``.

    Valid only at delta = current maximum deficit: such a cycle must close its
    top edge with a shortest path, so the count is the shortest-path count
    when w(e) = d(s, t) + delta and zero otherwise.
    """
    s, t = canonical_edge(*edge)
    if g.weight(s, t) == tables.dist(s, t) + delta:
        return tables.spcount(s, t)
    return 0


def count_nontop(g: Graph, tables: DistanceTables, delta: Weight, edge: Edge) -> int:
    """Number of deficit-``delta`` unbalanced cycles containing ``edge`` as non-top.

    Scans candidate top edges f = (a, b).  A maximum-deficit cycle through
    both f and e = (s, t) consists of f plus shortest paths a-s and t-b (or
    b-s and t-a), so each orientation contributes the product of the two
    shortest-path counts whenever the exact length equation holds.  With
    exact arithmetic the two orientation equations are mutually exclusive on
    the degenerate shared-endpoint configurations, so nothing is double
    counted.
    """
    s, t = canonical_edge(*edge)
    w_e = g.weight(s, t)
    total = 0
    for (a, b), w_f in g.edge_items():
        if (a, b) == (s, t):
            continue
        if w_f == tables.dist(a, s) + w_e + tables.dist(t, b) + delta:
            total += tables.spcount(a, s) * tables.spcount(t, b)
        if w_f == tables.dist(b, s) + w_e + tables.dist(t, a) + delta:
            total += tables.spcount(b, s) * tables.spcount(t, a)
    return total


def count_report(g: Graph, tables: DistanceTables, delta: Weight,
                 kind: ProblemKind) -> dict[Edge, CountReport]:
    """Counts for every edge; the greedy score is n_top + n_nontop for the
    full problem and n_nontop alone for the increase-only problem."""
    if delta <= 0:
        raise ValueError("counts are defined for positive deficit only")
    reports = {}
    for e in g.edges():
        n_top = count_top(g, tables, delta, e)
        n_nontop = count_nontop(g, tables, delta, e)
        score = n_nontop if kind is ProblemKind.GMVID else n_top + n_nontop
        reports[e] = CountReport(edge=e, n_top=n_top, n_nontop=n_nontop, count=score)
    return reports


def greedy_solve(g: Graph, kind: ProblemKind) -> CoverSolution:
    """Greedy cover construction, one maximum-count edge per round.

    Each round recomputes distances and shortest-path counts on the working
    graph, evaluates every edge's count at the current maximum deficit,
    removes the argmax (ties: lexicographically smallest edge), and repeats
    until the deficit reaches zero.  The result is verified as a cover of the
    requested kind on the original graph before returning.
    """
    if kind not in (ProblemKind.GMVD, ProblemKind.GMVID):
        raise ValueError("greedy_solve handles the GMVD and GMVID problems")
    work = g
    selected: list[Edge] = []
    layers: list[Weight] = []
    for _ in range(g.m + 1):
        tables = all_pairs_shortest_paths(work)
        delta = graph_deficit(work, tables)
        if delta == 0:
            break
        if not layers or delta != layers[-1]:
            layers.append(delta)
        reports = count_report(work, tables, delta, kind)
        best: Edge | None = None
        best_count = 0
        for e in work.edges():
            c = reports[e].count
            if c > best_count:
                best, best_count = e, c
        if best is None:
            raise InternalConsistencyError(
                "positive deficit but all edge counts are zero")
        selected.append(best)
        work = work.without_edge(best)
    else:
        raise InternalConsistencyError("cover loop failed to terminate")

    if validate_cover(g, selected, kind.cover_kind) is not None:
        raise InternalConsistencyError("greedy result is not a valid cover")
    role = Role.INCREASE if kind is ProblemKind.GMVID else Role.UNASSIGNED
    return CoverSolution(kind=kind, edges=tuple(selected),
                         roles=(role,) * len(selected),
                         layer_deficits=tuple(layers))


def solve_decrease_only(g: Graph, tables: DistanceTables) -> frozenset[Edge]:
    """Exact optimum for the decrease-only problem: the edges heavier than
    their endpoints' shortest-path distance."""
    return frozenset((u, v) for (u, v), w in g.edge_items() if w > tables.dist(u, v))
