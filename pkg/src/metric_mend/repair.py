"""Turn a validated cover into an actual metric graph.

A regular cover is first partitioned into increase-only and decrease-only
halves; the adjustment loop then repeatedly picks an unbalanced cycle and
applies a safe weight move on one of its covered edges until no unbalanced
cycle remains.  A move is safe when it creates no unbalanced cycle that
escapes the (decrease half as top cover, increase half as non-top cover)
pair, which `find_uncovered_cycle` decides exactly.  Instead of unit steps,
each move jumps as far as one safety bound certifies, which keeps the number
of rounds small without changing the contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .core import (
    CoverKind,
    CycleWitness,
    Edge,
    Graph,
    INFINITY,
    InternalConsistencyError,
    Weight,
    canonical_edge,
    dijkstra,
    find_uncovered_cycle,
    format_weight,
    is_metric,
    validate_cover,
)
from .solver import ProblemKind


class CoverInvalidError(ValueError):
    """The supplied edge set is not a cover of the required kind."""

    def __init__(self, message: str, witness: CycleWitness | None = None):
        super().__init__(message if witness is None else f"{message}: {witness}")
        self.witness = witness


@dataclass(frozen=True)
class SplitCover:
    """A regular cover partitioned into increase-only and decrease-only halves."""

    s_plus: frozenset[Edge]
    s_minus: frozenset[Edge]

    def __post_init__(self):
        if self.s_plus & self.s_minus:
            raise ValueError("increase and decrease halves must be disjoint")

    @property
    def edges(self) -> frozenset[Edge]:
        return self.s_plus | self.s_minus


@dataclass(frozen=True)
class RepairOutcome:
    """Repaired graph plus the per-edge weight changes and the move count."""

    graph: Graph
    changed: Mapping[Edge, tuple[Weight, Weight]]
    steps: int


def split_cover(g: Graph, cover: Iterable[Edge]) -> SplitCover:
    """Partition a regular cover so every unbalanced cycle is non-top covered
    by the plus half or top covered by the minus half.

    Edges are assigned one at a time: candidate b goes to the plus half if
    that keeps every unbalanced cycle covered with the still-unassigned edges
    counted on both sides, otherwise to the minus half under the symmetric
    test.  One of the two cases always holds for a valid regular cover; both
    failing would contradict the split guarantee and raises.
    """
    cover_set = frozenset(canonical_edge(*e) for e in cover)
    witness = validate_cover(g, cover_set, CoverKind.REGULAR)
    if witness is not None:
        raise CoverInvalidError("not a regular cover", witness)
    s_plus: set[Edge] = set()
    s_minus: set[Edge] = set()
    remaining = set(cover_set)
    for b in sorted(cover_set):
        remaining.discard(b)
        rest = frozenset(remaining)
        if find_uncovered_cycle(g, frozenset(s_minus) | rest,
                                frozenset(s_plus) | {b} | rest) is None:
            s_plus.add(b)
        elif find_uncovered_cycle(g, frozenset(s_minus) | {b} | rest,
                                  frozenset(s_plus) | rest) is None:
            s_minus.add(b)
        else:
            raise InternalConsistencyError(
                f"edge {b} fits neither half of the split")
    return SplitCover(s_plus=frozenset(s_plus), s_minus=frozenset(s_minus))


def _integer_scale(g: Graph, scale_hint: int | None) -> int:
    if scale_hint is not None:
        if scale_hint < 1:
            raise ValueError("scale_hint must be a positive integer")
        for (u, v), w in g.edge_items():
            if (w * scale_hint).denominator != 1:
                raise ValueError(
                    f"scale_hint {scale_hint} does not clear edge ({u},{v}) weight {w}")
        return scale_hint
    return math.lcm(*(w.denominator for _, w in g.edge_items())) if g.m else 1


def repair_weights(g: Graph, cover, kind: ProblemKind,
                   scale_hint: int | None = None, *,
                   unit_steps: bool = False) -> RepairOutcome:
    """Adjust cover-edge weights until the graph is metric.

    For the increase-only problem ``cover`` is any non-top cover (an edge
    iterable); for the full problem it must be a :class:`SplitCover`.  Weights
    are scaled to integers by the least common denominator (``scale_hint``
    may pre-supply a valid multiplier), moves never push a weight above the
    original maximum L or below 0, and the loop stops at the first metric
    state rather than driving the cover to the extremes.

    By default each move jumps as far as its safety bound certifies;
    ``unit_steps`` restricts every move to a single scaled unit, which is
    slower but mirrors the existence argument step for step.
    """
    if kind is ProblemKind.GMVID:
        if isinstance(cover, SplitCover):
            if cover.s_minus:
                raise ValueError("increase-only repair cannot take a decrease half")
            s_plus, s_minus = cover.s_plus, frozenset()
        else:
            s_plus = frozenset(canonical_edge(*e) for e in cover)
            s_minus = frozenset()
        witness = validate_cover(g, s_plus, CoverKind.NONTOP)
        if witness is not None:
            raise CoverInvalidError("not a non-top cover", witness)
    elif kind is ProblemKind.GMVD:
        if not isinstance(cover, SplitCover):
            raise TypeError("full repair requires a SplitCover; run split_cover first")
        s_plus, s_minus = cover.s_plus, cover.s_minus
        witness = find_uncovered_cycle(g, s_minus, s_plus)
        if witness is not None:
            raise CoverInvalidError("split cover leaves a cycle uncovered", witness)
    else:
        raise ValueError("repair handles the GMVD and GMVID problems")

    factor = _integer_scale(g, scale_hint)
    work = g.scaled(factor)
    cap = max((w for _, w in work.edge_items()), default=Fraction(0))  # no move may exceed this
    max_moves = (len(s_plus) + len(s_minus)) * int(cap) + 1
    steps = 0

    for _ in range(max_moves):
        witness = find_uncovered_cycle(work, frozenset(), frozenset())
        if witness is None:
            break
        moved = _apply_safe_move(work, witness, s_plus, s_minus, unit_steps)
        if moved is None:
            raise InternalConsistencyError(
                f"no safe move on witness cycle {witness}")
        work = moved
        steps += 1
    else:
        raise InternalConsistencyError("repair exceeded its move budget")

    changed = {}
    final_items = []
    for (u, v), w in work.edge_items():
        restored = w / factor
        final_items.append((u, v, restored))
        if restored != g.weight(u, v):
            changed[(u, v)] = (g.weight(u, v), restored)
    return RepairOutcome(graph=Graph(g.n, final_items, allow_zero=True),
                         changed=changed, steps=steps)


def _apply_safe_move(work: Graph, witness: CycleWitness, s_plus: frozenset[Edge],
                     s_minus: frozenset[Edge], unit_steps: bool) -> Graph | None:
    """One committed move on the witness cycle, or None if no candidate is safe."""
    deficit = witness.deficit

    for f in sorted(set(witness.nontop) & s_plus):
        w_f = work.weight(*f)
        # raising f is safe up to the shortest f-endpoint path that avoids the
        # increase half entirely: only cycles topped by f can become unbalanced,
        # and those are escape cycles exactly when such a shorter path exists.
        dist, _ = dijkstra(work, f[0], skip_edges=s_plus)
        limit = dist[f[1]]
        if limit >= w_f + 1:
            if unit_steps:
                return work.with_weight(f, w_f + 1)
            target = w_f + deficit
            if limit != INFINITY and limit < target:
                target = limit
            return work.with_weight(f, target)

    t = witness.top
    if t in s_minus:
        w_t = work.weight(*t)

        def safe(value: Weight) -> bool:
            trial = work.with_weight(t, value)
            return find_uncovered_cycle(trial, s_minus, s_plus) is None

        if safe(w_t - 1):
            if unit_steps:
                return work.with_weight(t, w_t - 1)
            lo = w_t - deficit  # balances the witness cycle; never below 0
            hi = w_t - 1
            while lo < hi:  # smallest safe value; safety is monotone upward
                mid = (lo + hi) // 2
                if safe(mid):
                    hi = mid
                else:
                    lo = mid + 1
            return work.with_weight(t, lo)
    return None


@dataclass(frozen=True)
class LiftResult:
    """Outcome of lifting zero-weight edges back to positive values."""

    graph: Graph
    lifted: Mapping[Edge, Weight]
    unresolved: frozenset[Edge]


def lift_zero_edges(g: Graph) -> LiftResult:
    """Raise zero-weight edges of a metric graph to positive values.

    Each zero edge is set to the shortest-path distance between its endpoints
    over the remaining edges whenever that distance is positive and finite;
    matching an existing path's weight cannot create an unbalanced cycle.
    Passes repeat until stable, since one lift can make another possible.
    Edges with no positive alternative path are reported, not hidden.
    """
    if not is_metric(g):
        raise ValueError("lift_zero_edges expects a metric graph")
    work = g
    lifted: dict[Edge, Weight] = {}
    while True:
        progressed = False
        for e in work.edges():
            if work.weight(*e) != 0:
                continue
            dist, _ = dijkstra(work, e[0], skip_edges=frozenset({e}))
            alt = dist[e[1]]
            if alt != INFINITY and alt > 0:
                work = work.with_weight(e, alt)
                lifted[e] = alt
                progressed = True
        if not progressed:
            break
    unresolved = frozenset(e for e in work.edges() if work.weight(*e) == 0)
    return LiftResult(graph=work, lifted=lifted, unresolved=unresolved)


def export_lp(g: Graph, cover: Iterable[Edge], kind: ProblemKind) -> str:
    """Emit the weight-feasibility linear program as deterministic text.

    Variables a_<i>_<j> (i < j) cover all vertex pairs.  Edges outside the
    cover are fixed to their weight; free pairs get a lower bound of 0, or of
    the current weight for cover edges in the increase-only variant.  Every
    triangle inequality over distinct triples appears once per orientation.
    The program is a pure feasibility check (objective: minimize 0), printed
    with exact rationals.
    """
    if kind not in (ProblemKind.GMVD, ProblemKind.GMVID):
        raise ValueError("the feasibility program covers the GMVD and GMVID problems")
    s = frozenset(canonical_edge(*e) for e in cover)
    for e in s:
        if not g.has_edge(*e):
            raise ValueError(f"cover contains non-edge {e}")

    def var(i: int, j: int) -> str:
        i, j = canonical_edge(i, j)
        return f"a_{i}_{j}"

    lines = ["minimize 0", "subject to"]
    for i in range(g.n):
        for j in range(i + 1, g.n):
            for k in range(j + 1, g.n):
                for (x, y), (p, q), (r, t) in (((i, j), (i, k), (j, k)),
                                               ((i, k), (i, j), (j, k)),
                                               ((j, k), (i, j), (i, k))):
                    lines.append(
                        f"tri_{x}_{y}_via_{(set((i, j, k)) - {x, y}).pop()}:"
                        f" {var(x, y)} - {var(*(p, q))} - {var(*(r, t))} <= 0")
    lines.append("bounds")
    for i in range(g.n):
        for j in range(i + 1, g.n):
            pair = (i, j)
            if g.has_edge(i, j) and pair not in s:
                lines.append(f"{var(i, j)} = {format_weight(g.weight(i, j))}")
            elif kind is ProblemKind.GMVID and pair in s:
                lines.append(f"{var(i, j)} >= {format_weight(g.weight(i, j))}")
            else:
                lines.append(f"{var(i, j)} >= 0")
    lines.append("end")
    return "\n".join(lines) + "\n"
