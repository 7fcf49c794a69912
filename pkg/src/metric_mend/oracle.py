"""Exponential-time ground truth for small instances.

Exhaustive unbalanced-cycle enumeration, brute-force minimum covers, and
brute-force minimum multicut / length-bounded cut.  Everything here is the
independent second route against which the polynomial machinery is verified;
none of it consults the fast counting or checking code paths, except that
the cover search uses the polynomial `validate_cover` as its per-subset
feasibility test.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import (
    CoverKind,
    CycleWitness,
    Edge,
    Graph,
    Weight,
    canonical_edge,
    validate_cover,
)

_ENV_BUDGET = "METRIC_MEND_BUDGET"
DEFAULT_BUDGET = 5_000_000


class BudgetExceededError(RuntimeError):
    """The configured work budget ran out before the search finished."""


@dataclass
class WorkBudget:
    """Simple decrementing work counter shared by the exhaustive searches."""

    limit: int
    used: int = 0

    def charge(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceededError(f"work budget of {self.limit} exhausted")


def default_budget() -> WorkBudget:
    limit = int(os.environ.get(_ENV_BUDGET, DEFAULT_BUDGET))
    return WorkBudget(limit)


@dataclass(frozen=True)
class CycleInventory:
    """Every unbalanced simple cycle of a graph, plus the distinct deficits."""

    cycles: tuple[CycleWitness, ...]
    distinct_deficits: tuple[Weight, ...]

    @property
    def max_deficit(self) -> Weight:
        return self.distinct_deficits[-1] if self.distinct_deficits else Fraction(0)

    def __len__(self) -> int:
        return len(self.cycles)


def _witness_from_cycle(g: Graph, vertices: list[int]) -> CycleWitness | None:
    # vertices is the cyclic order; edges[i] joins vertices[i] and vertices[i+1 mod k]
    k = len(vertices)
    cycle_edges = [canonical_edge(vertices[i], vertices[(i + 1) % k]) for i in range(k)]
    weights = [g.weight(*e) for e in cycle_edges]
    total = sum(weights)
    # largest weight wins; ties (only possible in balanced cycles) break by edge order
    top_idx = 0
    for i in range(1, k):
        if weights[i] > weights[top_idx] or (
                weights[i] == weights[top_idx] and cycle_edges[i] < cycle_edges[top_idx]):
            top_idx = i
    deficit = weights[top_idx] - (total - weights[top_idx])
    if deficit <= 0:
        return None
    nontop = tuple(cycle_edges[top_idx + 1:] + cycle_edges[:top_idx])
    return CycleWitness(top=cycle_edges[top_idx], nontop=nontop, deficit=deficit)


def enumerate_unbalanced_cycles(g: Graph, max_len: int | None = None,
                                budget: WorkBudget | None = None) -> CycleInventory:
    """Enumerate every simple cycle with positive deficit, each exactly once.

    Canonical traversal: the root is the cycle's smallest vertex and the
    direction is fixed by requiring the second vertex to be smaller than the
    last.  Intended for small n; the budget counts DFS extensions and fails
    fast on oversized inputs.
    """
    if budget is None:
        budget = default_budget()
    cap = max_len if max_len is not None else g.n
    found: list[CycleWitness] = []
    path: list[int] = []
    on_path = [False] * g.n

    def extend(root: int, u: int) -> None:
        for v, _ in g.neighbors(u):
            budget.charge()
            if v == root and len(path) >= 3 and path[1] < path[-1]:
                witness = _witness_from_cycle(g, path)
                if witness is not None:
                    found.append(witness)
                continue
            if v <= root or on_path[v] or len(path) >= cap:
                continue
            path.append(v)
            on_path[v] = True
            extend(root, v)
            path.pop()
            on_path[v] = False

    for root in range(g.n):
        path = [root]
        on_path[root] = True
        extend(root, root)
        on_path[root] = False

    found.sort(key=lambda w: (w.top, w.nontop))
    deficits = tuple(sorted({w.deficit for w in found}))
    return CycleInventory(cycles=tuple(found), distinct_deficits=deficits)


def brute_count(g: Graph, delta: Weight, edge: Edge, role: str,
                budget: WorkBudget | None = None,
                inventory: CycleInventory | None = None) -> int:
    """Count deficit-``delta`` unbalanced cycles in which ``edge`` plays ``role``.

    ``role`` is "top" or "nontop"; counting is a filter over the exhaustive
    inventory, nothing cleverer.  A precomputed inventory for the same graph
    may be passed to avoid re-enumeration across many queries.
    """
    if role not in ("top", "nontop"):
        raise ValueError(f"role must be 'top' or 'nontop', got {role!r}")
    e = canonical_edge(*edge)
    if inventory is None:
        inventory = enumerate_unbalanced_cycles(g, budget=budget)
    if role == "top":
        return sum(1 for c in inventory.cycles if c.deficit == delta and c.top == e)
    return sum(1 for c in inventory.cycles if c.deficit == delta and e in c.nontop)


def exact_min_cover(g: Graph, kind: CoverKind, budget: WorkBudget | None = None):
    """Minimum-cardinality cover by subset search, lexicographically first.

    Candidate edges are restricted to those that can actually hit a cycle set
    of the requested kind (a minimum cover never contains a useless edge);
    feasibility of each subset is decided by the polynomial `validate_cover`.
    """
    from .solver import CoverSolution, ProblemKind, Role

    if kind is CoverKind.REGULAR:
        problem, role = ProblemKind.GMVD, Role.UNASSIGNED
    elif kind is CoverKind.NONTOP:
        problem, role = ProblemKind.GMVID, Role.INCREASE
    else:
        raise ValueError("exact_min_cover supports regular and nontop covers")
    if budget is None:
        budget = default_budget()
    inventory = enumerate_unbalanced_cycles(g, budget=budget)
    if kind is CoverKind.REGULAR:
        candidates = sorted({e for c in inventory.cycles for e in c.edges})
    else:
        candidates = sorted({e for c in inventory.cycles for e in c.nontop})
    for k in range(len(candidates) + 1):
        for combo in combinations(candidates, k):
            budget.charge()
            if validate_cover(g, combo, kind) is None:
                return CoverSolution(kind=problem, edges=combo,
                                     roles=(role,) * k, layer_deficits=())
    raise BudgetExceededError("subset search exhausted candidates without a cover")


# ---------------------------------------------------------------------------
# Brute-force source-problem optima for the reduction cross-checks


def _components_after_removal(n: int, edges: list[Edge], removed: frozenset[Edge]) -> list[int]:
    comp = list(range(n))
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if (u, v) not in removed:
            adj[u].append(v)
            adj[v].append(u)
    seen = [False] * n
    for s in range(n):
        if seen[s]:
            continue
        queue = deque([s])
        seen[s] = True
        while queue:
            u = queue.popleft()
            comp[u] = s
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
    return comp


def brute_multicut(n: int, edges: list[Edge], demands: list[tuple[int, int]],
                   budget: WorkBudget | None = None) -> frozenset[Edge]:
    """Minimum edge set disconnecting all demand pairs, by subset search."""
    if budget is None:
        budget = default_budget()
    edges = sorted(canonical_edge(*e) for e in edges)
    for k in range(len(edges) + 1):
        for combo in combinations(edges, k):
            budget.charge()
            removed = frozenset(combo)
            comp = _components_after_removal(n, edges, removed)
            if all(comp[s] != comp[t] for s, t in demands):
                return removed
    raise BudgetExceededError("multicut subset search exhausted")


def _hop_distance(n: int, edges: list[Edge], removed: frozenset[Edge], s: int, t: int) -> float:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if (u, v) not in removed:
            adj[u].append(v)
            adj[v].append(u)
    dist = [-1] * n
    dist[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            return dist[t]
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return float("inf")


def brute_lbcut(n: int, edges: list[Edge], source: int, sink: int, bound: int,
                budget: WorkBudget | None = None) -> frozenset[Edge]:
    """Minimum edge set destroying every source-sink path of length <= bound."""
    if budget is None:
        budget = default_budget()
    edges = sorted(canonical_edge(*e) for e in edges)
    for k in range(len(edges) + 1):
        for combo in combinations(edges, k):
            budget.charge()
            removed = frozenset(combo)
            if _hop_distance(n, edges, removed, source, sink) > bound:
                return removed
    raise BudgetExceededError("lb-cut subset search exhausted")
