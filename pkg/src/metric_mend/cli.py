"""Command-line front end: solve, check, reduce, generate, oracle, bench.

Every command re-verifies its own output before reporting success, and
reports are emitted either as human-readable text or as JSON (``--format
machine``).  Exit codes: 0 verified success, 1 negative verdict, 2 input
error, 3 internal inconsistency (a mathematically guaranteed invariant failed).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import reductions
from .core import (
    CoverKind,
    Edge,
    Graph,
    InstanceFormatError,
    InternalConsistencyError,
    _significant_lines,
    all_pairs_shortest_paths,
    canonical_edge,
    format_weight,
    graph_deficit,
    is_metric,
    parse_instance,
    serialize_instance,
    validate_cover,
)
from .oracle import (
    BudgetExceededError,
    WorkBudget,
    brute_lbcut,
    brute_multicut,
    default_budget,
    enumerate_unbalanced_cycles,
    exact_min_cover,
)
from .repair import lift_zero_edges, repair_weights, split_cover
from .solver import ProblemKind, Role, greedy_solve, solve_decrease_only

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def parse_cover_file(text: str) -> list[Edge]:
    """Cover files list one edge 'u v' per line; '#' starts a comment."""
    edges: list[Edge] = []
    for lineno, line in _significant_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise InstanceFormatError(f"expected 'u v', got {line!r}", lineno)
        try:
            edges.append(canonical_edge(int(parts[0]), int(parts[1])))
        except ValueError:
            raise InstanceFormatError(f"expected 'u v', got {line!r}", lineno) from None
    return edges


def _edge_json(e: Edge) -> list[int]:
    return [e[0], e[1]]


def _emit(report: dict, fmt: str) -> None:
    if fmt == "machine":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        _emit_text(report)


def _emit_text(report: dict, indent: str = "") -> None:
    for key, value in report.items():
        if isinstance(value, dict):
            print(f"{indent}{key}:")
            _emit_text(value, indent + "  ")
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{indent}{key}:")
            for item in value:
                print(f"{indent}  {json.dumps(item, sort_keys=True)}")
        else:
            print(f"{indent}{key}: {value}")


def _instance_summary(g: Graph, path: str | None = None) -> dict:
    tables = all_pairs_shortest_paths(g, counts=False)
    deficit = graph_deficit(g, tables)
    summary = {
        "n": g.n,
        "m": g.m,
        "deficit": format_weight(deficit),
        "metric": deficit == 0,
    }
    if path is not None:
        summary["path"] = path
    return summary


def _verify_solution(g: Graph, kind: ProblemKind, edges,
                     adjusted: Graph | None, final: Graph | None,
                     roles_by_edge: dict[Edge, Role]) -> dict:
    """Recompute every verdict from the outputs themselves.

    The weight-edit contract (only cover edges move, per-role monotonicity,
    nothing above the original maximum or below zero) is judged on the
    adjusted graph, before zero-weight edges are lifted back to positive
    values; the metric property is judged on the final graph.
    """
    verdicts: dict[str, object] = {
        "cover_valid": validate_cover(g, edges, kind.cover_kind) is None,
    }
    if adjusted is not None:
        cover = frozenset(edges)
        cap = max((w for _, w in g.edge_items()), default=Fraction(0))
        only_cover = monotone = bounded = True
        for (u, v), w_new in adjusted.edge_items():
            w_old = g.weight(u, v)
            if w_new == w_old:
                continue
            if (u, v) not in cover:
                only_cover = False
            if not 0 <= w_new <= cap:
                bounded = False
            role = roles_by_edge.get((u, v), Role.UNASSIGNED)
            if role is Role.INCREASE and w_new < w_old:
                monotone = False
            if role is Role.DECREASE and w_new > w_old:
                monotone = False
            if role is Role.UNASSIGNED:
                monotone = False
        verdicts.update({
            "only_cover_edges_changed": only_cover,
            "roles_monotone": monotone,
            "bounds_respected": bounded,
            "repaired_metric": is_metric(final if final is not None else adjusted),
        })
    verdicts["all_ok"] = all(v for v in verdicts.values())
    return verdicts


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    g = parse_instance(_read_text(args.instance))
    kind = ProblemKind(args.kind)
    t1 = time.perf_counter()

    roles_by_edge: dict[Edge, Role] = {}
    layer_deficits: tuple = ()
    if kind is ProblemKind.GMVDD:
        tables = all_pairs_shortest_paths(g, counts=False)
        edges = tuple(sorted(solve_decrease_only(g, tables)))
        roles_by_edge = {e: Role.DECREASE for e in edges}
    else:
        solution = greedy_solve(g, kind)
        edges = solution.edges
        layer_deficits = solution.layer_deficits
        roles_by_edge = dict(zip(solution.edges, solution.roles))
    t2 = time.perf_counter()

    adjusted = final = None
    repair_info: dict | None = None
    if args.repair:
        if kind is ProblemKind.GMVDD:
            tables = all_pairs_shortest_paths(g, counts=False)
            cover = set(edges)
            adjusted = Graph(g.n, [(u, v, tables.dist(u, v) if (u, v) in cover else w)
                                   for (u, v), w in g.edge_items()])
            final = adjusted
            steps = len(edges)
            unresolved: list[Edge] = []
        else:
            if kind is ProblemKind.GMVD:
                split = split_cover(g, edges)
                for e in split.s_plus:
                    roles_by_edge[e] = Role.INCREASE
                for e in split.s_minus:
                    roles_by_edge[e] = Role.DECREASE
                outcome = repair_weights(g, split, kind)
            else:
                outcome = repair_weights(g, edges, kind)
            adjusted = outcome.graph
            lifted = lift_zero_edges(outcome.graph)
            final = lifted.graph
            steps = outcome.steps
            unresolved = sorted(lifted.unresolved)
        changed = {e: (g.weight(*e), final.weight(*e))
                   for e in g.edges() if final.weight(*e) != g.weight(*e)}
        repair_info = {
            "steps": steps,
            "changed": [[_edge_json(e), format_weight(old), format_weight(new)]
                        for e, (old, new) in sorted(changed.items())],
            "unresolved_zeros": [_edge_json(e) for e in unresolved],
        }
        if args.out:
            Path(args.out).write_text(serialize_instance(final) + "\n", encoding="utf-8")
            repair_info["output"] = args.out
    t3 = time.perf_counter()

    verification = _verify_solution(g, kind, edges, adjusted, final, roles_by_edge)
    t4 = time.perf_counter()

    report = {
        "command": "solve",
        "kind": kind.value,
        "instance": _instance_summary(g, args.instance),
        "solution": {
            "size": len(edges),
            "edges": [_edge_json(e) for e in edges],
            "roles": [roles_by_edge.get(e, Role.UNASSIGNED).value for e in edges],
            "layer_deficits": [format_weight(d) for d in layer_deficits],
        },
        "verification": verification,
        "timings": {
            "parse_s": t1 - t0,
            "solve_s": t2 - t1,
            "repair_s": t3 - t2,
            "verify_s": t4 - t3,
        },
    }
    if repair_info is not None:
        report["repair"] = repair_info
    _emit(report, args.format)
    return EXIT_OK if verification["all_ok"] else EXIT_INTERNAL


def cmd_check(args) -> int:
    g = parse_instance(_read_text(args.instance))
    cover = parse_cover_file(_read_text(args.cover))
    kind = CoverKind(args.cover_kind)
    witness = validate_cover(g, cover, kind)
    report = {
        "command": "check",
        "cover_kind": kind.value,
        "instance": _instance_summary(g, args.instance),
        "cover": [_edge_json(e) for e in sorted(set(cover))],
        "ok": witness is None,
    }
    if witness is not None:
        report["witness"] = {
            "top": _edge_json(witness.top),
            "nontop": [_edge_json(e) for e in witness.nontop],
            "deficit": format_weight(witness.deficit),
        }
    _emit(report, args.format)
    return EXIT_OK if witness is None else EXIT_VERDICT


def cmd_reduce(args) -> int:
    text = _read_text(args.source)
    budget = WorkBudget(args.oracle_budget) if args.oracle_budget else default_budget()

    if args.which == "multicut":
        mc = reductions.parse_multicut(text)
        artifact = reductions.multicut_to_gmvid(mc)

        def source_optimum() -> int:
            return len(brute_multicut(mc.n, list(mc.edges), list(mc.demands),
                                      budget=budget))
    elif args.which == "lbcut":
        lb = reductions.parse_lbcut(text)
        artifact = reductions.lbcut_to_gmvid(lb)

        def source_optimum() -> int:
            return len(brute_lbcut(lb.n, list(lb.edges), lb.source, lb.sink,
                                   lb.bound, budget=budget))
    else:
        g = parse_instance(text)
        artifact = reductions.gmvid_to_gmvd(g)

        def source_optimum() -> int:
            return exact_min_cover(g, CoverKind.NONTOP, budget=budget).size

    out_path = Path(args.out)
    out_path.write_text(serialize_instance(artifact.instance) + "\n", encoding="utf-8")
    sidecar = out_path.with_suffix(out_path.suffix + ".map.json")
    sidecar.write_text(json.dumps({
        "kind": artifact.kind.value,
        "back_map": sorted([_edge_json(e), _edge_json(s)]
                           for e, s in artifact.back_map.items()),
        "added_edges": [_edge_json(e) for e in sorted(artifact.added_edges)],
        "added_vertices": sorted(artifact.added_vertices),
    }, sort_keys=True, indent=2), encoding="utf-8")

    try:
        src = source_optimum()
        reduced = exact_min_cover(artifact.instance, artifact.kind.cover_kind,
                                  budget=budget).size
        verification: dict = {"checked": True, "source_optimum": src,
                              "reduced_optimum": reduced, "equal": src == reduced}
    except BudgetExceededError:
        verification = {"checked": False, "reason": "oracle budget exceeded"}

    report = {
        "command": "reduce",
        "which": args.which,
        "output": args.out,
        "back_map": str(sidecar),
        "instance": _instance_summary(artifact.instance),
        "verification": verification,
    }
    _emit(report, args.format)
    if verification.get("checked") and not verification.get("equal"):
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_generate(args) -> int:
    g = reductions.gen_random(args.n, args.density, args.weight_max,
                              args.violations, args.seed)
    if args.out:
        Path(args.out).write_text(serialize_instance(g) + "\n", encoding="utf-8")
    report = {
        "command": "generate",
        "seed": args.seed,
        "violations_requested": args.violations,
        "instance": _instance_summary(g, args.out),
    }
    if not args.out:
        report["instance_text"] = serialize_instance(g)
    _emit(report, args.format)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = parse_instance(_read_text(args.instance))
    budget = WorkBudget(args.oracle_budget) if args.oracle_budget else default_budget()
    report: dict = {"command": "oracle", "what": args.what,
                    "instance": _instance_summary(g, args.instance)}
    if args.what == "inventory":
        inventory = enumerate_unbalanced_cycles(g, budget=budget)
        report["inventory"] = {
            "unbalanced_cycles": len(inventory),
            "distinct_deficits": [format_weight(d) for d in inventory.distinct_deficits],
            "max_deficit": format_weight(inventory.max_deficit),
            "cycles": [{"top": _edge_json(c.top),
                        "nontop": [_edge_json(e) for e in c.nontop],
                        "deficit": format_weight(c.deficit)}
                       for c in inventory.cycles],
        }
    else:
        kind = CoverKind(args.cover_kind)
        solution = exact_min_cover(g, kind, budget=budget)
        report["min_cover"] = {
            "kind": kind.value,
            "size": solution.size,
            "edges": [_edge_json(e) for e in solution.edges],
        }
    _emit(report, args.format)
    return EXIT_OK


def cmd_bench(args) -> int:
    kind = ProblemKind(args.kind)
    trials = []
    for i in range(args.trials):
        trial_seed = args.seed * 100_003 + i
        g = reductions.gen_random(args.n, args.density, args.weight_max,
                                  args.violations, trial_seed)
        t0 = time.perf_counter()
        solution = greedy_solve(g, kind)
        solve_s = time.perf_counter() - t0
        verified = validate_cover(g, solution.edges, kind.cover_kind) is None
        row: dict = {
            "trial": i,
            "seed": trial_seed,
            "n": g.n,
            "m": g.m,
            "size": solution.size,
            "layers": len(solution.layer_deficits),
            "verified": verified,
            "solve_s": solve_s,
        }
        if args.repair:
            t0 = time.perf_counter()
            if kind is ProblemKind.GMVD:
                outcome = repair_weights(g, split_cover(g, solution.edges), kind)
            else:
                outcome = repair_weights(g, solution.edges, kind)
            lifted = lift_zero_edges(outcome.graph)
            row["repair_s"] = time.perf_counter() - t0
            row["repair_metric"] = is_metric(lifted.graph)
            row["verified"] = verified = verified and row["repair_metric"]
        budget = WorkBudget(args.oracle_budget) if args.oracle_budget else default_budget()
        try:
            opt = exact_min_cover(g, kind.cover_kind, budget=budget)
            row["opt"] = opt.size
            row["ratio"] = (solution.size / opt.size) if opt.size else 1.0
        except BudgetExceededError:
            row["opt"] = None
            row["ratio"] = None
        trials.append(row)

    ratios = [r["ratio"] for r in trials if r["ratio"] is not None]
    report = {
        "command": "bench",
        "kind": kind.value,
        "params": {"n": args.n, "density": args.density, "weight_max": args.weight_max,
                   "violations": args.violations, "trials": args.trials, "seed": args.seed},
        "trials": trials,
        "aggregate": {
            "verified": sum(1 for r in trials if r["verified"]),
            "with_opt": len(ratios),
            "max_ratio": max(ratios) if ratios else None,
            "mean_size": (sum(r["size"] for r in trials) / len(trials)) if trials else None,
        },
    }
    _emit(report, args.format)
    return EXIT_OK if all(r["verified"] for r in trials) else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metric-mend",
        description="Find and repair minimum sets of edge weights that keep a "
                    "graph from being its own metric completion.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default="text",
                        help="report style: human text or JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common],
                       help="run the greedy cover solver (exact for gmvdd)")
    p.add_argument("instance", help="instance file: 'n m' then 'u v w' lines")
    p.add_argument("--kind", choices=("gmvd", "gmvid", "gmvdd"), default="gmvd")
    p.add_argument("--repair", action="store_true",
                   help="also rewrite the cover edges' weights to reach a metric graph")
    p.add_argument("--out", help="write the repaired instance here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", parents=[common], help="validate a cover file")
    p.add_argument("instance")
    p.add_argument("cover", help="cover file: one 'u v' edge per line")
    p.add_argument("--cover-kind", choices=("regular", "nontop", "top"),
                   default="regular")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", parents=[common],
                       help="apply one of the constructive reductions")
    p.add_argument("which", choices=("multicut", "lbcut", "gmvid2gmvd"))
    p.add_argument("source", help="multicut: edge list + 'D k' demands; "
                                  "lbcut: edge list + 'LB s t L'; "
                                  "gmvid2gmvd: weighted instance file")
    p.add_argument("--out", required=True)
    p.add_argument("--oracle-budget", type=int, default=None,
                   help="work cap for the optimum cross-check")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("generate", parents=[common],
                       help="random metric instance with planted violations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--weight-max", type=int, default=10)
    p.add_argument("--violations", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("oracle", parents=[common],
                       help="exhaustive ground truth for small instances")
    p.add_argument("instance")
    p.add_argument("--what", choices=("inventory", "mincover"), default="inventory")
    p.add_argument("--cover-kind", choices=("regular", "nontop"), default="regular")
    p.add_argument("--oracle-budget", type=int, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", parents=[common],
                       help="generate, solve, and cross-check a family of instances")
    p.add_argument("--kind", choices=("gmvd", "gmvid"), default="gmvd")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--weight-max", type=int, default=10)
    p.add_argument("--violations", type=int, default=1)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repair", action="store_true")
    p.add_argument("--oracle-budget", type=int, default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InstanceFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalConsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
