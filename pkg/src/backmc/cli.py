"""Command-line driver.

Exit codes: 0 success, 2 parameter error, 3 input/format error,
4 estimator refusal (isolated target).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import GraphFormatError, IsolatedTargetError, ParameterError
from .estimators import EstimatorConfig, backmc, backward_push, mc_global, setpush
from .graph import (
    ErParams,
    HardInstanceParams,
    generate_er,
    generate_hard_instance,
    graph_stats,
    load_edge_list,
    write_edge_list,
)
from .ground_truth import pagerank_power
from .harness import (
    ExperimentSpec,
    records_to_csv,
    run_experiment,
    summarize,
    validate_hard_family,
)
from .oracle import GraphOracle, spawn_seed

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_FORMAT = 3
EXIT_REFUSED = 4


def _load_graph(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return load_edge_list(fh)


def _cmd_gen_er(args) -> int:
    g = generate_er(ErParams(n=args.n, edge_prob=args.edge_prob, seed=args.seed))
    Path(args.out).write_text(write_edge_list(g), encoding="utf-8")
    print(f"wrote {args.out}: n={g.num_nodes} m={g.num_edges}")
    return EXIT_OK


def _cmd_gen_hard(args) -> int:
    params = HardInstanceParams(
        level=args.level,
        max_level=args.max_level,
        group_size=args.group_size,
        hub_count=args.hub_count,
        pad_to_n=args.pad_to_n,
        seed=args.seed,
    )
    g, target = generate_hard_instance(params)
    Path(args.out).write_text(write_edge_list(g), encoding="utf-8")
    print(target)
    return EXIT_OK


def _cmd_ground_truth(args) -> int:
    g = _load_graph(args.graph)
    truth = pagerank_power(g, args.alpha)
    lines = ["node,score"]
    lines += [f"{u},{format(s, '.17g')}" for u, s in enumerate(truth.values)]
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.out}: {g.num_nodes} scores, {truth.iterations} iterations")
    return EXIT_OK


def _cmd_estimate(args) -> int:
    g = _load_graph(args.graph)
    stats = graph_stats(g)
    oracle = GraphOracle(g, seed=spawn_seed(args.seed, 0))
    cfg = EstimatorConfig(
        alpha=args.alpha,
        c=args.c,
        p_f=args.pf,
        seed=spawn_seed(args.seed, 1),
        mode=args.mode,
    )
    if args.algo == "backmc":
        est = backmc(oracle, args.target, cfg, stats)
    elif args.algo == "mc":
        est = mc_global(oracle, args.target, cfg)
    elif args.algo == "backwardpush":
        r_max = args.rmax if args.rmax is not None else args.c * args.alpha / g.num_nodes
        est, _ = backward_push(oracle, args.target, args.alpha, r_max)
    elif args.algo == "setpush":
        est = setpush(oracle, args.target, cfg, stats)
    else:  # unreachable; argparse restricts choices
        raise ParameterError(args.algo)
    c = est.counters
    print(f"estimate={format(est.value, '.17g')}")
    print(f"deg_calls={c.deg_calls}")
    print(f"neigh_calls={c.neigh_calls}")
    print(f"jump_calls={c.jump_calls}")
    print(f"total_queries={c.total}")
    print(f"walks={est.walks}")
    print(f"moves={est.moves}")
    print(f"elapsed_s={est.elapsed:.6f}")
    if est.budget_exhausted:
        print("budget_exhausted=true")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    spec = ExperimentSpec(
        graph_source=args.graph,
        algorithms=args.algos.split(","),
        alpha=args.alpha,
        c_grid=[float(x) for x in args.c_grid.split(",")],
        p_f=args.pf,
        target_mode=args.target_mode,
        num_targets=args.targets,
        trials_per_target=args.trials,
        master_seed=args.seed,
    )
    records = run_experiment(spec, workers=args.workers)
    Path(args.out).write_text(records_to_csv(records), encoding="utf-8")
    print(f"wrote {args.out}: {len(records)} records")
    for row in summarize(records):
        print(
            f"algo={row.algo} c={row.c:g} trials={row.trials} failed={row.failed} "
            f"mean_rel_error={row.mean_rel_error:.6g} "
            f"mean_total_queries={row.mean_total_queries:.6g} "
            f"mean_wall_time_ms={row.mean_wall_time_ns / 1e6:.3f}"
        )
    return EXIT_OK


def _cmd_validate_hard(args) -> int:
    report = validate_hard_family(
        group_size=args.group_size,
        hub_count=args.hub_count,
        pad_to_n=args.pad_to_n,
        max_level=args.max_level,
        alpha=args.alpha,
        seed=args.seed,
    )
    for i, level in enumerate(report.levels):
        line = (
            f"level={level} target={report.targets[i]} "
            f"d_t={report.target_degrees[i]} score={format(report.scores[i], '.17g')}"
        )
        if i > 0:
            line += f" ratio={report.ratios[i - 1]:.6f}"
        print(line)
    print(f"min_ratio_gap={report.min_ratio_gap:.6f} separated={report.separated}")
    return EXIT_OK if report.separated else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="backmc",
        description="Local PageRank estimation on undirected graphs: generators, "
        "ground truth, estimators, and the experiment harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-er", help="generate an Erdos-Renyi graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--edge-prob", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_er)

    p = sub.add_parser("gen-hard", help="generate one adversarial instance; prints the target id")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--max-level", type=int, required=True)
    p.add_argument("--group-size", type=int, required=True)
    p.add_argument("--hub-count", type=int, required=True)
    p.add_argument("--pad-to-n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_hard)

    p = sub.add_parser("ground-truth", help="power-iteration PageRank to CSV (node,score)")
    p.add_argument("--graph", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ground_truth)

    p = sub.add_parser("estimate", help="run one estimator on one target")
    p.add_argument("--graph", required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--algo", choices=["backmc", "mc", "backwardpush", "setpush"], required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--pf", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=["fixed", "adaptive"], default="fixed")
    p.add_argument("--rmax", type=float, default=None)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("experiment", help="run a trial grid and write a CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--algos", required=True, help="comma-separated subset of backmc,mc,backwardpush,setpush")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c-grid", required=True, help="comma-separated c values")
    p.add_argument("--pf", type=float, required=True)
    p.add_argument("--targets", type=int, required=True)
    p.add_argument("--target-mode", choices=["uniform", "degree"], required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("validate-hard", help="ground-truth separation of the adversarial family")
    p.add_argument("--max-level", type=int, required=True)
    p.add_argument("--group-size", type=int, required=True)
    p.add_argument("--hub-count", type=int, required=True)
    p.add_argument("--pad-to-n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_validate_hard)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except GraphFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except IsolatedTargetError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
