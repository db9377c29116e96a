"""Experiment driver: target sampling, trials, CSV records, summaries.

A trial = (algorithm, target, accuracy c, repetition) run on a fresh
oracle whose randomness is an independent stream derived from the
experiment's master seed and the trial's coordinates.  Records are
emitted in canonical (algo, target, c, trial) order whether trials run
serially or on a worker pool, so experiment output is a pure function
of its spec.  Measured wall times are kept on the in-memory records and
reported by summaries, but written as 0 in CSV output to keep the file
byte-reproducible.
"""
from __future__ import annotations

import csv
import io
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from .errors import IsolatedTargetError, ParameterError
from .estimators import EstimatorConfig, backmc, backward_push, mc_global, setpush
from .graph import (
    ErParams,
    HardInstanceParams,
    UndirectedGraph,
    generate_er,
    generate_hard_instance,
    graph_stats,
    load_edge_list,
)
from .ground_truth import pagerank_power, relative_error
from .oracle import GraphOracle, spawn_seed

KNOWN_ALGORITHMS = ("backmc", "mc", "backwardpush", "setpush")

GraphSource = Union[str, Path, ErParams, HardInstanceParams, UndirectedGraph]


@dataclass
class ExperimentSpec:
    graph_source: GraphSource
    algorithms: Sequence[str]
    alpha: float
    c_grid: Sequence[float]
    p_f: float
    target_mode: str  # "uniform" | "degree"
    num_targets: int
    trials_per_target: int
    master_seed: int
    dataset: Optional[str] = None  # label for records; derived if absent

    def __post_init__(self):
        if not self.algorithms:
            raise ParameterError("algorithm set must be non-empty")
        for algo in self.algorithms:
            if algo not in KNOWN_ALGORITHMS:
                raise ParameterError(f"unknown algorithm {algo!r}")
        if not self.c_grid:
            raise ParameterError("c grid must be non-empty")
        for c in self.c_grid:
            if not (0.01 < c <= 0.5):
                raise ParameterError(f"c={c} outside the experimental range (0.01, 0.5]")
        if self.target_mode not in ("uniform", "degree"):
            raise ParameterError(f"unknown target mode {self.target_mode!r}")
        if self.num_targets < 1:
            raise ParameterError("num_targets must be >= 1")
        if self.trials_per_target < 1:
            raise ParameterError("trials_per_target must be >= 1")


@dataclass
class TrialRecord:
    algo: str
    dataset: str
    target: int
    alpha: float
    c: float
    p_f: float
    seed: int
    estimate: float
    ground_truth: float
    rel_error: float
    deg_calls: int
    neigh_calls: int
    jump_calls: int
    total_queries: int
    walks: int
    moves: int
    wall_time_ns: int
    error: str = ""


RECORD_FIELDS = [f.name for f in fields(TrialRecord)]


def sample_targets(g: UndirectedGraph, k: int, mode: str, seed: int) -> List[int]:
    """k distinct degree>=1 nodes, uniformly or degree-proportionally.

    Degree mode draws by inverse sampling on cumulative degrees (each
    draw lands on u with probability d_u / 2m) and rejects duplicates.
    """
    degrees = g.degrees
    eligible = np.flatnonzero(degrees > 0)
    if k > eligible.size:
        raise ParameterError(
            f"requested {k} targets but only {eligible.size} nodes have degree >= 1"
        )
    rng = random.Random(seed)
    if mode == "uniform":
        return [int(eligible[i]) for i in rng.sample(range(eligible.size), k)]
    if mode == "degree":
        offsets = g.offsets
        two_m = int(offsets[-1])
        chosen: List[int] = []
        seen = set()
        while len(chosen) < k:
            r = rng.randrange(two_m)
            u = int(np.searchsorted(offsets, r, side="right")) - 1
            if u not in seen:
                seen.add(u)
                chosen.append(u)
        return chosen
    raise ParameterError(f"unknown target mode {mode!r}")


def resolve_graph(source: GraphSource) -> tuple:
    """Materialize a graph from a path or generator params; returns (graph, label)."""
    if isinstance(source, UndirectedGraph):
        return source, f"graph-n{source.num_nodes}"
    if isinstance(source, ErParams):
        return generate_er(source), f"er-n{source.n}-p{source.edge_prob:g}"
    if isinstance(source, HardInstanceParams):
        g, _ = generate_hard_instance(source)
        return g, f"hard-l{source.level}"
    path = Path(source)
    with path.open("r", encoding="utf-8") as fh:
        return load_edge_list(fh), path.stem


def _run_trial(graph, stats, alpha, p_f, dataset, algo, target, c, trial_seed, truth_value):
    """One estimator invocation on a fresh oracle; returns a TrialRecord."""
    oracle = GraphOracle(graph, seed=spawn_seed(trial_seed, 0))
    cfg = EstimatorConfig(alpha=alpha, c=c, p_f=p_f, seed=spawn_seed(trial_seed, 1))
    t0 = time.perf_counter_ns()
    try:
        if algo == "backmc":
            est = backmc(oracle, target, cfg, stats)
        elif algo == "mc":
            est = mc_global(oracle, target, cfg)
        elif algo == "backwardpush":
            r_max = c * alpha / graph.num_nodes
            est, _ = backward_push(oracle, target, alpha, r_max)
        elif algo == "setpush":
            est = setpush(oracle, target, cfg, stats)
        else:
            raise ParameterError(f"unknown algorithm {algo!r}")
    except IsolatedTargetError as exc:
        return TrialRecord(
            algo=algo,
            dataset=dataset,
            target=target,
            alpha=alpha,
            c=c,
            p_f=p_f,
            seed=trial_seed,
            estimate=math.nan,
            ground_truth=truth_value,
            rel_error=math.nan,
            deg_calls=0,
            neigh_calls=0,
            jump_calls=0,
            total_queries=0,
            walks=0,
            moves=0,
            wall_time_ns=time.perf_counter_ns() - t0,
            error=f"isolated-target:{exc.exact_value!r}",
        )
    elapsed_ns = time.perf_counter_ns() - t0
    return TrialRecord(
        algo=algo,
        dataset=dataset,
        target=target,
        alpha=alpha,
        c=c,
        p_f=p_f,
        seed=trial_seed,
        estimate=est.value,
        ground_truth=truth_value,
        rel_error=relative_error(est.value, truth_value),
        deg_calls=est.counters.deg_calls,
        neigh_calls=est.counters.neigh_calls,
        jump_calls=est.counters.jump_calls,
        total_queries=est.counters.total,
        walks=est.walks,
        moves=est.moves,
        wall_time_ns=elapsed_ns,
        error="",
    )


_WORKER_CTX = None


def _worker_init(graph, stats, alpha, p_f, dataset, truth_values):
    global _WORKER_CTX
    _WORKER_CTX = (graph, stats, alpha, p_f, dataset, truth_values)


def _worker_run(task):
    graph, stats, alpha, p_f, dataset, truth_values = _WORKER_CTX
    algo, target, c, trial_seed = task
    return _run_trial(
        graph, stats, alpha, p_f, dataset, algo, target, c, trial_seed,
        truth_values[target],
    )


def run_experiment(
    spec: ExperimentSpec,
    graph: Optional[UndirectedGraph] = None,
    workers: Optional[int] = None,
) -> List[TrialRecord]:
    """Execute every (algo, target, c, trial) cell of the spec.

    Ground truth is computed once per graph.  Each trial derives its own
    seed from (master_seed, algo index, target index, c index, trial),
    so output does not depend on execution order or on ``workers``.
    """
    if graph is None:
        graph, label = resolve_graph(spec.graph_source)
    else:
        label = spec.dataset or f"graph-n{graph.num_nodes}"
    dataset = spec.dataset if spec.dataset is not None else label
    stats = graph_stats(graph)
    truth = pagerank_power(graph, spec.alpha)
    targets = sample_targets(
        graph, spec.num_targets, spec.target_mode, seed=spawn_seed(spec.master_seed, 0)
    )

    tasks = []
    for ai, algo in enumerate(spec.algorithms):
        for ti, target in enumerate(targets):
            for ci, c in enumerate(spec.c_grid):
                for trial in range(spec.trials_per_target):
                    trial_seed = spawn_seed(
                        spec.master_seed, 1, ai, ti, ci, trial, bits=64
                    )
                    tasks.append((algo, target, c, trial_seed))

    truth_values = {t: float(truth.values[t]) for t in targets}
    ctx = (graph, stats, spec.alpha, spec.p_f, dataset, truth_values)
    if workers is None or workers <= 1:
        _worker_init(*ctx)
        records = [_worker_run(task) for task in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init, initargs=ctx
        ) as pool:
            records = list(pool.map(_worker_run, tasks, chunksize=1))
    return records


def _format_value(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    """Serialize records; the wall-time column is zeroed for determinism."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for rec in records:
        row = []
        for name in RECORD_FIELDS:
            value = 0 if name == "wall_time_ns" else getattr(rec, name)
            row.append(_format_value(value))
        writer.writerow(row)
    return buf.getvalue()


def records_from_csv(text: str) -> List[TrialRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != RECORD_FIELDS:
        raise ParameterError(f"unexpected CSV header: {header}")
    out = []
    for row in reader:
        kw = dict(zip(RECORD_FIELDS, row))
        out.append(
            TrialRecord(
                algo=kw["algo"],
                dataset=kw["dataset"],
                target=int(kw["target"]),
                alpha=float(kw["alpha"]),
                c=float(kw["c"]),
                p_f=float(kw["p_f"]),
                seed=int(kw["seed"]),
                estimate=float(kw["estimate"]),
                ground_truth=float(kw["ground_truth"]),
                rel_error=float(kw["rel_error"]),
                deg_calls=int(kw["deg_calls"]),
                neigh_calls=int(kw["neigh_calls"]),
                jump_calls=int(kw["jump_calls"]),
                total_queries=int(kw["total_queries"]),
                walks=int(kw["walks"]),
                moves=int(kw["moves"]),
                wall_time_ns=int(kw["wall_time_ns"]),
                error=kw["error"],
            )
        )
    return out


@dataclass
class SummaryRow:
    algo: str
    c: float
    trials: int
    failed: int
    mean_rel_error: float
    mean_total_queries: float
    mean_wall_time_ns: float


def summarize(records: Sequence[TrialRecord]) -> List[SummaryRow]:
    """Per (algo, c): mean relative error, query count and wall time."""
    if not records:
        raise ParameterError("summarize needs at least one record")
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.algo, rec.c), []).append(rec)
    out = []
    for (algo, c) in sorted(groups):
        rows = groups[(algo, c)]
        ok = [r for r in rows if not r.error]
        out.append(
            SummaryRow(
                algo=algo,
                c=c,
                trials=len(rows),
                failed=len(rows) - len(ok),
                mean_rel_error=(
                    sum(r.rel_error for r in ok) / len(ok) if ok else math.nan
                ),
                mean_total_queries=(
                    sum(r.total_queries for r in ok) / len(ok) if ok else math.nan
                ),
                mean_wall_time_ns=(
                    sum(r.wall_time_ns for r in ok) / len(ok) if ok else math.nan
                ),
            )
        )
    return out


@dataclass
class HardFamilyReport:
    """Ground-truth separation of the adversarial family G^(0..p)."""

    levels: List[int]
    targets: List[int]
    target_degrees: List[int]
    scores: List[float]
    ratios: List[float]
    min_ratio_gap: float  # measured delta: min_i ratio_i - 1
    alpha: float
    separated: bool


def validate_hard_family(
    group_size: int,
    hub_count: int,
    pad_to_n: int,
    max_level: int,
    alpha: float,
    seed: int,
) -> HardFamilyReport:
    """Build G^(0..max_level) and measure the target-score separation.

    All instances share the construction parameters and seed; only the
    level varies.  Reports the consecutive score ratios and the measured
    minimum gap; ``separated`` records whether every ratio exceeds 1.
    """
    scores = []
    targets = []
    degrees = []
    levels = list(range(max_level + 1))
    for level in levels:
        params = HardInstanceParams(
            level=level,
            max_level=max_level,
            group_size=group_size,
            hub_count=hub_count,
            pad_to_n=pad_to_n,
            seed=seed,
        )
        g, t = generate_hard_instance(params)
        truth = pagerank_power(g, alpha)
        scores.append(float(truth.values[t]))
        targets.append(t)
        degrees.append(g.degree(t))
    ratios = [scores[i] / scores[i - 1] for i in range(1, len(scores))]
    min_gap = min(ratios) - 1.0 if ratios else math.nan
    return HardFamilyReport(
        levels=levels,
        targets=targets,
        target_degrees=degrees,
        scores=scores,
        ratios=ratios,
        min_ratio_gap=min_gap,
        alpha=alpha,
        separated=all(r > 1.0 for r in ratios),
    )
