"""Local PageRank estimators, all driven purely through a GraphOracle.

The flagship estimator averages ``q = d_t / (n * d_v)`` over
alpha-discounted random walks started *at the target itself*, where
``d_v`` is the degree of the node a walk terminates at.  By the
degree-weighted symmetry of personalized PageRank on undirected graphs,
``q`` is an unbiased estimator of the target's PageRank score, and its
variance is at most ``d_t * pi(t) / (n * d_min)``.  A Chebyshev-sized
number of walks per run brings the per-run failure probability under
1/3, and a median over ``ceil(18 ln(1/p_f))`` runs (rounded up to odd)
amplifies that to the requested confidence.

Baselines: a global Monte-Carlo estimator (walks from uniform sources),
deterministic residue propagation from the target (backward push), and
a randomized level-synchronous push with per-edge Bernoulli thinning
(setpush).

Accounting contract: every walk move costs exactly one ``deg`` plus one
``neigh`` query, and each finished walk costs one further ``deg`` query
for its terminal degree.  The target degree is fetched once per
estimator call.  Nothing is memoized across walks, so the counters
reflect the true access pattern of the oracle model.
"""
from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import IsolatedTargetError, ParameterError
from .graph import GraphStats
from .oracle import QueryCounters, derive_rng, spawn_seed

DEFAULT_WALK_CAP = 10**8


@dataclass
class EstimatorConfig:
    """Accuracy / confidence / randomness knobs shared by all estimators."""

    alpha: float
    c: float
    p_f: float
    seed: int
    mode: str = "fixed"  # "fixed" | "adaptive"

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError(f"alpha must be in (0, 1), got {self.alpha}")
        if not (0.0 < self.c < 1.0):
            raise ParameterError(f"c must be in (0, 1), got {self.c}")
        if not (0.0 < self.p_f < 1.0):
            raise ParameterError(f"p_f must be in (0, 1), got {self.p_f}")
        if self.mode not in ("fixed", "adaptive"):
            raise ParameterError(f"mode must be 'fixed' or 'adaptive', got {self.mode!r}")


@dataclass
class BackMCPlan:
    n_r: int  # walks per run
    n_m: int  # median runs, odd


@dataclass
class Estimate:
    """One estimator run: value, exact query accounting, walk stats."""

    value: float
    counters: QueryCounters
    walks: int
    moves: int
    elapsed: float
    budget_exhausted: bool = False


@dataclass
class BackwardPushState:
    reserve: dict
    residue: dict
    r_max: float


@dataclass
class SetPushState:
    theta: float
    levels: int
    accumulator: float
    level_residues: Optional[list] = None


def sample_node(oracle, u: int, alpha: float, rng=None) -> tuple:
    """Simulate one alpha-discounted walk from ``u``; return (terminal, moves).

    Each step first flips the termination coin (probability ``alpha``),
    then moves to a uniform neighbor at the cost of one ``deg`` and one
    ``neigh`` query.  A degree-0 node terminates the walk where it
    stands.
    """
    rnd = (rng if rng is not None else oracle.rng).random
    deg = oracle.deg
    neigh = oracle.neigh
    v = u
    moves = 0
    while rnd() >= alpha:
        d = deg(v)
        if d == 0:
            break
        v = neigh(v, int(rnd() * d))
        moves += 1
    return v, moves


def median_of_runs(values) -> float:
    """Exact middle order statistic of an odd-length list."""
    k = len(values)
    if k == 0:
        raise ValueError("median of an empty list")
    if k % 2 == 0:
        raise ValueError(f"median over runs requires an odd count, got {k}")
    return sorted(values)[k // 2]


def median_run_count(p_f: float) -> int:
    """Smallest odd integer >= ceil(18 ln(1/p_f))."""
    k = math.ceil(18.0 * math.log(1.0 / p_f))
    return k if k % 2 == 1 else k + 1


def stopping_threshold(c: float, p_f: float) -> float:
    """Normalized-increment stopping threshold 4(e-2)(1+c) ln(2/p_f) / c^2."""
    return 4.0 * (math.e - 2.0) * (1.0 + c) * math.log(2.0 / p_f) / (c * c)


def plan_backmc(stats: GraphStats, d_t: int, cfg: EstimatorConfig) -> BackMCPlan:
    """Walk and median counts for the fixed-budget mode.

    n_r = ceil( 3 / (c^2 a d_min) * min(d_t, sqrt(m) / sqrt(2(1-a))) ),
    which caps the per-run failure probability at 1/3 by Chebyshev.
    """
    if d_t == 0:
        raise IsolatedTargetError(-1, cfg.alpha, stats.num_nodes)
    if stats.d_min_positive is None:
        raise ParameterError("graph has no edges; cannot size walk budget")
    reach = min(
        float(d_t),
        math.sqrt(stats.num_edges) / math.sqrt(2.0 * (1.0 - cfg.alpha)),
    )
    n_r = math.ceil(3.0 / (cfg.c**2 * cfg.alpha * stats.d_min_positive) * reach)
    return BackMCPlan(n_r=max(1, n_r), n_m=median_run_count(cfg.p_f))


def _run_walks(oracle, t: int, alpha: float, n_walks: int, rng) -> dict:
    """Run walks from t; histogram terminal degrees.

    Returns {terminal_degree: count}.  Each walk ends with one ``deg``
    query on its terminal, deliberately not memoized across walks.
    """
    deg = oracle.deg
    hist: dict = {}
    for _ in range(n_walks):
        v, _ = sample_node(oracle, t, alpha, rng)
        dv = deg(v)
        hist[dv] = hist.get(dv, 0) + 1
    return hist


def _mean_from_histogram(hist: dict, d_t: int, n: int, n_walks: int) -> Fraction:
    """Exact mean of the q-values implied by a terminal-degree histogram.

    Doing this in rational arithmetic keeps the regular-graph case
    (every q identical) exact to the last bit instead of drifting by
    summation round-off.
    """
    harmonic = sum((Fraction(count, d) for d, count in hist.items()), Fraction(0))
    return Fraction(d_t, n * n_walks) * harmonic


def backmc_single_run(
    oracle, t: int, alpha: float, n_r: int, rng=None, d_t: Optional[int] = None
) -> float:
    """Mean of n_r independent q-realizations; unbiased for the score of t."""
    if d_t is None:
        d_t = oracle.deg(t)
    if d_t == 0:
        raise IsolatedTargetError(t, alpha, oracle.num_nodes)
    if n_r < 1:
        raise ParameterError(f"n_r must be >= 1, got {n_r}")
    hist = _run_walks(oracle, t, alpha, n_r, rng)
    return float(_mean_from_histogram(hist, d_t, oracle.num_nodes, n_r))


def backmc(
    oracle,
    t: int,
    cfg: EstimatorConfig,
    stats: Optional[GraphStats] = None,
    walk_cap: int = DEFAULT_WALK_CAP,
) -> Estimate:
    """Estimate the target's PageRank score from walks out of the target.

    Fixed mode sizes each run by :func:`plan_backmc` (requires graph
    stats for m and d_min) and returns the median of the run means.
    Adaptive mode needs no global statistics: it doubles the walk count
    until the normalized increment sum ``sum_i d_min_seen / d_{v_i}``
    crosses :func:`stopping_threshold`, a Dagum-Karp-Luby-Ross style
    stopping rule on the same walk stream.
    """
    start = time.perf_counter()
    before = oracle.counters_snapshot()
    n = oracle.num_nodes
    d_t = oracle.deg(t)
    if d_t == 0:
        raise IsolatedTargetError(t, cfg.alpha, n)

    exhausted = False
    if cfg.mode == "fixed":
        if stats is None:
            raise ParameterError("fixed mode requires graph stats (m, d_min)")
        plan = plan_backmc(stats, d_t, cfg)
        values = []
        walks = 0
        for j in range(plan.n_m):
            rng = derive_rng(cfg.seed, j)
            values.append(
                backmc_single_run(oracle, t, cfg.alpha, plan.n_r, rng=rng, d_t=d_t)
            )
            walks += plan.n_r
        value = median_of_runs(values)
    else:
        rng = derive_rng(cfg.seed, 0)
        tau = stopping_threshold(cfg.c, cfg.p_f)
        hist: dict = {}
        walks = 0
        target_walks = 2
        while True:
            batch = _run_walks(oracle, t, cfg.alpha, target_walks - walks, rng)
            for d, count in batch.items():
                hist[d] = hist.get(d, 0) + count
            walks = target_walks
            d_min_seen = min(hist)
            normalized = d_min_seen * sum(count / d for d, count in hist.items())
            if normalized >= tau:
                break
            if walks >= walk_cap:
                exhausted = True
                break
            target_walks = min(2 * target_walks, walk_cap)
        value = float(_mean_from_histogram(hist, d_t, n, walks))

    counters = oracle.counters_snapshot() - before
    return Estimate(
        value=value,
        counters=counters,
        walks=walks,
        moves=counters.neigh_calls,
        elapsed=time.perf_counter() - start,
        budget_exhausted=exhausted,
    )


def mc_global(
    oracle, t: int, cfg: EstimatorConfig, walk_cap: int = DEFAULT_WALK_CAP
) -> Estimate:
    """Classic global Monte-Carlo: fraction of uniform-source walks ending at t.

    Sequential stopping: walks are drawn until the hit count reaches
    :func:`stopping_threshold`, or until ``walk_cap`` walks have been
    spent (the estimate is then flagged budget-exhausted).
    """
    start = time.perf_counter()
    before = oracle.counters_snapshot()
    d_t = oracle.deg(t)
    if d_t == 0:
        raise IsolatedTargetError(t, cfg.alpha, oracle.num_nodes)

    rng = derive_rng(cfg.seed, 0)
    tau = stopping_threshold(cfg.c, cfg.p_f)
    jump = oracle.jump
    alpha = cfg.alpha
    hits = 0
    walks = 0
    exhausted = False
    while hits < tau:
        if walks >= walk_cap:
            exhausted = True
            break
        s = jump()
        v, _ = sample_node(oracle, s, alpha, rng)
        walks += 1
        if v == t:
            hits += 1

    counters = oracle.counters_snapshot() - before
    return Estimate(
        value=hits / walks if walks else 0.0,
        counters=counters,
        walks=walks,
        moves=counters.neigh_calls,
        elapsed=time.perf_counter() - start,
        budget_exhausted=exhausted,
    )


def backward_push(oracle, t: int, alpha: float, r_max: float) -> tuple:
    """Deterministic residue propagation from the target.

    One unit of residue starts on t.  Pushing a node u settles
    ``alpha * r(u)`` into its reserve and forwards ``(1-alpha) r(u) / d_v``
    to each neighbor v, following the PageRank recursion, until every
    residue is <= r_max.  Returns ``(estimate, state)`` where the
    estimate value is ``(1/n) * sum(reserve)`` and the exact invariant
    ``pi(t) = value + sum_u residue(u) * pi(u)`` holds throughout.
    """
    if r_max <= 0:
        raise ParameterError(f"r_max must be > 0, got {r_max}")
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must be in (0, 1), got {alpha}")
    start = time.perf_counter()
    before = oracle.counters_snapshot()
    n = oracle.num_nodes
    if oracle.deg(t) == 0:
        raise IsolatedTargetError(t, alpha, n)

    residue = {t: 1.0}
    reserve: dict = {}
    queue = deque([t])
    queued = {t}
    deg = oracle.deg
    neigh = oracle.neigh
    push_share = 1.0 - alpha
    while queue:
        u = queue.popleft()
        queued.discard(u)
        r_u = residue.get(u, 0.0)
        if r_u <= r_max:
            continue
        residue[u] = 0.0
        reserve[u] = reserve.get(u, 0.0) + alpha * r_u
        spill = push_share * r_u
        d_u = deg(u)
        for i in range(d_u):
            v = neigh(u, i)
            r_v = residue.get(v, 0.0) + spill / deg(v)
            residue[v] = r_v
            if r_v > r_max and v not in queued:
                queue.append(v)
                queued.add(v)

    value = math.fsum(reserve.values()) / n
    counters = oracle.counters_snapshot() - before
    estimate = Estimate(
        value=value,
        counters=counters,
        walks=0,
        moves=0,
        elapsed=time.perf_counter() - start,
    )
    return estimate, BackwardPushState(reserve=reserve, residue=residue, r_max=r_max)


def _setpush_parameters(n: int, m: int, d_t: int, cfg: EstimatorConfig) -> tuple:
    """(L, theta): level count and push threshold of the randomized push."""
    alpha, c = cfg.alpha, cfg.c
    levels = math.ceil(math.log(c * alpha / (2.0 * n)) / math.log(1.0 - alpha))
    theta = max(
        alpha * c * c / (12.0 * levels * d_t),
        (alpha * c * c / (12.0 * levels)) * math.sqrt(2.0 * (1.0 - alpha) / m),
    )
    return levels, theta


def setpush_single_run(
    oracle,
    t: int,
    cfg: EstimatorConfig,
    stats: GraphStats,
    rng=None,
    binom_rng=None,
    keep_residues: bool = False,
) -> tuple:
    """One unbiased randomized-push estimate; returns (value, state).

    Level residues start as the indicator of t and advance level by
    level: a node whose outgoing share ``(1-alpha) r(u) / d_u`` clears
    the threshold theta pushes to every neighbor deterministically;
    otherwise each neighbor independently receives exactly theta with
    probability ``(1-alpha) r(u) / (d_u theta)``, realized as a binomial
    count plus a uniform index subset so only the chosen neighbors cost
    queries.  Every node holding residue at a level contributes
    ``alpha * r(u) * d_t / d_u`` to the accumulator (one deg query per
    touched node per level); the value is the accumulator divided by n.
    """
    n, m = stats.num_nodes, stats.num_edges
    if m == 0:
        raise ParameterError("graph has no edges")
    if rng is None:
        rng = derive_rng(cfg.seed, 0)
    if binom_rng is None:
        binom_rng = np.random.default_rng(spawn_seed(cfg.seed, 0, 1))
    deg = oracle.deg
    neigh = oracle.neigh
    alpha = cfg.alpha
    damp = 1.0 - alpha

    d_t = deg(t)
    if d_t == 0:
        raise IsolatedTargetError(t, alpha, n)
    levels, theta = _setpush_parameters(n, m, d_t, cfg)

    residues = {t: 1.0}
    trace = [dict(residues)] if keep_residues else None
    acc = 0.0
    for level in range(levels + 1):
        last = level == levels
        nxt: dict = {}
        for u, r_u in residues.items():
            d_u = deg(u)
            acc += alpha * r_u * d_t / d_u
            if last:
                continue
            share = damp * r_u / d_u
            if share >= theta:
                for i in range(d_u):
                    v = neigh(u, i)
                    nxt[v] = nxt.get(v, 0.0) + share
            else:
                k = int(binom_rng.binomial(d_u, share / theta))
                if k:
                    for i in rng.sample(range(d_u), k):
                        v = neigh(u, i)
                        nxt[v] = nxt.get(v, 0.0) + theta
        if not last:
            residues = nxt
            if keep_residues:
                trace.append(dict(residues))

    value = acc / n
    state = SetPushState(
        theta=theta, levels=levels, accumulator=value, level_residues=trace
    )
    return value, state


def setpush(oracle, t: int, cfg: EstimatorConfig, stats: GraphStats) -> Estimate:
    """Median of ceil(18 ln(1/p_f)) (odd) independent randomized-push runs.

    The single run succeeds with constant probability; the same
    Hoeffding median amplification used for the walk estimator lifts it
    to 1 - p_f.
    """
    start = time.perf_counter()
    before = oracle.counters_snapshot()
    n_m = median_run_count(cfg.p_f)
    values = []
    for j in range(n_m):
        rng = derive_rng(cfg.seed, j)
        binom_rng = np.random.default_rng(spawn_seed(cfg.seed, j, 1))
        value, _ = setpush_single_run(
            oracle, t, cfg, stats, rng=rng, binom_rng=binom_rng
        )
        values.append(value)
    counters = oracle.counters_snapshot() - before
    return Estimate(
        value=median_of_runs(values),
        counters=counters,
        walks=0,
        moves=0,
        elapsed=time.perf_counter() - start,
    )
