"""Arc-centric graph access with exact per-operation query accounting.

Estimators see a graph only through :class:`GraphOracle` and its three
elementary operations: ``deg(u)``, ``neigh(u, i)`` and ``jump()``.  Each
successful call increments its counter; failed calls do not.  Node
count is exposed uncounted: it is global side information the
estimators' parameter formulas assume anyway.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graph import UndirectedGraph


def spawn_seed(master_seed: int, *key: int, bits: int = 128) -> int:
    """Derive an independent stream seed from a master seed and key path.

    Same (master_seed, key) always yields the same value; distinct keys
    yield statistically independent streams (counter-based derivation).
    """
    if master_seed < 0:
        raise ParameterError(f"seed must be non-negative, got {master_seed}")
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(key))
    words = ss.generate_state(bits // 32, np.uint32)
    out = 0
    for w in words:
        out = (out << 32) | int(w)
    return out


def derive_rng(master_seed: int, *key: int) -> random.Random:
    """A fast stdlib RNG seeded from an independent derived stream."""
    return random.Random(spawn_seed(master_seed, *key))


@dataclass
class QueryCounters:
    deg_calls: int = 0
    neigh_calls: int = 0
    jump_calls: int = 0

    @property
    def total(self) -> int:
        return self.deg_calls + self.neigh_calls + self.jump_calls

    def as_tuple(self) -> tuple:
        return (self.deg_calls, self.neigh_calls, self.jump_calls)

    def __sub__(self, other: "QueryCounters") -> "QueryCounters":
        return QueryCounters(
            self.deg_calls - other.deg_calls,
            self.neigh_calls - other.neigh_calls,
            self.jump_calls - other.jump_calls,
        )

    def __add__(self, other: "QueryCounters") -> "QueryCounters":
        return QueryCounters(
            self.deg_calls + other.deg_calls,
            self.neigh_calls + other.neigh_calls,
            self.jump_calls + other.jump_calls,
        )


class GraphOracle:
    """Single-owner mutable view of a shared read-only graph.

    One oracle per trial; never share across workers.  ``deg``/``neigh``
    are deterministic; ``jump`` consumes exactly one draw from the
    oracle's seeded stream per call.
    """

    __slots__ = (
        "graph",
        "rng",
        "deg_calls",
        "neigh_calls",
        "jump_calls",
        "_offsets",
        "_adjacency",
        "_n",
    )

    def __init__(self, graph: UndirectedGraph, seed: int = 0):
        self.graph = graph
        self.rng = random.Random(seed)
        self.deg_calls = 0
        self.neigh_calls = 0
        self.jump_calls = 0
        # Plain lists: the walk loops live or die on per-call cost.
        self._offsets, self._adjacency = graph.adjacency_lists()
        self._n = graph.num_nodes

    @property
    def num_nodes(self) -> int:
        return self._n

    def deg(self, u: int) -> int:
        if u < 0 or u >= self._n:
            raise IndexError(f"node {u} out of range [0, {self._n})")
        self.deg_calls += 1
        off = self._offsets
        return off[u + 1] - off[u]

    def neigh(self, u: int, i: int) -> int:
        if u < 0 or u >= self._n:
            raise IndexError(f"node {u} out of range [0, {self._n})")
        off = self._offsets
        base = off[u]
        if i < 0 or base + i >= off[u + 1]:
            raise IndexError(f"neighbor index {i} out of range for node {u}")
        self.neigh_calls += 1
        return self._adjacency[base + i]

    def jump(self) -> int:
        self.jump_calls += 1
        v = int(self.rng.random() * self._n)
        return v if v < self._n else self._n - 1

    def counters_snapshot(self) -> QueryCounters:
        return QueryCounters(self.deg_calls, self.neigh_calls, self.jump_calls)

    def reset_counters(self) -> None:
        self.deg_calls = 0
        self.neigh_calls = 0
        self.jump_calls = 0
