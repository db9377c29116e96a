"""Immutable undirected-graph model, edge-list IO, and synthetic generators.

Graphs are simple (no self-loops, no parallel edges) and stored in
compressed sparse row form: ``offsets`` holds cumulative degrees and
``adjacency`` the neighbor ids, sorted ascending within each node's
slice.  ``num_edges`` counts *undirected* edges, so ``len(adjacency)``
is ``2 * num_edges``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np
import scipy.sparse as sp

from .errors import GraphFormatError, ParameterError

logger = logging.getLogger(__name__)


@dataclass
class UndirectedGraph:
    """Compressed adjacency structure of a simple undirected graph.

    Treat instances as immutable after construction; they are shared
    read-only across worker processes.
    """

    num_nodes: int
    num_edges: int
    offsets: np.ndarray
    adjacency: np.ndarray

    _csr: Optional[sp.csr_matrix] = field(default=None, repr=False, compare=False)
    _py_lists: Optional[tuple] = field(default=None, repr=False, compare=False)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def degree(self, u: int) -> int:
        return int(self.offsets[u + 1] - self.offsets[u])

    def neighbors(self, u: int) -> np.ndarray:
        return self.adjacency[self.offsets[u] : self.offsets[u + 1]]

    def to_csr(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix (cached)."""
        if self._csr is None:
            data = np.ones(len(self.adjacency), dtype=np.float64)
            self._csr = sp.csr_matrix(
                (data, self.adjacency, self.offsets),
                shape=(self.num_nodes, self.num_nodes),
            )
        return self._csr

    def adjacency_lists(self) -> tuple:
        """(offsets, adjacency) as plain Python lists.

        Cached; used by the access oracle, where per-element list reads
        are markedly cheaper than numpy scalar indexing.
        """
        if self._py_lists is None:
            self._py_lists = (self.offsets.tolist(), self.adjacency.tolist())
        return self._py_lists

    def __reduce__(self):
        # Drop caches when pickling for worker processes.
        return (
            _rebuild_graph,
            (self.num_nodes, self.num_edges, self.offsets, self.adjacency),
        )


def _rebuild_graph(n, m, offsets, adjacency):
    return UndirectedGraph(n, m, offsets, adjacency)


@dataclass
class GraphStats:
    """Degree statistics of a graph.

    ``d_min_positive`` is the minimum over nodes of degree >= 1 and is
    None for edgeless graphs; isolated nodes are never reached by walks
    from a non-isolated target, so estimator sizing uses this value.
    """

    num_nodes: int
    num_edges: int
    d_min_positive: Optional[int]
    d_max: int
    avg_degree: float
    num_isolated: int


@dataclass
class ErParams:
    """Erdos-Renyi G(n, p) parameters."""

    n: int
    edge_prob: float
    seed: int


@dataclass
class HardInstanceParams:
    """Parameters of one member of the adversarial graph family.

    ``level`` selects the instance: the target is attached to ``level``
    low-degree clique groups of ``group_size`` nodes each plus one
    high-degree hub clique of ``hub_count`` nodes; the node set is
    padded with isolated nodes up to ``pad_to_n`` and labels are
    shuffled by ``seed``.
    """

    level: int
    max_level: int
    group_size: int
    hub_count: int
    pad_to_n: int
    seed: int


def _build_csr(n: int, us: np.ndarray, vs: np.ndarray) -> UndirectedGraph:
    """Assemble a graph from unique undirected edges (u < v pairs)."""
    m = len(us)
    src = np.concatenate([us, vs])
    dst = np.concatenate([vs, us])
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    counts = np.bincount(src, minlength=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return UndirectedGraph(
        num_nodes=n,
        num_edges=m,
        offsets=offsets,
        adjacency=dst.astype(np.int64, copy=False),
    )


def load_edge_list(source: Union[str, Iterable[str]]) -> UndirectedGraph:
    """Parse an edge-list text stream into a graph.

    Each non-comment line holds two whitespace-separated 0-based node
    ids.  Lines starting with '#' are comments; a ``# n=<N>`` header
    declares the node count (it may only raise it above 1 + max id, and
    ids >= N are then rejected).  Duplicate edges are removed with a
    logged warning; self-loops are an error.
    """
    if isinstance(source, str):
        lines: Iterable[str] = source.splitlines()
    else:
        lines = source

    declared_n: Optional[int] = None
    edges: set = set()
    duplicates = 0
    max_id = -1

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if token.startswith("n="):
                    try:
                        declared_n = int(token[2:])
                    except ValueError:
                        raise GraphFormatError(
                            f"line {lineno}: malformed node-count header {token!r}"
                        ) from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(
                f"line {lineno}: expected two node ids, got {line!r}"
            )
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(
                f"line {lineno}: non-integer node id in {line!r}"
            ) from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative node id in {line!r}")
        if u == v:
            raise GraphFormatError(f"self-loop at line {lineno}")
        if declared_n is not None and max(u, v) >= declared_n:
            raise GraphFormatError(
                f"line {lineno}: node id {max(u, v)} out of range for declared n={declared_n}"
            )
        key = (u, v) if u < v else (v, u)
        if key in edges:
            duplicates += 1
        else:
            edges.add(key)
        if v > max_id or u > max_id:
            max_id = max(u, v)

    if declared_n is not None:
        if max_id >= declared_n:
            raise GraphFormatError(
                f"node id {max_id} out of range for declared n={declared_n}"
            )
        n = declared_n
    else:
        n = max_id + 1

    if duplicates:
        logger.warning("deduplicated %d duplicate edge line(s)", duplicates)

    if edges:
        arr = np.array(sorted(edges), dtype=np.int64)
        return _build_csr(n, arr[:, 0], arr[:, 1])
    empty = np.zeros(0, dtype=np.int64)
    return UndirectedGraph(n, 0, np.zeros(n + 1, dtype=np.int64), empty)


def write_edge_list(g: UndirectedGraph) -> str:
    """Serialize a graph; round-trips through :func:`load_edge_list`.

    Emits a ``# n=<n> m=<m>`` header, then each undirected edge once as
    ``u v`` with u < v, lines sorted lexicographically.
    """
    src = np.repeat(np.arange(g.num_nodes, dtype=np.int64), g.degrees)
    mask = g.adjacency > src
    lines = [f"{u} {v}" for u, v in zip(src[mask], g.adjacency[mask])]
    lines.sort()
    header = f"# n={g.num_nodes} m={g.num_edges}\n"
    return header + "".join(line + "\n" for line in lines)


def generate_er(params: ErParams) -> UndirectedGraph:
    """Sample G(n, p): every unordered pair is an edge independently.

    Uses geometric gap-skipping over the flattened upper triangle, which
    induces exactly the per-pair Bernoulli distribution while touching
    only the selected pairs.  Deterministic per seed.
    """
    n, p, seed = params.n, params.edge_prob, params.seed
    if n < 1:
        raise ParameterError(f"node count must be >= 1, got {n}")
    if not (0.0 < p <= 1.0):
        raise ParameterError(f"edge_prob must be in (0, 1], got {p}")

    if p == 1.0:
        us, vs = np.triu_indices(n, k=1)
        return _build_csr(n, us.astype(np.int64), vs.astype(np.int64))

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    total_pairs = n * (n - 1) // 2
    chunk = max(1024, int(total_pairs * p * 1.2) + 64)
    picks = []
    position = 0  # count of pair slots consumed so far
    while position < total_pairs:
        gaps = rng.geometric(p, size=chunk)
        idx = position + np.cumsum(gaps) - 1
        picks.append(idx[idx < total_pairs])
        position = int(idx[-1]) + 1

    if picks:
        indices = np.concatenate(picks)
    else:
        indices = np.zeros(0, dtype=np.int64)

    # Row u of the upper triangle starts at pair index u*n - u*(u+1)/2.
    rows = np.arange(n - 1, dtype=np.int64)
    row_starts = np.concatenate(([0], np.cumsum(n - 1 - rows)))[:-1]
    us = np.searchsorted(row_starts, indices, side="right") - 1
    vs = indices - row_starts[us] + us + 1
    return _build_csr(n, us.astype(np.int64), vs.astype(np.int64))


def generate_hard_instance(params: HardInstanceParams) -> tuple:
    """Build one instance of the adversarial family; returns (graph, target).

    Instance ``i`` attaches the target to ``i`` clique groups whose
    members end up with degree exactly ``group_size`` (clique degree
    group_size-1 plus the edge to the target) and to one hub clique
    whose members have degree exactly ``hub_count``.  The target degree
    is therefore ``level*group_size + hub_count``.  Remaining nodes up
    to ``pad_to_n`` are isolated.  Node labels are shuffled by the seed;
    the shuffled target id is returned.
    """
    lvl, gs, hc = params.level, params.group_size, params.hub_count
    if lvl < 0:
        raise ParameterError(f"level must be >= 0, got {lvl}")
    if params.max_level < 2:
        raise ParameterError(f"max_level must be >= 2, got {params.max_level}")
    if lvl > params.max_level:
        raise ParameterError(f"level {lvl} exceeds max_level {params.max_level}")
    if gs < 2:
        raise ParameterError(f"group_size must be >= 2, got {gs}")
    if hc < 2:
        raise ParameterError(f"hub_count must be >= 2, got {hc}")
    used = 1 + lvl * gs + hc
    if params.pad_to_n < used:
        raise ParameterError(
            f"pad_to_n={params.pad_to_n} too small: construction uses {used} nodes"
        )

    t = 0
    edges = []
    next_id = 1
    for _ in range(lvl):
        group = list(range(next_id, next_id + gs))
        next_id += gs
        for a_i, a in enumerate(group):
            edges.append((t, a))
            for b in group[a_i + 1 :]:
                edges.append((a, b))
    hubs = list(range(next_id, next_id + hc))
    for a_i, a in enumerate(hubs):
        edges.append((t, a))
        for b in hubs[a_i + 1 :]:
            edges.append((a, b))

    n = params.pad_to_n
    rng = np.random.default_rng(np.random.SeedSequence(params.seed))
    perm = rng.permutation(n)
    arr = perm[np.array(edges, dtype=np.int64)]
    us = np.minimum(arr[:, 0], arr[:, 1])
    vs = np.maximum(arr[:, 0], arr[:, 1])
    return _build_csr(n, us, vs), int(perm[t])


def graph_stats(g: UndirectedGraph) -> GraphStats:
    degrees = g.degrees
    positive = degrees[degrees > 0]
    return GraphStats(
        num_nodes=g.num_nodes,
        num_edges=g.num_edges,
        d_min_positive=int(positive.min()) if positive.size else None,
        d_max=int(degrees.max()) if degrees.size else 0,
        avg_degree=(2.0 * g.num_edges / g.num_nodes) if g.num_nodes else 0.0,
        num_isolated=int(np.count_nonzero(degrees == 0)),
    )


def validate_graph(g: UndirectedGraph) -> None:
    """Full-scan structural check; raises ValueError on any violation."""
    n, m = g.num_nodes, g.num_edges
    off, adj = g.offsets, g.adjacency
    if len(off) != n + 1 or off[0] != 0 or off[-1] != 2 * m:
        raise ValueError("offsets malformed")
    if np.any(np.diff(off) < 0):
        raise ValueError("offsets not non-decreasing")
    if len(adj) != 2 * m:
        raise ValueError("adjacency length != 2m")
    if m == 0:
        return
    if adj.min() < 0 or adj.max() >= n:
        raise ValueError("neighbor id out of range")
    src = np.repeat(np.arange(n, dtype=np.int64), g.degrees)
    if np.any(src == adj):
        raise ValueError("self-loop present")
    # Strictly ascending within each slice implies no duplicate neighbors.
    interior = np.diff(adj) <= 0
    boundaries = off[1:-1]
    boundaries = boundaries[(boundaries > 0) & (boundaries < 2 * m)]
    interior[boundaries - 1] = False  # slice boundaries may decrease
    if np.any(interior):
        raise ValueError("adjacency slice not strictly ascending")
    # Symmetry: the arc multiset equals its own transpose.
    fwd = np.lexsort((adj, src))
    rev = np.lexsort((src, adj))
    if not (
        np.array_equal(src[fwd], adj[rev]) and np.array_equal(adj[fwd], src[rev])
    ):
        raise ValueError("adjacency not symmetric")
