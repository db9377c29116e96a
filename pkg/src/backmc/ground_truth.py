"""Power-iteration PageRank / personalized PageRank and the error metric.

These are the reference scores every estimator is judged against.
Convergence is by fixed iteration count, defaulting to
``ceil(log_{1-a}(0.0001 * a / n))`` so the geometric truncation tail is
four orders of magnitude below the smallest possible score.  Columns of
degree-0 nodes contribute nothing: their score is pinned at ``a/n`` and
total PageRank mass may be < 1 on graphs with isolated nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .graph import UndirectedGraph


@dataclass
class ScoreVector:
    """Dense score vector with the parameters that produced it."""

    values: np.ndarray
    alpha: float
    iterations: int
    kind: str  # "pagerank" | "ppr"
    source: Optional[int] = None

    def __getitem__(self, u: int) -> float:
        return float(self.values[u])


def default_iterations(n: int, alpha: float) -> int:
    return math.ceil(math.log(0.0001 * alpha / n) / math.log(1.0 - alpha))


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must be in (0, 1), got {alpha}")


def _inverse_degrees(g: UndirectedGraph) -> np.ndarray:
    degrees = g.degrees.astype(np.float64)
    inv = np.zeros_like(degrees)
    np.divide(1.0, degrees, out=inv, where=degrees > 0)
    return inv


def pagerank_power(
    g: UndirectedGraph, alpha: float, iterations: Optional[int] = None
) -> ScoreVector:
    """Global PageRank by power iteration from the uniform vector.

    Applies ``pi <- (1-alpha) * A D^{-1} pi + alpha/n`` the given number
    of times (default per :func:`default_iterations`).
    """
    _check_alpha(alpha)
    n = g.num_nodes
    if iterations is None:
        iterations = default_iterations(n, alpha)
    A = g.to_csr()
    inv_deg = _inverse_degrees(g)
    teleport = alpha / n
    pi = np.full(n, 1.0 / n)
    for _ in range(iterations):
        pi = (1.0 - alpha) * (A @ (pi * inv_deg)) + teleport
    return ScoreVector(values=pi, alpha=alpha, iterations=iterations, kind="pagerank")


def ppr_power(
    g: UndirectedGraph,
    source: int,
    alpha: float,
    iterations: Optional[int] = None,
) -> ScoreVector:
    """Termination distribution of an alpha-discounted walk from ``source``.

    Accumulates ``alpha * (1-alpha)^l * x_l`` over walk lengths l, where
    x_0 is the indicator of the source and x advances by the
    uniform-neighbor transition.  The geometric mass not yet terminated
    after the final step is assigned to the walk's current position, so
    the result is an exact probability distribution (sums to 1) rather
    than leaking the truncation tail.

    A degree-0 source returns its own indicator: the walk can never
    leave it.
    """
    _check_alpha(alpha)
    n = g.num_nodes
    if not (0 <= source < n):
        raise ParameterError(f"source {source} out of range [0, {n})")
    x = np.zeros(n)
    x[source] = 1.0
    if g.degree(source) == 0:
        return ScoreVector(values=x, alpha=alpha, iterations=0, kind="ppr", source=source)
    if iterations is None:
        iterations = default_iterations(n, alpha)
    A = g.to_csr()
    inv_deg = _inverse_degrees(g)
    out = np.zeros(n)
    coeff = alpha  # alpha * (1-alpha)^l
    for _ in range(iterations):
        out += coeff * x
        x = A @ (x * inv_deg)
        coeff *= 1.0 - alpha
    out += (coeff / alpha) * x  # undistributed tail (1-alpha)^iterations
    return ScoreVector(
        values=out, alpha=alpha, iterations=iterations, kind="ppr", source=source
    )


def relative_error(estimate: float, truth: float) -> float:
    """|truth - estimate| / truth; the truth must be strictly positive."""
    if truth <= 0:
        raise ParameterError(f"relative error needs truth > 0, got {truth}")
    return abs(truth - estimate) / truth
