"""Shared exception types."""
from __future__ import annotations


class ParameterError(ValueError):
    """A parameter is outside its documented range."""


class GraphFormatError(ValueError):
    """An edge-list stream violates the input contract."""


class IsolatedTargetError(ValueError):
    """Estimation was requested for a degree-0 target node.

    The estimators refuse isolated targets: their PageRank score is
    pinned to exactly alpha/n by the recursive identity, so sampling is
    pointless.  The exact score is carried on the exception.
    """

    def __init__(self, node: int, alpha: float, num_nodes: int):
        self.node = node
        self.alpha = alpha
        self.num_nodes = num_nodes
        self.exact_value = alpha / num_nodes
        super().__init__(
            f"isolated target {node}: score is exactly alpha/n = {self.exact_value!r}"
        )
