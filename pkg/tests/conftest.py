from __future__ import annotations

import pytest

from backmc import ErParams, generate_er, load_edge_list


@pytest.fixture(scope="session")
def single_edge():
    return load_edge_list("0 1\n")


@pytest.fixture(scope="session")
def star4():
    """Star with center 0 and leaves 1..3."""
    return load_edge_list("0 1\n0 2\n0 3\n")


@pytest.fixture(scope="session")
def k4():
    return load_edge_list("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")


@pytest.fixture(scope="session")
def er100():
    return generate_er(ErParams(n=100, edge_prob=0.08, seed=1234))


@pytest.fixture(scope="session")
def er500():
    """ER n=500 with expected degree ~10."""
    return generate_er(ErParams(n=500, edge_prob=10 / 499, seed=2024))


def complete_graph(n: int):
    lines = [f"{u} {v}" for u in range(n) for v in range(u + 1, n)]
    return load_edge_list("\n".join(lines) + "\n")


def cycle_graph(n: int):
    lines = [f"{u} {(u + 1) % n}" for u in range(n)]
    return load_edge_list("\n".join(lines) + "\n")
