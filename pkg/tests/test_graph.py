from __future__ import annotations

import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backmc import (
    ErParams,
    GraphFormatError,
    HardInstanceParams,
    ParameterError,
    generate_er,
    generate_hard_instance,
    graph_stats,
    load_edge_list,
    validate_graph,
    write_edge_list,
)


class TestLoadEdgeList:
    def test_single_edge(self):
        g = load_edge_list("0 1")
        assert g.num_nodes == 2
        assert g.num_edges == 1
        assert g.degree(0) == 1 and g.degree(1) == 1

    def test_duplicates_deduped_with_warning_count(self, caplog):
        with caplog.at_level(logging.WARNING, logger="backmc.graph"):
            g = load_edge_list("0 1\n1 0\n0 1\n")
        assert g.num_nodes == 2 and g.num_edges == 1
        assert any(
            rec.args == (2,) and "duplicate" in rec.msg for rec in caplog.records
        )

    def test_self_loop_rejected_with_line_number(self):
        with pytest.raises(GraphFormatError, match="self-loop at line 1"):
            load_edge_list("0 0")
        with pytest.raises(GraphFormatError, match="self-loop at line 3"):
            load_edge_list("0 1\n1 2\n2 2\n")

    def test_non_integer_token(self):
        with pytest.raises(GraphFormatError, match="line 2"):
            load_edge_list("0 1\nx 2\n")

    def test_header_declares_extra_isolated_nodes(self):
        g = load_edge_list("# n=5\n0 1\n")
        assert g.num_nodes == 5
        assert graph_stats(g).num_isolated == 3

    def test_id_beyond_declared_n_rejected(self):
        with pytest.raises(GraphFormatError, match="out of range"):
            load_edge_list("# n=2\n0 2\n")

    def test_adjacency_sorted(self):
        g = load_edge_list("0 3\n0 1\n0 2\n")
        assert list(g.neighbors(0)) == [1, 2, 3]


class TestWriteEdgeList:
    def test_single_edge_format(self, single_edge):
        assert write_edge_list(single_edge) == "# n=2 m=1\n0 1\n"

    def test_triangle_lines(self):
        g = load_edge_list("1 2\n0 2\n0 1\n")
        assert write_edge_list(g) == "# n=3 m=3\n0 1\n0 2\n1 2\n"

    def test_round_trip_on_er_graph(self):
        g = generate_er(ErParams(n=100, edge_prob=0.1, seed=7))
        h = load_edge_list(write_edge_list(g))
        assert h.num_nodes == g.num_nodes
        assert h.num_edges == g.num_edges
        assert np.array_equal(h.offsets, g.offsets)
        assert np.array_equal(h.adjacency, g.adjacency)

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_round_trip_is_identity(self, seed):
        g = generate_er(ErParams(n=40, edge_prob=0.12, seed=seed))
        h = load_edge_list(write_edge_list(g))
        assert np.array_equal(h.offsets, g.offsets)
        assert np.array_equal(h.adjacency, g.adjacency)
        assert h.num_nodes == g.num_nodes


class TestGenerateEr:
    def test_p_one_gives_complete_graph(self):
        g = generate_er(ErParams(n=4, edge_prob=1.0, seed=0))
        assert g.num_edges == 6
        assert graph_stats(g).d_min_positive == 3

    def test_determinism(self):
        a = generate_er(ErParams(n=200, edge_prob=0.05, seed=99))
        b = generate_er(ErParams(n=200, edge_prob=0.05, seed=99))
        assert np.array_equal(a.adjacency, b.adjacency)
        assert np.array_equal(a.offsets, b.offsets)

    def test_large_sparse_edge_count_within_5_sigma(self):
        n = 100_000
        p = 10 / n
        g = generate_er(ErParams(n=n, edge_prob=p, seed=31))
        expected = n * (n - 1) * p / 2
        sigma = math.sqrt(n * (n - 1) / 2 * p * (1 - p))
        assert abs(g.num_edges - expected) <= 5 * sigma
        validate_graph(g)

    def test_invalid_edge_prob(self):
        with pytest.raises(ParameterError):
            generate_er(ErParams(n=10, edge_prob=0.0, seed=1))
        with pytest.raises(ParameterError):
            generate_er(ErParams(n=10, edge_prob=1.5, seed=1))

    @pytest.mark.slow
    def test_distribution_correct_seed_averaged(self):
        # Seed-averaged edge count over many seeds matches the binomial
        # mean within 4 sigma of the seed-average.
        n, p, seeds = 30, 0.3, 2000
        pairs = n * (n - 1) // 2
        counts = [
            generate_er(ErParams(n=n, edge_prob=p, seed=s)).num_edges
            for s in range(seeds)
        ]
        mean = sum(counts) / seeds
        sigma = math.sqrt(pairs * p * (1 - p))
        assert abs(mean - pairs * p) <= 4 * sigma / math.sqrt(seeds)


class TestHardInstance:
    def test_target_degree_arithmetic(self):
        params = HardInstanceParams(
            level=2, max_level=3, group_size=4, hub_count=10, pad_to_n=50, seed=5
        )
        g, t = generate_hard_instance(params)
        assert g.degree(t) == 2 * 4 + 10

    def test_level_zero_only_hubs(self):
        params = HardInstanceParams(
            level=0, max_level=2, group_size=4, hub_count=10, pad_to_n=30, seed=5
        )
        g, t = generate_hard_instance(params)
        assert g.degree(t) == 10

    def test_group_and_hub_degree_contract(self):
        params = HardInstanceParams(
            level=3, max_level=3, group_size=4, hub_count=10, pad_to_n=60, seed=17
        )
        g, t = generate_hard_instance(params)
        validate_graph(g)
        degrees = sorted(int(d) for d in g.degrees if d > 0)
        # 3 groups of 4 nodes at degree exactly 4, 10 hubs at degree
        # exactly 10, plus the target at 22.
        assert degrees == [4] * 12 + [10] * 10 + [22]
        assert g.degree(t) == 22

    def test_isolated_padding_count(self):
        params = HardInstanceParams(
            level=1, max_level=2, group_size=4, hub_count=10, pad_to_n=50, seed=3
        )
        g, _ = generate_hard_instance(params)
        assert graph_stats(g).num_isolated == 50 - (1 + 4 + 10)

    def test_pad_too_small(self):
        with pytest.raises(ParameterError, match="pad_to_n"):
            generate_hard_instance(
                HardInstanceParams(
                    level=2, max_level=2, group_size=4, hub_count=10, pad_to_n=18, seed=1
                )
            )

    def test_determinism(self):
        params = HardInstanceParams(
            level=2, max_level=2, group_size=3, hub_count=5, pad_to_n=40, seed=11
        )
        g1, t1 = generate_hard_instance(params)
        g2, t2 = generate_hard_instance(params)
        assert t1 == t2
        assert np.array_equal(g1.adjacency, g2.adjacency)


class TestGraphStats:
    def test_star(self, star4):
        s = graph_stats(star4)
        assert s.d_min_positive == 1
        assert s.d_max == 3
        assert s.avg_degree == 1.5
        assert s.num_isolated == 0

    def test_k4_regular(self, k4):
        s = graph_stats(k4)
        assert s.d_min_positive == s.d_max == 3

    def test_edgeless_graph_has_no_d_min(self):
        g = load_edge_list("# n=3\n")
        s = graph_stats(g)
        assert s.d_min_positive is None
        assert s.num_isolated == 3


class TestValidator:
    def test_accepts_generated_graphs(self, er100, star4, k4):
        for g in (er100, star4, k4):
            validate_graph(g)

    def test_degree_sum_is_2m(self, er100):
        assert int(er100.degrees.sum()) == 2 * er100.num_edges
