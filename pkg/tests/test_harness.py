from __future__ import annotations

import math

import numpy as np
import pytest

from backmc import (
    ErParams,
    ExperimentSpec,
    ParameterError,
    generate_er,
    graph_stats,
    load_edge_list,
    pagerank_power,
    records_from_csv,
    records_to_csv,
    run_experiment,
    sample_targets,
    summarize,
    validate_hard_family,
)
from backmc.harness import RECORD_FIELDS, TrialRecord
from conftest import complete_graph


def small_spec(**overrides):
    base = dict(
        graph_source=ErParams(n=100, edge_prob=0.08, seed=1234),
        algorithms=["backmc", "backwardpush"],
        alpha=0.2,
        c_grid=[0.5, 0.3],
        p_f=0.5,
        target_mode="uniform",
        num_targets=3,
        trials_per_target=2,
        master_seed=77,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


class TestSampleTargets:
    def test_exhaustive_uniform_sample_is_permutation(self, star4):
        targets = sample_targets(star4, 4, "uniform", seed=3)
        assert sorted(targets) == [0, 1, 2, 3]

    def test_deterministic(self, er100):
        a = sample_targets(er100, 10, "degree", seed=5)
        b = sample_targets(er100, 10, "degree", seed=5)
        assert a == b

    def test_excludes_isolated_nodes(self):
        g = load_edge_list("# n=6\n0 1\n1 2\n")
        for mode in ("uniform", "degree"):
            for seed in range(30):
                assert set(sample_targets(g, 3, mode, seed)) == {0, 1, 2}

    def test_k_too_large(self, star4):
        with pytest.raises(ParameterError):
            sample_targets(star4, 5, "uniform", seed=1)

    def test_degree_mode_first_draw_law_on_star(self, star4):
        # Center holds half the arc endpoints, so it opens the draw
        # half the time.
        seeds = 100_000
        hits = sum(
            sample_targets(star4, 1, "degree", seed=s)[0] == 0 for s in range(seeds)
        )
        assert abs(hits / seeds - 0.5) <= 0.005

    @pytest.mark.slow
    def test_degree_mode_multinomial_bands(self):
        g = load_edge_list("0 1\n0 2\n0 3\n1 2\n4 5\n5 6\n6 7\n7 8\n8 9\n")
        degrees = g.degrees
        two_m = 2 * g.num_edges
        seeds = 100_000
        counts = np.zeros(g.num_nodes)
        for s in range(seeds):
            counts[sample_targets(g, 1, "degree", seed=s)[0]] += 1
        for u in range(g.num_nodes):
            p = degrees[u] / two_m
            sigma = math.sqrt(p * (1 - p) / seeds)
            assert abs(counts[u] / seeds - p) <= 4 * sigma


class TestRunExperiment:
    def test_record_cardinality(self):
        records = run_experiment(small_spec())
        assert len(records) == 2 * 3 * 2 * 2

    def test_determinism_and_worker_independence(self):
        csv_a = records_to_csv(run_experiment(small_spec()))
        csv_b = records_to_csv(run_experiment(small_spec()))
        csv_c = records_to_csv(run_experiment(small_spec(), workers=2))
        assert csv_a == csv_b == csv_c

    def test_regular_graph_rows_have_zero_error(self):
        g = complete_graph(10)
        spec = small_spec(
            graph_source=g, algorithms=["backmc"], c_grid=[0.5], num_targets=2
        )
        records = run_experiment(spec)
        assert records
        for rec in records:
            # The estimator side is bit-exact; the power-iteration truth
            # can sit an ulp off 1/n, so the row error is float noise.
            assert rec.estimate == 0.1
            assert rec.rel_error <= 1e-14

    def test_row_self_consistency(self):
        for rec in run_experiment(small_spec()):
            assert rec.error == ""
            assert rec.total_queries == (
                rec.deg_calls + rec.neigh_calls + rec.jump_calls
            )
            recomputed = abs(rec.ground_truth - rec.estimate) / rec.ground_truth
            assert rec.rel_error == pytest.approx(recomputed, rel=1e-12)

    def test_canonical_output_order(self):
        records = run_experiment(small_spec())
        keys = [(r.algo, r.target, r.c) for r in records]
        targets = list(dict.fromkeys(r.target for r in records if r.algo == "backmc"))
        expected = [
            (algo, t, c)
            for algo in ["backmc", "backwardpush"]
            for t in targets
            for c in [0.5, 0.3]
            for _ in range(2)
        ]
        assert keys == expected

    def test_rejects_bad_specs(self):
        with pytest.raises(ParameterError):
            small_spec(algorithms=[])
        with pytest.raises(ParameterError):
            small_spec(algorithms=["nope"])
        with pytest.raises(ParameterError):
            small_spec(c_grid=[0.7])
        with pytest.raises(ParameterError):
            small_spec(target_mode="popular")


class TestCsv:
    def test_header_matches_field_names(self):
        text = records_to_csv(run_experiment(small_spec(num_targets=1)))
        assert text.splitlines()[0] == ",".join(RECORD_FIELDS)

    def test_round_trip(self):
        records = run_experiment(small_spec(num_targets=1))
        parsed = records_from_csv(records_to_csv(records))
        assert len(parsed) == len(records)
        for a, b in zip(parsed, records):
            assert a.algo == b.algo
            assert a.target == b.target
            assert a.estimate == b.estimate  # 17 significant digits round-trip
            assert a.rel_error == b.rel_error
            assert a.total_queries == b.total_queries
            assert a.wall_time_ns == 0  # zeroed in the serialized artifact

    def test_wall_time_measured_in_memory(self):
        records = run_experiment(small_spec(num_targets=1))
        assert any(r.wall_time_ns > 0 for r in records)


class TestSummarize:
    def _record(self, **overrides):
        base = dict(
            algo="backmc",
            dataset="d",
            target=0,
            alpha=0.2,
            c=0.1,
            p_f=0.1,
            seed=1,
            estimate=0.1,
            ground_truth=0.1,
            rel_error=0.1,
            deg_calls=5,
            neigh_calls=3,
            jump_calls=0,
            total_queries=8,
            walks=1,
            moves=3,
            wall_time_ns=10,
            error="",
        )
        base.update(overrides)
        return TrialRecord(**base)

    def test_single_record_identity(self):
        row = summarize([self._record()])[0]
        assert row.mean_rel_error == 0.1
        assert row.mean_total_queries == 8
        assert row.trials == 1

    def test_mean_of_two(self):
        rows = summarize([self._record(rel_error=0.1), self._record(rel_error=0.3)])
        assert rows[0].mean_rel_error == pytest.approx(0.2)

    def test_error_rows_counted_not_averaged(self):
        rows = summarize(
            [self._record(), self._record(error="isolated-target:0.05", rel_error=math.nan)]
        )
        assert rows[0].trials == 2
        assert rows[0].failed == 1
        assert rows[0].mean_rel_error == 0.1

    def test_empty_rejected(self):
        with pytest.raises(ParameterError):
            summarize([])

    @pytest.mark.slow
    def test_walk_estimator_beats_global_mc_on_er2000(self):
        spec = small_spec(
            graph_source=ErParams(n=2000, edge_prob=10 / 1999, seed=2),
            algorithms=["backmc", "mc"],
            c_grid=[0.1],
            p_f=0.1,
            num_targets=2,
            trials_per_target=1,
        )
        rows = {r.algo: r for r in summarize(run_experiment(spec, workers=2))}
        assert rows["backmc"].mean_total_queries < rows["mc"].mean_total_queries


class TestValidateHardFamily:
    def test_scores_strictly_increase(self):
        report = validate_hard_family(
            group_size=4, hub_count=10, pad_to_n=200, max_level=2, alpha=0.2, seed=9
        )
        assert report.separated
        assert report.scores[0] < report.scores[1] < report.scores[2]
        assert all(r > 1 for r in report.ratios)
        assert report.min_ratio_gap > 0

    def test_level_zero_score_at_least_teleport_floor(self):
        report = validate_hard_family(
            group_size=4, hub_count=10, pad_to_n=200, max_level=2, alpha=0.2, seed=9
        )
        assert report.scores[0] >= 0.2 / 200

    def test_deterministic(self):
        kwargs = dict(
            group_size=3, hub_count=6, pad_to_n=80, max_level=2, alpha=0.2, seed=21
        )
        assert validate_hard_family(**kwargs) == validate_hard_family(**kwargs)
