"""
Tests for the exact labeling search
"""

import itertools
from collections import Counter

import pytest

from evroute.errors import ExplosionGuard, GuardExceeded, InvalidParameter, RoundGuardExceeded
from evroute.graph import BiWeight, QueryGoal, RoadGraph, pareto_filter
from evroute.ingest import PartitionInstance, gen_random_graph
from evroute.pareto import (
    LabelTable, ParetoConfig, check_oracle_guard, enumerate_all_targets, enumerate_paths_oracle,
    ev_pareto_frontier, fastest_within, feasible, pareto_frontier, replay_weight
)


class TestParetoFrontier:
    def test_d1_frontier(self, d1):
        table = pareto_frontier(d1, 0)
        assert table.frontier(2).weights() == [(8, 40), (14, 25), (20, 10)]

    def test_source_holds_empty_path(self, d1, g2):
        assert pareto_frontier(d1, 0).frontier(0).weights() == [(0, 0)]
        assert pareto_frontier(g2, 2).frontier(2).weights() == [(0, 0)]

    def test_g2_frontier(self, g2):
        assert pareto_frontier(g2, 0).frontier(2).weights() == [(3, 19), (8, 14), (10, 11), (15, 6)]

    def test_unreachable_vertex_is_empty(self, g2):
        table = pareto_frontier(g2, 1)
        assert not table.reachable(0)
        assert table.reachable_count() == 2

    def test_predecessor_links_reconstruct_paths(self, g2):
        table = pareto_frontier(g2, 0)
        for label in table.labels(2):
            edges = LabelTable.path_edges(label)
            assert g2.weight_of(edges) == label.weight
        assert LabelTable.path_edges(table.label_for(2, BiWeight(8, 14))) == [0, 3]

    def test_negative_cycle_trips_round_guard(self):
        g = RoadGraph.from_edges(2, [(0, 1, 1, -5), (1, 0, 1, -5)])
        with pytest.raises(RoundGuardExceeded):
            pareto_frontier(g, 0)

    def test_matches_enumeration_on_random_graphs(self):
        for seed in range(120):
            n = 3 + seed % 8
            m = n + seed % (n + 1)
            g = gen_random_graph(n, m, max_weight=20, seed=seed, acyclic=seed % 2 == 0)
            table = pareto_frontier(g, 0)
            walks = enumerate_all_targets(g, 0, n - 1)
            for v in range(n):
                assert table.frontier(v) == pareto_filter(walks[v]), f"seed {seed}, vertex {v}"


class TestEvFrontier:
    def test_loop_required_at_small_capacity(self, chain_with_loop):
        assert ev_pareto_frontier(chain_with_loop, 0, 10).frontier(2).weights() == [(260, 8)]

    def test_both_routes_at_larger_capacity(self, chain_with_loop):
        assert ev_pareto_frontier(chain_with_loop, 0, 20).frontier(2).weights() == [(200, 16), (260, 8)]

    def test_capacity_boundary_is_feasible(self):
        g = RoadGraph.from_edges(2, [(0, 1, 5, 7)])
        assert ev_pareto_frontier(g, 0, 7).frontier(1).weights() == [(5, 7)]
        assert ev_pareto_frontier(g, 0, 6).frontier(1).weights() == []

    def test_labels_replay_with_clamp(self, chain_with_loop):
        table = ev_pareto_frontier(chain_with_loop, 0, 10)
        label = table.labels(2)[0]
        edges = LabelTable.path_edges(label)
        assert edges == [0, 2, 1]
        assert replay_weight(chain_with_loop, edges, table.config) == (260, 8)
        assert replay_weight(chain_with_loop, [0, 1], table.config) is None

    def test_raising_capacity_never_shrinks_reachability(self):
        for seed in range(20):
            g = gen_random_graph(8, 16, max_weight=20, seed=seed)
            previous = set()
            for capacity in (5, 10, 20, 40, 80):
                table = ev_pareto_frontier(g, 0, capacity)
                reached = {v for v in range(g.n) if table.reachable(v)}
                assert previous <= reached
                previous = reached

    def test_capacity_must_be_positive(self):
        with pytest.raises(InvalidParameter):
            ParetoConfig(capacity=0)

    def test_round_guard_defaults(self):
        assert ParetoConfig().round_guard(5) == 5
        assert ParetoConfig.for_battery(10).round_guard(5) == 55
        assert ParetoConfig(max_relaxation_rounds=3).round_guard(5) == 3


class TestEnumerationOracle:
    def test_d1_multiset(self, d1):
        found = enumerate_paths_oracle(d1, 0, 2, 2)
        assert found == Counter({(20, 10): 1, (14, 25): 2, (8, 40): 1})

    def test_empty_path(self, d1):
        assert enumerate_paths_oracle(d1, 0, 0, 0) == Counter({(0, 0): 1})

    def test_g2_set(self, g2):
        assert set(enumerate_paths_oracle(g2, 0, 2, 2)) == {(3, 19), (8, 14), (10, 11), (15, 6)}

    def test_budget_guard(self):
        g = RoadGraph.from_edges(2, [(0, 1, 1, 1), (1, 0, 1, 1), (0, 1, 2, 2), (1, 0, 2, 2)])
        with pytest.raises(ExplosionGuard):
            enumerate_paths_oracle(g, 0, 1, 30, node_budget=1000)


class TestFeasible:
    def test_d1_goals(self, d1):
        table = pareto_frontier(d1, 0)
        assert feasible(table, 2, QueryGoal(15, 30)) == (14, 25)
        assert feasible(table, 2, QueryGoal(7, 30)) is None
        assert feasible(table, 0, QueryGoal(0, 0)) == (0, 0)
        label = fastest_within(table, 2, QueryGoal(max_energy=30))
        assert label.weight == (14, 25)

    def test_oracle_guard(self, d1):
        check_oracle_guard(d1, 100, guard=300)
        with pytest.raises(GuardExceeded):
            check_oracle_guard(d1, 101, guard=300)


def has_equal_split(values):
    total = sum(values)
    if total % 2:
        return False
    return any(sum(c) * 2 == total
               for r in range(len(values) + 1)
               for c in itertools.combinations(values, r))


class TestPartitionReduction:
    @pytest.mark.parametrize('values, expected_bound, expected', [
        ((1, 2, 3), 6, True),
        ((1, 1, 1), 4, False),
        ((2, 2), 4, True),
    ])
    def test_examples(self, values, expected_bound, expected):
        instance = PartitionInstance.build(values)
        assert instance.graph.n == len(values) + 1
        assert instance.graph.m == 2 * len(values)
        assert instance.goal == QueryGoal(expected_bound, expected_bound)
        table = pareto_frontier(instance.graph, 0)
        assert (feasible(table, len(values), instance.goal) is not None) == expected

    def test_agrees_with_subset_sum(self):
        import random
        rng = random.Random(2024)
        for _ in range(500):
            values = [rng.randint(1, 10) for _ in range(rng.randint(1, 8))]
            instance = PartitionInstance.build(values)
            table = pareto_frontier(instance.graph, 0)
            found = feasible(table, len(values), instance.goal) is not None
            assert found == has_equal_split(values), values
