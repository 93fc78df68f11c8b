"""
Tests for two-phase scoring and route reconstruction
"""

import pytest

from evroute.errors import InvalidParameter, NoFeasibleRoute, WeightOverflow
from evroute.graph import BiWeight, QueryGoal, RoadGraph, dominates
from evroute.ingest import gen_random_graph
from evroute.pareto import pareto_frontier
from evroute.two_phase import (
    PlanStep, TwoPhaseScore, best_two_phase, pareto_of_scores, score_table, two_phase_scores
)
from evroute.utility_search import PreferencePair, SearchStats


class TestTwoPhaseScores:
    def test_g2_reaches_every_pareto_point(self, g2, fast_eco):
        points = pareto_of_scores(two_phase_scores(g2, 0, 2, fast_eco))
        assert points.weights() == [(3, 19), (8, 14), (10, 11), (15, 6)]

    def test_g2_default_prefs_frontier(self, g2, default_prefs):
        points = pareto_of_scores(two_phase_scores(g2, 0, 2, default_prefs))
        assert points.weights() == [(3, 19), (8, 14), (10, 11), (15, 6)]

    def test_scores_are_ordered_by_switch_vertex_then_styles(self, g2, fast_eco):
        scores = two_phase_scores(g2, 0, 2, fast_eco)
        keys = [(sc.switch_vertex, sc.style_out, sc.style_in) for sc in scores]
        assert keys == sorted(keys)
        assert scores[0] == TwoPhaseScore(0, 0, 0, BiWeight(3, 19))
        assert len(scores) == 12

    def test_every_score_is_a_real_route(self):
        prefs = [PreferencePair(1, 0), PreferencePair(1, 1), PreferencePair(0, 1)]
        for seed in range(25):
            g = gen_random_graph(12, 30, seed=seed)
            table = score_table(g, 0, 5, prefs)
            for score in table.scores():
                route = table.route(score)
                assert route.recomputed_weight(g) == score.weight
                walk = route.walk(g, 0)
                assert walk[0] == 0 and walk[-1] == 5
                assert score.switch_vertex in walk

    def test_scores_never_beat_the_exact_frontier(self):
        prefs = [PreferencePair(1, 0), PreferencePair(1, 1), PreferencePair(0, 1)]
        for seed in range(25):
            g = gen_random_graph(10, 25, seed=seed)
            exact = pareto_frontier(g, 0).frontier(7)
            found = pareto_of_scores(two_phase_scores(g, 0, 7, prefs))
            assert len(found) == 0 or len(exact) > 0
            for p in found:
                assert not any(dominates(p, q) for q in exact)
                assert p in exact or any(dominates(q, p) for q in exact)
            if len(exact):
                # the pure-time and pure-energy trees pin both ends
                assert exact.weights()[0] in found
                assert exact.weights()[-1] in found

    def test_stats_count_trees_and_combinations(self, g2, default_prefs):
        stats = SearchStats()
        two_phase_scores(g2, 0, 2, default_prefs, stats)
        assert stats.tree_builds == 2 * len(default_prefs)
        assert stats.score_combinations == len(default_prefs) ** 2 * g2.n

    def test_min_energy(self, g2, fast_eco):
        assert score_table(g2, 0, 2, fast_eco).min_energy() == 6
        assert score_table(g2, 2, 0, fast_eco).min_energy() is None

    def test_bad_queries(self, g2, fast_eco):
        with pytest.raises(InvalidParameter):
            two_phase_scores(g2, 0, 2, [])
        with pytest.raises(InvalidParameter):
            two_phase_scores(g2, 0, 3, fast_eco)


class TestBestTwoPhase:
    def test_energy_bound_forces_a_switch(self, g2, fast_eco):
        route = best_two_phase(g2, 0, 2, fast_eco, QueryGoal(max_energy=14))
        assert route.weight == (8, 14)
        assert route.edges == (0, 3)
        assert route.switch_vertex == 1
        assert (route.score.style_out, route.score.style_in) == (0, 1)

    def test_loose_bound_takes_fastest(self, g2, fast_eco):
        route = best_two_phase(g2, 0, 2, fast_eco, QueryGoal(max_energy=30))
        assert route.weight == (3, 19)
        assert route.recomputed_weight(g2) == (3, 19)

    def test_default_prefs_switch_fast_to_energy_saving(self, g2, default_prefs):
        route = best_two_phase(g2, 0, 2, default_prefs, QueryGoal(max_energy=14))
        assert route.score == TwoPhaseScore(1, 0, 2, BiWeight(8, 14))

    def test_infeasible_bounds(self, g2, fast_eco):
        with pytest.raises(NoFeasibleRoute):
            best_two_phase(g2, 0, 2, fast_eco, QueryGoal(max_energy=5))
        with pytest.raises(NoFeasibleRoute):
            best_two_phase(g2, 0, 2, fast_eco, QueryGoal(max_time=2))
        with pytest.raises(NoFeasibleRoute):
            best_two_phase(g2, 2, 0, fast_eco, QueryGoal())

    def test_time_bound(self, g2, fast_eco):
        route = best_two_phase(g2, 0, 2, fast_eco, QueryGoal(max_time=9, max_energy=14))
        assert route.weight == (8, 14)

    def test_source_equals_target(self, g2, fast_eco):
        route = best_two_phase(g2, 1, 1, fast_eco, QueryGoal())
        assert route.weight == (0, 0)
        assert route.edges == ()
        assert route.plan(g2, 1, 1, fast_eco) == []

    def test_plan_with_switch(self, g2, fast_eco):
        route = best_two_phase(g2, 0, 2, fast_eco, QueryGoal(max_energy=14))
        assert route.plan(g2, 0, 2, fast_eco) == [
            PlanStep('drive', 0, 1, 'fast', (0,), 1, 10),
            PlanStep('switch', 1, 1, 'eco'),
            PlanStep('drive', 1, 2, 'eco', (3,), 7, 4),
        ]

    def test_plan_without_switch(self, g2, fast_eco):
        route = best_two_phase(g2, 0, 2, fast_eco, QueryGoal())
        steps = route.plan(g2, 0, 2, fast_eco)
        assert [step.kind for step in steps] == ['drive']
        assert steps[0].edges == (0, 2)

    def test_battery_violations(self, chain):
        route = best_two_phase(chain, 0, 2, [PreferencePair(1, 0)], QueryGoal(max_energy=20))
        assert route.battery_violations(chain, 20) == []
        assert route.battery_violations(chain, 10) == [1]

    def test_violation_hidden_by_regeneration(self):
        g = RoadGraph.from_edges(3, [(0, 1, 1, -5), (1, 2, 1, 12)])
        route = best_two_phase(g, 0, 2, [PreferencePair(1, 0)], QueryGoal(max_energy=10))
        assert route.weight == (2, 7)
        assert route.battery_violations(g, 10) == [1]


class TestWeightOverflow:
    BIG = 2 ** 62

    def test_summed_legs_outside_int64_raise(self):
        g = RoadGraph.from_edges(3, [
            (0, 1, self.BIG, 0), (0, 1, 0, 100),
            (1, 2, self.BIG, 0), (1, 2, 0, 100),
            (0, 2, 0, 0),
        ])
        prefs = [PreferencePair(1, 0), PreferencePair(0, 1)]
        with pytest.raises(WeightOverflow):
            two_phase_scores(g, 0, 2, prefs)
        with pytest.raises(WeightOverflow):
            best_two_phase(g, 0, 2, prefs, QueryGoal(max_energy=10))

    def test_tree_label_outside_int64_raises(self):
        g = RoadGraph.from_edges(3, [(0, 1, self.BIG, 0), (1, 2, self.BIG, 0)])
        with pytest.raises(WeightOverflow):
            best_two_phase(g, 0, 2, [PreferencePair(1, 0)], QueryGoal())

    def test_large_sums_inside_int64_are_kept(self):
        g = RoadGraph.from_edges(3, [(0, 1, self.BIG, 0), (1, 2, self.BIG - 1, 0)])
        route = best_two_phase(g, 0, 2, [PreferencePair(1, 0)], QueryGoal())
        assert route.weight == (2 ** 63 - 1, 0)
