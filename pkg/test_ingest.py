"""
Tests for graph / params / charger files and the instance generators
"""

import pytest

from evroute.errors import InvalidParameter, NonPositiveLength, ParseError, UnknownClass
from evroute.graph import BiWeight
from evroute.ingest import (
    DRIVING_STYLES, ROAD_CLASSES, DrivingParams, RoutingParams, Segment, StylePrefs,
    gen_grid, gen_partition_instance, gen_random_graph, graph_from_segments, load_chargers,
    load_graph, load_params, place_random_chargers, save_chargers, save_graph
)


def write(tmp_path, text, name='input.txt'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


class TestDrivingParams:
    def test_one_mile_examples(self):
        params = DrivingParams()
        assert params.edge_weight(1609, 'local', 'slow') == BiWeight(180, 197)
        assert params.edge_weight(1609, 'highway', 'fast') == BiWeight(51, 378)

    def test_rounds_half_away_from_zero(self):
        # 4470.4 m at 10 mph is exactly 1000 s; 0.5 s rounds up
        params = DrivingParams({**DrivingParams().table, ('local', 'slow'): (10, 197)})
        assert params.edge_weight(4470.4, 'local', 'slow').time == 1000
        assert params.edge_weight(2.2352, 'local', 'slow').time == 1

    def test_faster_styles_never_take_longer(self):
        params = DrivingParams()
        for road_class in ROAD_CLASSES:
            times = [params.edge_weight(2500, road_class, style).time for style in DRIVING_STYLES]
            assert times == sorted(times)

    def test_validation(self):
        table = dict(DrivingParams().table)
        with pytest.raises(InvalidParameter):
            DrivingParams({**table, ('local', 'fast'): (10, 202)})
        with pytest.raises(InvalidParameter):
            DrivingParams({**table, ('local', 'fast'): (30, -1)})
        del table[('primary', 'slow')]
        with pytest.raises(InvalidParameter):
            DrivingParams(table)


class TestStylePrefs:
    def test_defaults(self):
        prefs = StylePrefs.default()
        assert prefs.names == ['fast', 'balanced', 'energy-saving']
        assert [(p.alpha, p.beta) for p in prefs] == [(0.8, 0.2), (0.5, 0.5), (0.2, 0.8)]

    def test_with_pair_replaces_or_appends(self):
        prefs = StylePrefs.default().with_pair('fast', 1, 0)
        assert (prefs[0].alpha, prefs[0].beta) == (1, 0)
        assert len(prefs) == 3
        assert StylePrefs.default().with_pair('cautious', 0.1, 0.9).names[-1] == 'cautious'


class TestLoadParams:
    def test_overrides(self, tmp_path):
        path = write(tmp_path, "# tuned\nhighway.fast.speed_mph=75\nlocal.slow.wh_per_mile=190\n\n"
                               "pref.cautious=0.1,0.9\ncharge.rate_wh_per_s=50\n")
        params = load_params(path)
        assert params.driving.speed_mph('highway', 'fast') == 75
        assert params.driving.wh_per_mile('local', 'slow') == 190
        assert params.prefs.names == ['fast', 'balanced', 'energy-saving', 'cautious']
        assert params.charge_rate_wh_per_s == 50

    def test_table_is_validated_once_complete(self, tmp_path):
        # moderate drops below the old slow speed before slow is lowered
        path = write(tmp_path, "highway.fast.speed_mph=45\nhighway.moderate.speed_mph=40\n"
                               "highway.slow.speed_mph=35\n")
        params = load_params(path)
        assert [params.driving.speed_mph('highway', s) for s in DRIVING_STYLES] == [45, 40, 35]

    @pytest.mark.parametrize('text, line', [
        ("bogus=1\n", 1),
        ("# c\nhighway.fast.speed_mph=abc\n", 2),
        ("pref.x=1\n", 1),
        ("highway.fast.torque=3\n", 1),
        ("charge.rate_wh_per_s=0\n", 1),
        ("\nno equals sign\n", 2),
        ("pref.neg=-1,2\n", 1),
    ])
    def test_errors_carry_line_numbers(self, tmp_path, text, line):
        path = write(tmp_path, text)
        with pytest.raises(ParseError) as info:
            load_params(path)
        assert info.value.line_number == line
        assert f"{path}:{line}:" in str(info.value)

    def test_inconsistent_table(self, tmp_path):
        path = write(tmp_path, "highway.fast.speed_mph=40\n")
        with pytest.raises(ParseError) as info:
            load_params(path)
        assert info.value.line_number is None


class TestGraphFile:
    def test_segment_expansion(self, tmp_path):
        path = write(tmp_path, "c one mile of highway\np ev 2 1\na 1 2 1609 1\n")
        g = load_graph(path)
        assert g.n == 2 and g.m == 6
        assert g.style_count == 3
        first = g.edge(0)
        assert (first.tail, first.head, first.style, first.weight) == (0, 1, 0, (51, 378))
        back = g.edge(3)
        assert (back.tail, back.head, back.style) == (1, 0, 0)
        assert [g.edge(i).style for i in range(6)] == [0, 1, 2, 0, 1, 2]

    def test_explicit_edges_and_loops(self, tmp_path):
        path = write(tmp_path, "p ev 3 0\ne 1 2 10 5 1\ne 2 3 4 20 2\nl 2 600 -5000\n")
        g = load_graph(path)
        assert g.m == 3
        assert g.edge(1).style == 1
        assert g.edge(2).is_charger_loop
        assert g.edge(2).weight == (600, -5000)
        assert g.chargers == frozenset({1})

    @pytest.mark.parametrize('text, error, line', [
        ("a 1 2 100 1\n", ParseError, 1),
        ("p ev 2 1\na 1 2 100 5\n", UnknownClass, 2),
        ("p ev 2 1\na 1 2 0 1\n", NonPositiveLength, 2),
        ("p ev 2 1\na 1 3 100 1\n", ParseError, 2),
        ("p ev 2 1\nx 1 2\n", ParseError, 2),
        ("p ev 2 0\nl 1 600 10\n", ParseError, 2),
        ("p ev 2 0\ne 1 2 1 1 0\n", ParseError, 2),
        ("p ev 2 1\na 1 two 100 1\n", ParseError, 2),
        ("p ev 2 0\np ev 2 0\n", ParseError, 2),
        ("p ev 2 2\na 1 2 100 1\n", ParseError, None),
        ("c only a comment\n", ParseError, None),
    ])
    def test_errors(self, tmp_path, text, error, line):
        path = write(tmp_path, text)
        with pytest.raises(error) as info:
            load_graph(path)
        assert info.value.line_number == line
        assert info.value.exit_code == 2

    def test_round_trip(self, tmp_path):
        g = gen_grid(3, 4, seed=7).with_charger_loops([5], 600, 5000)
        path = tmp_path / 'grid.txt'
        save_graph(g, path, comment='grid with one charger')
        loaded = load_graph(path)
        assert loaded.n == g.n and loaded.m == g.m
        assert loaded.edge_multiset() == g.edge_multiset()
        assert loaded.chargers == g.chargers
        assert path.read_text().startswith('c grid with one charger\np ev 12 17\n')

    def test_params_change_segment_weights(self, tmp_path):
        path = write(tmp_path, "p ev 2 1\na 1 2 1609 1\n")
        slow = DrivingParams({**DrivingParams().table, ('highway', 'fast'): (60, 300)})
        assert load_graph(path, slow).edge(0).weight == (60, 300)


class TestChargerFile:
    def test_load(self, tmp_path):
        path = write(tmp_path, "3\n# depot\n1\n3  # again\n")
        assert load_chargers(path, 9) == [0, 2]

    def test_out_of_range(self, tmp_path):
        path = write(tmp_path, "1\n10\n")
        with pytest.raises(ParseError) as info:
            load_chargers(path, 9)
        assert info.value.line_number == 2

    def test_save(self, tmp_path):
        path = tmp_path / 'chargers.txt'
        save_chargers([4, 0, 4], path)
        assert path.read_text() == "1\n5\n"
        assert load_chargers(path) == [0, 4]


class TestGenerators:
    def test_grid_counts(self):
        g = gen_grid(3, 3, seed=0)
        assert g.n == 9
        assert len(g.segments) == 12
        assert g.m == 72
        assert gen_grid(1, 2).m == 6

    def test_grid_is_deterministic(self):
        assert gen_grid(4, 5, seed=3).edge_multiset() == gen_grid(4, 5, seed=3).edge_multiset()
        assert gen_grid(4, 5, seed=3).edge_multiset() != gen_grid(4, 5, seed=4).edge_multiset()

    def test_grid_class_mix(self):
        g = gen_grid(3, 3, {'local': 1.0}, seed=2)
        assert all(seg.road_class == 4 for seg in g.segments)
        assert all(100 <= seg.length_m <= 500 for seg in g.segments)
        with pytest.raises(InvalidParameter):
            gen_grid(3, 3, {'dirt': 1.0})
        with pytest.raises(InvalidParameter):
            gen_grid(0, 3)

    def test_graph_from_segments_orders_edges(self):
        g = graph_from_segments(3, [Segment(0, 1, 1609, 1), Segment(1, 2, 1609, 4)],
                                extra_edges=[(2, 0, 5, 5, 0, False)])
        assert g.m == 13
        assert g.edge(6).tail == 1 and g.edge(6).head == 2
        assert g.edge(12).weight == (5, 5)

    def test_random_graph(self):
        g = gen_random_graph(10, 40, max_weight=5, seed=1)
        assert g.m == 40
        assert all(e.tail != e.head for e in g.edges())
        assert all(0 <= e.weight.time <= 5 and 0 <= e.weight.energy <= 5 for e in g.edges())
        dag = gen_random_graph(10, 40, seed=1, acyclic=True)
        assert all(e.tail < e.head for e in dag.edges())

    def test_partition_instance(self):
        g, goal = gen_partition_instance([3, 1, 2])
        assert g.n == 4
        assert (goal.max_time, goal.max_energy) == (6, 6)
        assert sorted((e.weight.time, e.weight.energy) for e in g.edges() if e.tail == 0) == [(1, 4), (4, 1)]
        with pytest.raises(InvalidParameter):
            gen_partition_instance([])
        with pytest.raises(InvalidParameter):
            gen_partition_instance([2, 0])

    def test_random_chargers_are_nested(self):
        previous = set()
        for k in range(0, 21):
            stations = set(place_random_chargers(20, k, seed=5))
            assert len(stations) == k
            assert previous <= stations
            previous = stations
        with pytest.raises(InvalidParameter):
            place_random_chargers(20, 21)

    def test_routing_params_defaults(self):
        params = RoutingParams()
        assert params.charge_rate_wh_per_s is None
        assert params.prefs.names == StylePrefs.default().names
