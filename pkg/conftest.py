"""
Shared fixture graphs

D1: s -> a -> t, two parallel edges per hop, (10,5) and (4,20).
G2: s -> v -> t with A=(1,10), B=(8,2) then C=(2,9), D=(7,4); its four
    s-t weights are all Pareto-optimal and (8,14) is off the convex hull.
Charger chain: s -> v -> t, (100,8) per hop, station at v.
"""

import pytest

from evroute.graph import RoadGraph
from evroute.ingest import StylePrefs, save_graph
from evroute.utility_search import PreferencePair


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run slow acceptance checks')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long-running acceptance check (needs --runslow)')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def d1():
    return RoadGraph.from_edges(3, [
        (0, 1, 10, 5),
        (0, 1, 4, 20),
        (1, 2, 10, 5),
        (1, 2, 4, 20),
    ])


@pytest.fixture
def g2():
    return RoadGraph.from_edges(3, [
        (0, 1, 1, 10),  # A
        (0, 1, 8, 2),   # B
        (1, 2, 2, 9),   # C
        (1, 2, 7, 4),   # D
    ])


@pytest.fixture
def chain():
    return RoadGraph.from_edges(3, [(0, 1, 100, 8), (1, 2, 100, 8)], chargers=[1])


@pytest.fixture
def chain_with_loop(chain):
    return chain.with_charger_loops([1], 60, 10)


@pytest.fixture
def fast_eco():
    return [PreferencePair(1, 0, 'fast'), PreferencePair(0, 1, 'eco')]


@pytest.fixture
def default_prefs():
    return list(StylePrefs.default())


@pytest.fixture
def graph_file(tmp_path):
    """Write a graph to a temporary file and return its path"""
    def write(g, name='graph.txt'):
        path = tmp_path / name
        save_graph(g, path)
        return str(path)
    return write
