"""
EV routing engine
Bicriterion (time, energy) route planning for battery-electric vehicles:
an exact Pareto oracle, two-phase driving-style routes and charging-station
itineraries
"""

from .config import RoutingConfig
from .errors import EVRouteError, NoFeasibleRoute
from .graph import BiWeight, ParetoSet, QueryGoal, RoadGraph
from .pareto import ParetoConfig, ev_pareto_frontier, pareto_frontier
from .utility_search import PreferencePair, shortest_tree, lower_left_hull
from .two_phase import TwoPhaseRoute, best_two_phase
from .charging import ChargeModel, StationIndex, build_super_graph, route_with_chargers
from .ingest import DrivingParams, StylePrefs, gen_grid, load_graph
from .experiment import ExperimentReport, run_experiment

__all__ = [
    'RoutingConfig',
    'EVRouteError',
    'NoFeasibleRoute',
    'BiWeight',
    'ParetoSet',
    'QueryGoal',
    'RoadGraph',
    'ParetoConfig',
    'ev_pareto_frontier',
    'pareto_frontier',
    'PreferencePair',
    'shortest_tree',
    'lower_left_hull',
    'TwoPhaseRoute',
    'best_two_phase',
    'ChargeModel',
    'StationIndex',
    'build_super_graph',
    'route_with_chargers',
    'DrivingParams',
    'StylePrefs',
    'gen_grid',
    'load_graph',
    'ExperimentReport',
    'run_experiment'
]
