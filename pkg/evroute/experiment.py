"""
Experiment Runner
Measures how close the two-phase search comes to the exact oracle:
reachability and slowdown per battery capacity, plus an optional sweep
over the number of randomly placed charging stations.
"""

import logging
import time
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from .charging import ChargeModel, StationIndex, build_super_graph, route_with_chargers
from .config import RoutingConfig
from .errors import GuardExceeded, InvalidParameter, NoFeasibleRoute
from .graph import QueryGoal, RoadGraph
from .ingest import place_random_chargers
from .pareto import check_oracle_guard, ev_pareto_frontier
from .two_phase import ScoreTable, best_two_phase
from .utility_search import INBOUND, OUTBOUND, PreferencePair, SearchStats, shortest_tree

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    'capacity_wh',
    'chargers',
    'targets',
    'disconnected_targets',
    'oracle_reachable_nodes',
    'oracle_reachable_pct',
    'two_phase_reached',
    'two_phase_reachability_pct',
    'mean_slowdown_pct',
    'max_slowdown_pct',
    'mean_route_seconds',
    'wall_seconds',
]


@dataclass
class ExperimentRow:
    """One CSV row; None renders as an empty cell"""
    capacity_wh: int
    chargers: int
    targets: int
    disconnected_targets: int
    oracle_reachable_nodes: Optional[int] = None
    oracle_reachable_pct: Optional[float] = None
    two_phase_reached: int = 0
    two_phase_reachability_pct: Optional[float] = None
    mean_slowdown_pct: Optional[float] = None
    max_slowdown_pct: Optional[float] = None
    mean_route_seconds: Optional[float] = None
    wall_seconds: Optional[float] = None


def _cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


class ExperimentReport:
    """Rows in (chargers, capacity) order"""

    def __init__(self, rows: List[ExperimentRow], source: int, target_ids: List[int], seed: int):
        self.rows = rows
        self.source = source
        self.target_ids = target_ids
        self.seed = seed

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, capacity: int, chargers: int = 0) -> Optional[ExperimentRow]:
        for r in self.rows:
            if r.capacity_wh == capacity and r.chargers == chargers:
                return r
        return None

    def to_csv(self, path=None) -> Optional[str]:
        """Fixed columns, header always present, '.' decimals."""
        cells = pd.DataFrame([[_cell(getattr(r, c)) for c in REPORT_COLUMNS] for r in self.rows],
                             columns=REPORT_COLUMNS, dtype=object)
        return cells.to_csv(path, index=False, lineterminator='\n')


def sample_targets(vertex_count: int, count: int, seed: int) -> List[int]:
    """Uniform with replacement, reproducible per seed."""
    if count < 1:
        raise InvalidParameter(f"need at least one target, got {count}")
    if vertex_count < 1:
        raise InvalidParameter("cannot sample targets from an empty graph")
    rng = np.random.default_rng(seed)
    return [int(v) for v in rng.integers(0, vertex_count, size=count)]


def _percent(part: int, whole: int) -> Optional[float]:
    return 100.0 * part / whole if whole else None


def _slowdown(route_time: int, optimal_time: int) -> float:
    if optimal_time == 0:
        return 0.0
    return 100.0 * (route_time - optimal_time) / optimal_time


def run_experiment(g: RoadGraph, source: Optional[int], num_targets: int, capacities: Sequence[int],
                   prefs: Sequence[PreferencePair], seed: int = 0, targets: Iterable[int] = None,
                   charger_counts: Sequence[int] = (0,), charge_model: ChargeModel = None,
                   timing: bool = False, oracle_guard: int = None,
                   stations: Iterable[int] = None) -> ExperimentReport:
    """
    Args:
        g: road graph
        source: start vertex, or None to draw it from the seed
        num_targets: targets sampled uniformly by seed (ignored if targets given)
        capacities: battery capacities in Wh
        prefs: preference pairs for the two-phase search
        seed: sampling seed; also places the chargers
        targets: explicit target list
        charger_counts: station counts to sweep; 0 means the oracle comparison
        charge_model: needed when any charger count is positive
        timing: fill wall_seconds with the mean end-to-end query time
        oracle_guard: max n*C for the oracle (RoutingConfig.PARETO_GUARD by default)
        stations: fixed station set; adds one charger row per capacity after the sweep

    Returns:
        ExperimentReport with one row per (charger count, capacity), then one
        per capacity for the fixed stations
    """
    if not prefs:
        raise InvalidParameter("at least one preference pair is required")
    capacities = [int(c) for c in capacities]
    if not capacities or any(c <= 0 for c in capacities):
        raise InvalidParameter(f"capacities must be positive, got {capacities}")
    fixed = sorted(set(int(z) for z in stations)) if stations is not None else []
    if (fixed or any(k > 0 for k in charger_counts)) and charge_model is None:
        raise InvalidParameter("a charge rate is required for charger sweeps")
    for z in fixed:
        if not 0 <= z < g.n:
            raise InvalidParameter(f"station {z} outside vertex range [0, {g.n})")

    rng = np.random.default_rng(seed)
    if source is None:
        source = int(rng.integers(0, g.n))
    if not 0 <= source < g.n:
        raise InvalidParameter(f"source {source} outside vertex range [0, {g.n})")
    target_ids = [int(t) for t in targets] if targets is not None else sample_targets(g.n, num_targets, seed)
    for t in target_ids:
        if not 0 <= t < g.n:
            raise InvalidParameter(f"target {t} outside vertex range [0, {g.n})")
    guard = oracle_guard if oracle_guard is not None else RoutingConfig.PARETO_GUARD

    stats = SearchStats()
    out_trees = [shortest_tree(g, source, p, OUTBOUND, stats=stats) for p in prefs]
    connected = out_trees[0]
    disconnected = sum(1 for t in target_ids if not connected.reachable(t))

    # capacity-independent, one score table per distinct target
    tables = {}
    for t in target_ids:
        if t not in tables:
            in_trees = [shortest_tree(g, t, p, INBOUND, stats=stats) for p in prefs]
            tables[t] = ScoreTable(out_trees, in_trees)
    logger.info("experiment from %d: %d targets, %d tree builds", source, len(target_ids), stats.tree_builds)

    rows = []
    for k in charger_counts:
        for capacity in capacities:
            if k == 0:
                row = _oracle_row(g, source, target_ids, capacity, prefs, tables, guard, timing)
            else:
                placed = place_random_chargers(g.n, k, seed)
                row = _charger_row(g, source, target_ids, capacity, prefs, placed, charge_model, timing)
            row.disconnected_targets = disconnected
            rows.append(row)
    if fixed:
        for capacity in capacities:
            row = _charger_row(g, source, target_ids, capacity, prefs, fixed, charge_model, timing)
            row.disconnected_targets = disconnected
            rows.append(row)
    return ExperimentReport(rows, source, target_ids, seed)


def _oracle_row(g, source, target_ids, capacity, prefs, tables, guard, timing) -> ExperimentRow:
    goal = QueryGoal(max_energy=capacity)
    row = ExperimentRow(capacity, 0, len(target_ids), 0)
    found = {t: table.best(goal) for t, table in tables.items()}

    oracle = None
    try:
        check_oracle_guard(g, capacity, guard)
        oracle = ev_pareto_frontier(g, source, capacity)
    except GuardExceeded as e:
        logger.warning("oracle skipped at %d Wh: %s", capacity, e)

    reached_times = [found[t].weight.time for t in target_ids if found[t] is not None]
    row.two_phase_reached = len(reached_times)
    if reached_times:
        row.mean_route_seconds = float(np.mean(reached_times))

    if oracle is None:
        row.two_phase_reachability_pct = _percent(row.two_phase_reached, len(target_ids))
    else:
        row.oracle_reachable_nodes = oracle.reachable_count()
        row.oracle_reachable_pct = _percent(row.oracle_reachable_nodes, g.n)
        oracle_targets = [t for t in target_ids if oracle.reachable(t)]
        beyond = sorted({t for t in target_ids if found[t] is not None and not oracle.reachable(t)})
        if beyond:
            logger.warning("two-phase reached %d target(s) the oracle cannot reach at %d Wh: %s",
                           len(beyond), capacity, beyond[:10])
        both = [t for t in oracle_targets if found[t] is not None]
        row.two_phase_reachability_pct = _percent(len(both), len(oracle_targets))
        slowdowns = [_slowdown(found[t].weight.time, oracle.sets[t].weights()[0].time) for t in both]
        if slowdowns:
            row.mean_slowdown_pct = float(np.mean(slowdowns))
            row.max_slowdown_pct = float(np.max(slowdowns))

    if timing:
        elapsed = []
        for t in target_ids:
            started = time.perf_counter()
            try:
                best_two_phase(g, source, t, prefs, goal)
            except NoFeasibleRoute:
                pass
            elapsed.append(time.perf_counter() - started)
        row.wall_seconds = float(np.mean(elapsed))
    return row


def _charger_row(g, source, target_ids, capacity, prefs, stations, model, timing) -> ExperimentRow:
    row = ExperimentRow(capacity, len(stations), len(target_ids), 0)
    index = StationIndex(g, stations, prefs, capacity, model)
    totals = []
    elapsed = []
    for t in target_ids:
        started = time.perf_counter()
        try:
            sg = build_super_graph(g, stations, source, t, prefs, capacity, model, index=index)
            totals.append(route_with_chargers(sg, source, t).total_seconds)
        except NoFeasibleRoute:
            pass
        elapsed.append(time.perf_counter() - started)
    row.two_phase_reached = len(totals)
    row.two_phase_reachability_pct = _percent(len(totals), len(target_ids))
    if totals:
        row.mean_route_seconds = float(np.mean(totals))
    if timing:
        row.wall_seconds = float(np.mean(elapsed))
    logger.info("chargers=%d capacity=%d: %d/%d targets reached", len(stations), capacity,
                len(totals), len(target_ids))
    return row
