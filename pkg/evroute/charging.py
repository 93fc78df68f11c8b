"""
Charging Station Planner
Treat s, t and the charging stations as nodes of a super graph whose
edges are the best battery-feasible two-phase legs between them, priced
as driving time plus the time to recharge what the leg consumed. A final
shortest-duration search over the super graph yields the itinerary.
"""

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidParameter, NoFeasibleRoute
from .graph import BiWeight, QueryGoal, RoadGraph
from .two_phase import PlanStep, ScoreTable, TwoPhaseRoute
from .utility_search import INBOUND, OUTBOUND, PreferencePair, SearchStats, ShortestPathTree, shortest_tree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChargeModel:
    """
    Time needed to add energy to the battery.

    Either a linear rate (Wh per second) or a monotone table of
    (energy added in Wh, seconds) breakpoints, interpolated linearly.
    """
    rate_wh_per_s: Optional[float] = None
    breakpoints: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if (self.rate_wh_per_s is None) == (not self.breakpoints):
            raise InvalidParameter("charge model needs exactly one of a rate or a breakpoint table")
        if self.rate_wh_per_s is not None:
            if not math.isfinite(self.rate_wh_per_s) or self.rate_wh_per_s <= 0:
                raise InvalidParameter(f"charge rate must be positive, got {self.rate_wh_per_s}")
            return
        points = sorted((float(e), float(s)) for e, s in self.breakpoints)
        if points[0] != (0.0, 0.0):
            if points[0][0] == 0.0:
                raise InvalidParameter("charging zero energy must take zero seconds")
            points.insert(0, (0.0, 0.0))
        for (e0, s0), (e1, s1) in zip(points, points[1:]):
            if e1 <= e0 or s1 < s0:
                raise InvalidParameter("charge breakpoints must be strictly increasing in energy "
                                       "and non-decreasing in time")
        object.__setattr__(self, 'breakpoints', tuple(points))

    @classmethod
    def linear(cls, rate_wh_per_s: float) -> 'ChargeModel':
        return cls(rate_wh_per_s=rate_wh_per_s)

    def seconds(self, energy: float) -> float:
        if self.rate_wh_per_s is not None:
            return energy / self.rate_wh_per_s
        energies = [p[0] for p in self.breakpoints]
        if energy > energies[-1]:
            raise InvalidParameter(f"charge table covers up to {energies[-1]:g} Wh, asked for {energy:g}")
        return float(np.interp(energy, energies, [p[1] for p in self.breakpoints]))


def charge_time(energy: int, model: ChargeModel) -> int:
    """Seconds to add `energy` Wh, rounded up to whole seconds."""
    if energy < 0:
        raise InvalidParameter(f"charge energy must be non-negative, got {energy}")
    if energy == 0:
        return 0
    # round first so 8 / 0.1 does not become 81 s
    return int(math.ceil(round(model.seconds(energy), 9)))


@dataclass(frozen=True)
class SuperEdge:
    """Best feasible leg between two super-graph nodes"""
    from_station: int
    to_station: int
    leg_weight: BiWeight
    duration: int
    charge_seconds: int
    embedded_route: TwoPhaseRoute


@dataclass
class SuperGraph:
    """Stations plus s and t, joined by super edges"""
    source: int
    target: int
    stations: Tuple[int, ...]
    capacity: int
    prefs: Tuple[PreferencePair, ...]
    edges: List[SuperEdge] = field(default_factory=list)

    @property
    def d(self) -> int:
        return len(self.stations)

    @property
    def nodes(self) -> Tuple[int, ...]:
        ordered = [self.source] + list(self.stations)
        if self.target != self.source:
            ordered.append(self.target)
        return tuple(ordered)

    def out_edges(self) -> Dict[int, List[SuperEdge]]:
        adjacency: Dict[int, List[SuperEdge]] = {v: [] for v in self.nodes}
        for e in self.edges:
            adjacency[e.from_station].append(e)
        return adjacency

    def edge(self, u: int, w: int) -> Optional[SuperEdge]:
        for e in self.edges:
            if e.from_station == u and e.to_station == w:
                return e
        return None


@dataclass(frozen=True)
class Itinerary:
    """Station sequence chosen on the super graph"""
    legs: Tuple[SuperEdge, ...]
    total_seconds: int

    @property
    def charge_stops(self) -> List[Tuple[int, int]]:
        """(station, seconds) for every intermediate station"""
        return [(leg.to_station, leg.charge_seconds) for leg in self.legs[:-1]]

    @property
    def driving_seconds(self) -> int:
        return sum(leg.leg_weight.time for leg in self.legs)

    @property
    def energy_wh(self) -> int:
        return sum(leg.leg_weight.energy for leg in self.legs)

    def plan(self, g: RoadGraph, prefs: Sequence[PreferencePair]) -> List[PlanStep]:
        """Expand every leg into drive / switch / charge steps."""
        steps: List[PlanStep] = []
        for position, leg in enumerate(self.legs):
            steps.extend(leg.embedded_route.plan(g, leg.from_station, leg.to_station, prefs))
            if position < len(self.legs) - 1:
                steps.append(PlanStep('charge', leg.to_station, leg.to_station,
                                      seconds=leg.charge_seconds, energy_wh=-max(0, leg.leg_weight.energy)))
        return steps

    def transitions(self, g: RoadGraph, prefs: Sequence[PreferencePair]) -> int:
        """Style changes between consecutive drive steps, across stations too."""
        styles = [step.style for step in self.plan(g, prefs) if step.kind == 'drive']
        return sum(1 for a, b in zip(styles, styles[1:]) if a != b)


def _trees(g: RoadGraph, root: int, prefs: Sequence[PreferencePair], direction: str,
           stats: SearchStats) -> List[ShortestPathTree]:
    return [shortest_tree(g, root, p, direction, stats=stats) for p in prefs]


def _energy_lower_bound(out_trees: Sequence[ShortestPathTree], in_trees: Sequence[ShortestPathTree]) -> float:
    """
    Exact minimum summed energy over all (i, j, v); the sum separates, so
    this is O(c n) instead of the O(c^2 n) sweep.
    """
    def column_min(trees):
        rows = []
        for tree in trees:
            reached, _, energies = tree.arrays()
            rows.append(np.where(reached, energies.astype(np.float64), np.inf))
        return np.min(np.stack(rows), axis=0)

    return float(np.min(column_min(out_trees) + column_min(in_trees)))


def _make_edge(u: int, w: int, out_trees, in_trees, capacity: int, model: ChargeModel,
               recharge: bool, stats: SearchStats = None) -> Optional[SuperEdge]:
    if _energy_lower_bound(out_trees, in_trees) > capacity:
        logger.debug("station pair %d->%d pruned: no leg within %d Wh", u, w, capacity)
        return None
    table = ScoreTable(out_trees, in_trees)
    if stats is not None:
        stats.score_combinations += table.combinations
    score = table.best(QueryGoal(max_energy=capacity))
    if score is None:
        return None
    charge = charge_time(max(0, score.weight.energy), model) if recharge else 0
    return SuperEdge(u, w, score.weight, score.weight.time + charge, charge, table.route(score))


class StationIndex:
    """
    Trees and station-to-station super edges precomputed once for a fixed
    station set, so each query only builds the trees at s and t.
    """

    def __init__(self, g: RoadGraph, stations: Iterable[int], prefs: Sequence[PreferencePair],
                 capacity: int, model: ChargeModel, stats: SearchStats = None):
        if capacity <= 0:
            raise InvalidParameter(f"capacity must be positive, got {capacity}")
        if not prefs:
            raise InvalidParameter("at least one preference pair is required")
        self.graph = g
        self.stations = tuple(sorted(set(int(z) for z in stations)))
        for z in self.stations:
            if not 0 <= z < g.n:
                raise InvalidParameter(f"station {z} outside vertex range [0, {g.n})")
        self.prefs = tuple(prefs)
        self.capacity = capacity
        self.model = model
        self.out_trees = {z: _trees(g, z, self.prefs, OUTBOUND, stats) for z in self.stations}
        self.in_trees = {z: _trees(g, z, self.prefs, INBOUND, stats) for z in self.stations}
        self.edges: Dict[Tuple[int, int], SuperEdge] = {}
        for u in self.stations:
            for w in self.stations:
                if u == w:
                    continue
                edge = _make_edge(u, w, self.out_trees[u], self.in_trees[w], capacity, model, True, stats)
                if edge is not None:
                    self.edges[(u, w)] = edge
        logger.debug("station index: %d stations, %d super edges", len(self.stations), len(self.edges))

    def matches(self, g: RoadGraph, prefs: Sequence[PreferencePair], capacity: int, model: ChargeModel) -> bool:
        return (g is self.graph and tuple(prefs) == self.prefs
                and capacity == self.capacity and model == self.model)


def build_super_graph(g: RoadGraph, stations: Iterable[int], s: int, t: int,
                      prefs: Sequence[PreferencePair], capacity: int, model: ChargeModel,
                      stats: SearchStats = None, index: StationIndex = None) -> SuperGraph:
    """
    Build G' over {s, t} and the stations.

    Every super edge carries the fastest two-phase leg with energy <= C.
    Edges into t are priced at driving time only; the others add the time
    to recharge the leg's energy.
    """
    for label, v in (('source', s), ('target', t)):
        if not 0 <= v < g.n:
            raise InvalidParameter(f"{label} {v} outside vertex range [0, {g.n})")
    if index is None:
        index = StationIndex(g, set(stations) - {s, t}, prefs, capacity, model, stats)
    elif not index.matches(g, prefs, capacity, model):
        raise InvalidParameter("station index was built for a different graph, preference set, capacity or model")
    elif set(index.stations) != set(stations) - {s, t} and set(index.stations) != set(stations):
        raise InvalidParameter("station index was built for a different station set")

    inner = tuple(z for z in index.stations if z not in (s, t))
    sg = SuperGraph(s, t, inner, capacity, tuple(prefs))
    if s == t:
        return sg

    s_out = _trees(g, s, prefs, OUTBOUND, stats)
    t_in = _trees(g, t, prefs, INBOUND, stats)

    for w in inner:
        edge = _make_edge(s, w, s_out, index.in_trees[w], capacity, model, True, stats)
        if edge is not None:
            sg.edges.append(edge)
    direct = _make_edge(s, t, s_out, t_in, capacity, model, False, stats)
    if direct is not None:
        sg.edges.append(direct)
    for u in inner:
        for w in inner:
            if (u, w) in index.edges:
                sg.edges.append(index.edges[(u, w)])
        edge = _make_edge(u, t, index.out_trees[u], t_in, capacity, model, False, stats)
        if edge is not None:
            sg.edges.append(edge)
    logger.debug("super graph %d->%d: %d stations, %d edges", s, t, sg.d, len(sg.edges))
    return sg


def route_with_chargers(sg: SuperGraph, s: int, t: int) -> Itinerary:
    """
    Minimum-duration station sequence from s to t.

    Raises:
        NoFeasibleRoute: t is not reachable in the super graph
    """
    if s == t:
        return Itinerary((), 0)
    adjacency = sg.out_edges()
    if s not in adjacency or t not in adjacency:
        raise InvalidParameter(f"super graph was built for {sg.source}->{sg.target}, not {s}->{t}")

    best = {s: (0, 0)}
    parent: Dict[int, SuperEdge] = {}
    done = set()
    heap = [(0, 0, s)]
    while heap:
        duration, hops, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == t:
            break
        for edge in adjacency[v]:
            w = edge.to_station
            key = (duration + edge.duration, hops + 1)
            if w not in done and (w not in best or key < best[w]):
                best[w] = key
                parent[w] = edge
                heapq.heappush(heap, key + (w,))

    if t not in done:
        raise NoFeasibleRoute(
            f"no itinerary from {s} to {t} with capacity {sg.capacity} Wh and {sg.d} stations"
        )
    legs = []
    v = t
    while v != s:
        edge = parent[v]
        legs.append(edge)
        v = edge.from_station
    legs.reverse()
    return Itinerary(tuple(legs), best[t][0])
