"""
Pareto Labeling
Exact pseudo-polynomial vertex-labeling search and its battery-constrained
variant. This is the quality oracle the faster searches are measured
against, so it trades speed for exactness.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional

from .config import RoutingConfig
from .errors import ExplosionGuard, GuardExceeded, InvalidParameter, RoundGuardExceeded
from .graph import BiWeight, ParetoSet, QueryGoal, RoadGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParetoConfig:
    """
    Relaxation semantics for the labeling search.

    capacity: battery capacity C in Wh; labels with energy > C are discarded
    clamp_energy_at_zero: a full battery cannot absorb more energy
    max_relaxation_rounds: overrides the default round guard
    """
    capacity: Optional[int] = None
    clamp_energy_at_zero: bool = False
    max_relaxation_rounds: Optional[int] = None

    def __post_init__(self):
        if self.capacity is not None and self.capacity <= 0:
            raise InvalidParameter(f"capacity must be positive, got {self.capacity}")

    @classmethod
    def for_battery(cls, capacity: int) -> 'ParetoConfig':
        return cls(capacity=capacity, clamp_energy_at_zero=True)

    def round_guard(self, vertex_count: int) -> int:
        if self.max_relaxation_rounds is not None:
            return self.max_relaxation_rounds
        if self.capacity is None:
            return max(1, vertex_count)
        return max(1, vertex_count) * (self.capacity + 1)


@dataclass(eq=False, slots=True)
class Label:
    """A stored (time, energy) pair with its predecessor link"""
    time: int
    energy: int
    vertex: int
    edge: int  # -1 at the source
    parent: Optional['Label']
    alive: bool = True

    @property
    def weight(self) -> BiWeight:
        return BiWeight(self.time, self.energy)


class LabelTable:
    """Per-vertex Pareto sets of s-to-v weights, with predecessor links"""

    def __init__(self, source: int, sets: List[ParetoSet], config: ParetoConfig,
                 rounds: int, relaxations: int):
        self.source = source
        self.sets = sets
        self.config = config
        self.rounds = rounds
        self.relaxations = relaxations

    @property
    def vertex_count(self) -> int:
        return len(self.sets)

    def frontier(self, v: int) -> ParetoSet:
        return ParetoSet(self.sets[v])

    def labels(self, v: int) -> List[Label]:
        return self.sets[v].payloads()

    def reachable(self, v: int) -> bool:
        return len(self.sets[v]) > 0

    def reachable_count(self) -> int:
        return sum(1 for s in self.sets if len(s))

    def label_count(self) -> int:
        return sum(len(s) for s in self.sets)

    def label_for(self, v: int, weight: BiWeight) -> Optional[Label]:
        for w, label in self.sets[v].items():
            if w == weight:
                return label
        return None

    @staticmethod
    def path_edges(label: Label) -> List[int]:
        """Edge ids from the source to the label's vertex."""
        edges = []
        while label.parent is not None:
            edges.append(label.edge)
            label = label.parent
        edges.reverse()
        return edges


def replay_weight(g: RoadGraph, edge_ids: List[int], config: ParetoConfig = None) -> Optional[BiWeight]:
    """
    Recompute a path weight step by step with the config's clamp and
    capacity rules. Returns None when the battery would be depleted.
    """
    config = config or ParetoConfig()
    time = energy = 0
    for eid in edge_ids:
        time += int(g.time[eid])
        energy += int(g.energy[eid])
        if config.clamp_energy_at_zero and energy < 0:
            energy = 0
        if config.capacity is not None and energy > config.capacity:
            return None
    return BiWeight(time, energy)


def pareto_frontier(g: RoadGraph, s: int, cfg: ParetoConfig = None) -> LabelTable:
    """
    Relax edges until no label changes; each vertex ends with the Pareto
    frontier of its s-to-v path weights (under cfg's clamp/capacity rules).

    Label-correcting with a FIFO vertex queue processed in rounds; a round
    is one pass over the vertices queued by the previous round.
    """
    cfg = cfg or ParetoConfig()
    n = g.n
    guard = cfg.round_guard(n)
    capacity = cfg.capacity
    clamp = cfg.clamp_energy_at_zero
    _, heads, times, energies = g.columns
    adjacency = g.adjacency

    sets = [ParetoSet() for _ in range(n)]
    root = Label(0, 0, s, -1, None)
    sets[s].insert_evicting(0, 0, root)
    pending: List[List[Label]] = [[] for _ in range(n)]
    queued = [False] * n
    pending[s].append(root)
    queued[s] = True
    current = [s]
    rounds = 0
    relaxations = 0

    while current:
        rounds += 1
        if rounds > guard:
            raise RoundGuardExceeded(
                f"labeling from vertex {s} exceeded {guard} relaxation rounds "
                f"(negative cycle or pathological instance)"
            )
        following = []
        for v in current:
            batch = pending[v]
            pending[v] = []
            queued[v] = False
            for label in batch:
                if not label.alive:
                    continue
                lt = label.time
                le = label.energy
                for eid in adjacency[v]:
                    relaxations += 1
                    nt = lt + times[eid]
                    ne = le + energies[eid]
                    if clamp and ne < 0:
                        ne = 0
                    if capacity is not None and ne > capacity:
                        continue
                    w = heads[eid]
                    target = sets[w]
                    if target.is_blocked(nt, ne):
                        continue
                    child = Label(nt, ne, w, eid, label)
                    _, evicted = target.insert_evicting(nt, ne, child)
                    for old in evicted:
                        old.alive = False
                    pending[w].append(child)
                    if not queued[w]:
                        queued[w] = True
                        following.append(w)
        current = following

    table = LabelTable(s, sets, cfg, rounds, relaxations)
    logger.debug("labeling from %d: %d rounds, %d relaxations, %d labels",
                 s, rounds, relaxations, table.label_count())
    return table


def ev_pareto_frontier(g: RoadGraph, s: int, capacity: int) -> LabelTable:
    """Battery-constrained frontier: start full, clamp at zero, discard energy > C."""
    return pareto_frontier(g, s, ParetoConfig.for_battery(capacity))


def check_oracle_guard(g: RoadGraph, capacity: int, guard: int = None):
    """Refuse instances whose n*C exceeds the configured guard."""
    guard = guard if guard is not None else RoutingConfig.PARETO_GUARD
    size = g.n * max(1, capacity)
    if size > guard:
        raise GuardExceeded(
            f"n*C = {g.n}*{capacity} = {size} exceeds the oracle guard {guard}; "
            f"lower the capacity, use a smaller instance or raise EVROUTE_PARETO_GUARD"
        )


def _enumerate_walks(g: RoadGraph, s: int, max_edges: int, cfg: ParetoConfig,
                     node_budget: int, visit):
    _, heads, times, energies = g.columns
    adjacency = g.adjacency
    capacity = cfg.capacity
    clamp = cfg.clamp_energy_at_zero
    visited = 0
    stack = [(s, 0, 0, 0)]
    while stack:
        v, depth, time, energy = stack.pop()
        visited += 1
        if visited > node_budget:
            raise ExplosionGuard(f"path enumeration from {s} exceeded {node_budget} nodes")
        visit(v, time, energy)
        if depth == max_edges:
            continue
        for eid in adjacency[v]:
            ne = energy + energies[eid]
            if clamp and ne < 0:
                ne = 0
            if capacity is not None and ne > capacity:
                continue
            stack.append((heads[eid], depth + 1, time + times[eid], ne))


def enumerate_paths_oracle(g: RoadGraph, s: int, t: int, max_edges: int,
                           cfg: ParetoConfig = None, node_budget: int = None) -> Counter:
    """Multiset of weights of every s-to-t walk with at most max_edges edges."""
    cfg = cfg or ParetoConfig()
    found = Counter()

    def visit(v, time, energy):
        if v == t:
            found[BiWeight(time, energy)] += 1

    _enumerate_walks(g, s, max_edges, cfg, node_budget or RoutingConfig.ENUMERATION_BUDGET, visit)
    return found


def enumerate_all_targets(g: RoadGraph, s: int, max_edges: int,
                          cfg: ParetoConfig = None, node_budget: int = None) -> Dict[int, Counter]:
    """Same as enumerate_paths_oracle, for every target in one pass."""
    cfg = cfg or ParetoConfig()
    found: Dict[int, Counter] = {v: Counter() for v in range(g.n)}

    def visit(v, time, energy):
        found[v][BiWeight(time, energy)] += 1

    _enumerate_walks(g, s, max_edges, cfg, node_budget or RoutingConfig.ENUMERATION_BUDGET, visit)
    return found


def feasible(table: LabelTable, t: int, goal: QueryGoal) -> Optional[BiWeight]:
    """Minimum-time stored pair at t meeting the goal, or None."""
    hit = table.sets[t].first_within(goal.max_time, goal.max_energy)
    return hit[0] if hit else None


def fastest_within(table: LabelTable, t: int, goal: QueryGoal) -> Optional[Label]:
    hit = table.sets[t].first_within(goal.max_time, goal.max_energy)
    return hit[1] if hit else None
