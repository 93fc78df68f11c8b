"""
Two-Phase Search
Compose an outbound tree under one driving style with an inbound tree
under another, scoring every switch vertex. Reaches Pareto points a
single linear utility cannot (those off the convex hull).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidParameter, NoFeasibleRoute, WeightOverflow
from .graph import BiWeight, ParetoSet, QueryGoal, RoadGraph
from .utility_search import (
    INBOUND, OUTBOUND, PreferencePair, SearchStats, ShortestPathTree,
    extract_tree_path, shortest_tree
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwoPhaseScore:
    """Weight of driving style i up to switch_vertex, then style j"""
    switch_vertex: int
    style_out: int
    style_in: int
    weight: BiWeight


@dataclass(frozen=True)
class PlanStep:
    """One instruction of a drivable plan"""
    kind: str  # 'drive', 'switch' or 'charge'
    vertex: int
    end_vertex: int
    style: str = ''
    edges: Tuple[int, ...] = ()
    seconds: int = 0
    energy_wh: int = 0


@dataclass(frozen=True)
class TwoPhaseRoute:
    """A two-phase route: leg1 from s to the switch vertex, leg2 on to t"""
    score: TwoPhaseScore
    leg1: Tuple[int, ...]
    leg2: Tuple[int, ...]

    @property
    def edges(self) -> Tuple[int, ...]:
        return self.leg1 + self.leg2

    @property
    def weight(self) -> BiWeight:
        return self.score.weight

    @property
    def switch_vertex(self) -> int:
        return self.score.switch_vertex

    def recomputed_weight(self, g: RoadGraph) -> BiWeight:
        return g.weight_of(self.edges)

    def walk(self, g: RoadGraph, start: int) -> List[int]:
        """Vertex sequence of the route starting at `start`."""
        vertices = [start]
        for eid in self.edges:
            vertices.append(int(g.head[eid]))
        return vertices

    def plan(self, g: RoadGraph, start: int, end: int, prefs: Sequence[PreferencePair]) -> List[PlanStep]:
        """Drive steps for each non-empty leg, with a switch step between different styles."""
        steps = []
        style_out = prefs[self.score.style_out].label
        style_in = prefs[self.score.style_in].label
        if self.leg1:
            t, e = g.weight_of(self.leg1)
            steps.append(PlanStep('drive', start, self.switch_vertex, style_out, self.leg1, t, e))
        if self.leg1 and self.leg2 and style_out != style_in:
            steps.append(PlanStep('switch', self.switch_vertex, self.switch_vertex, style_in))
        if self.leg2:
            t, e = g.weight_of(self.leg2)
            steps.append(PlanStep('drive', self.switch_vertex, end, style_in, self.leg2, t, e))
        return steps

    def battery_violations(self, g: RoadGraph, capacity: int) -> List[int]:
        """
        Edge positions where the running energy (clamped at zero, starting
        from a full battery) exceeds capacity. Scores are checked on their
        sums only, so a leg can dip below empty in between.
        """
        violations = []
        energy = 0
        for position, eid in enumerate(self.edges):
            energy = max(0, energy + int(g.energy[eid]))
            if energy > capacity:
                violations.append(position)
        return violations


class ScoreTable:
    """
    All (i, j, v) two-phase sums held as (c, c, n) numpy arrays.

    Entry [i, j, v] is out_i(v) + in_j(v), valid where both trees reach v.
    """

    def __init__(self, out_trees: Sequence[ShortestPathTree], in_trees: Sequence[ShortestPathTree]):
        self.out_trees = list(out_trees)
        self.in_trees = list(in_trees)
        out = [tree.arrays() for tree in self.out_trees]
        inn = [tree.arrays() for tree in self.in_trees]
        reached_out = np.stack([a[0] for a in out])
        reached_in = np.stack([a[0] for a in inn])
        self.valid = reached_out[:, None, :] & reached_in[None, :, :]
        self.times = self._sum(np.stack([a[1] for a in out]), np.stack([a[1] for a in inn]), 'time')
        self.energies = self._sum(np.stack([a[2] for a in out]), np.stack([a[2] for a in inn]), 'energy')

    def _sum(self, out: np.ndarray, inn: np.ndarray, what: str) -> np.ndarray:
        """out[i, v] + inn[j, v] as (c, c, n); raises WeightOverflow instead of wrapping."""
        bounds = np.iinfo(np.int64)
        a = out[:, None, :]
        b = inn[None, :, :]
        overflow = (a > bounds.max - np.maximum(b, 0)) | (a < bounds.min - np.minimum(b, 0))
        overflow &= self.valid
        if overflow.any():
            i, j, v = (int(x[0]) for x in np.nonzero(overflow))
            raise WeightOverflow(f"two-phase {what} at switch vertex {v} (styles {i}, {j}) "
                                 f"outside the 64-bit integer range")
        return a + b

    @property
    def combinations(self) -> int:
        return int(self.valid.size)

    def _mask(self, goal: Optional[QueryGoal]) -> np.ndarray:
        mask = self.valid.copy()
        if goal is not None:
            if goal.max_time is not None:
                mask &= self.times <= goal.max_time
            if goal.max_energy is not None:
                mask &= self.energies <= goal.max_energy
        return mask

    def scores(self, goal: QueryGoal = None) -> List[TwoPhaseScore]:
        """Every valid score, ordered by (switch vertex, i, j)."""
        mask = self._mask(goal)
        i_idx, j_idx, v_idx = np.nonzero(mask)
        times = self.times[mask]
        energies = self.energies[mask]
        order = np.lexsort((j_idx, i_idx, v_idx))
        return [
            TwoPhaseScore(int(v_idx[k]), int(i_idx[k]), int(j_idx[k]),
                          BiWeight(int(times[k]), int(energies[k])))
            for k in order
        ]

    def best(self, goal: QueryGoal = None) -> Optional[TwoPhaseScore]:
        """
        Minimum-time score meeting the goal; ties go to smaller energy,
        then smaller (switch vertex, i, j).
        """
        mask = self._mask(goal)
        if not mask.any():
            return None
        i_idx, j_idx, v_idx = np.nonzero(mask)
        times = self.times[mask]
        energies = self.energies[mask]
        k = np.lexsort((j_idx, i_idx, v_idx, energies, times))[0]
        return TwoPhaseScore(int(v_idx[k]), int(i_idx[k]), int(j_idx[k]),
                             BiWeight(int(times[k]), int(energies[k])))

    def min_energy(self) -> Optional[int]:
        """Smallest summed energy over all valid combinations, or None."""
        if not self.valid.any():
            return None
        return int(self.energies[self.valid].min())

    def route(self, score: TwoPhaseScore) -> TwoPhaseRoute:
        leg1 = extract_tree_path(self.out_trees[score.style_out], score.switch_vertex)
        leg2 = extract_tree_path(self.in_trees[score.style_in], score.switch_vertex)
        return TwoPhaseRoute(score, tuple(leg1), tuple(leg2))


def _check_query(g: RoadGraph, s: int, t: int, prefs: Sequence[PreferencePair]):
    if not prefs:
        raise InvalidParameter("at least one preference pair is required")
    for label, v in (('source', s), ('target', t)):
        if not 0 <= v < g.n:
            raise InvalidParameter(f"{label} {v} outside vertex range [0, {g.n})")


def build_trees(g: RoadGraph, s: int, t: int, prefs: Sequence[PreferencePair],
                stats: SearchStats = None) -> Tuple[List[ShortestPathTree], List[ShortestPathTree]]:
    """The c outbound trees at s and the c inbound trees at t."""
    out_trees = [shortest_tree(g, s, p, OUTBOUND, stats=stats) for p in prefs]
    in_trees = [shortest_tree(g, t, p, INBOUND, stats=stats) for p in prefs]
    return out_trees, in_trees


def score_table(g: RoadGraph, s: int, t: int, prefs: Sequence[PreferencePair],
                stats: SearchStats = None) -> ScoreTable:
    _check_query(g, s, t, prefs)
    out_trees, in_trees = build_trees(g, s, t, prefs, stats)
    table = ScoreTable(out_trees, in_trees)
    if stats is not None:
        stats.score_combinations += table.combinations
    return table


def two_phase_scores(g: RoadGraph, s: int, t: int, prefs: Sequence[PreferencePair],
                     stats: SearchStats = None) -> List[TwoPhaseScore]:
    """Scores for every switch vertex and every (i, j), i == j included."""
    return score_table(g, s, t, prefs, stats).scores()


def best_two_phase(g: RoadGraph, s: int, t: int, prefs: Sequence[PreferencePair],
                   goal: QueryGoal, stats: SearchStats = None) -> TwoPhaseRoute:
    """
    Fastest two-phase route meeting the goal.

    Raises:
        NoFeasibleRoute: no score satisfies the goal
    """
    table = score_table(g, s, t, prefs, stats)
    score = table.best(goal)
    if score is None:
        raise NoFeasibleRoute(f"no two-phase route from {s} to {t} with {goal.describe()}")
    route = table.route(score)
    logger.debug("two-phase %d->%d: switch at %d (%s -> %s), weight %s",
                 s, t, score.switch_vertex, prefs[score.style_out].label,
                 prefs[score.style_in].label, tuple(score.weight))
    return route


def pareto_of_scores(scores) -> ParetoSet:
    return ParetoSet(score.weight for score in scores)
