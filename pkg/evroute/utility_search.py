"""
Utility Search
Single-phase optimal paths under a linear utility alpha*time + beta*energy.

Priority-queue search when every scalarized edge cost is non-negative,
label-correcting (queue-based Bellman-Ford) otherwise. Trees are built
outbound from a root or inbound into it, with the bicriterion weight of
the tree path stored at every vertex.
"""

import heapq
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from .errors import GraphError, InvalidParameter, NegativeScalarCycle, Unreachable, WeightOverflow
from .graph import BiWeight, ParetoSet, RoadGraph

logger = logging.getLogger(__name__)

OUTBOUND = 'outbound'
INBOUND = 'inbound'

# Scalarized edge costs above -NEGATIVE_TOLERANCE count as non-negative
NEGATIVE_TOLERANCE = 1e-9
RELATIVE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PreferencePair:
    """Coefficients of a driving style's linear utility"""
    alpha: float
    beta: float
    name: str = field(default='', compare=False)

    def __post_init__(self):
        for label, value in (('alpha', self.alpha), ('beta', self.beta)):
            if not math.isfinite(value) or value < 0:
                raise InvalidParameter(f"preference {label} must be a non-negative real, got {value}")
        if self.alpha + self.beta <= 0:
            raise InvalidParameter("preference pair needs alpha + beta > 0")

    @property
    def label(self) -> str:
        return self.name or f"({self.alpha:g},{self.beta:g})"


def scalar_cost(w: BiWeight, pref: PreferencePair) -> float:
    return pref.alpha * w.time + pref.beta * w.energy


@dataclass
class SearchStats:
    """Instrumentation counters shared by the tree-based searches"""
    tree_builds: int = 0
    priority_queue_builds: int = 0
    label_correcting_builds: int = 0
    score_combinations: int = 0

    def record_build(self, method: str):
        self.tree_builds += 1
        if method == 'priority-queue':
            self.priority_queue_builds += 1
        else:
            self.label_correcting_builds += 1


class ShortestPathTree:
    """
    Union of the preference-optimal paths from (outbound) or into
    (inbound) a root. Unreached vertices have cost inf and parent -1.
    """

    def __init__(self, root: int, direction: str, pref: PreferencePair, method: str,
                 costs: List[float], times: List[int], energies: List[int],
                 parent_edge: List[int], parent_vertex: List[int]):
        self.root = root
        self.direction = direction
        self.pref = pref
        self.method = method
        self.costs = costs
        self.times = times
        self.energies = energies
        self.parent_edge = parent_edge
        self.parent_vertex = parent_vertex

    def __repr__(self) -> str:
        return (f"<ShortestPathTree {self.direction} root={self.root} pref={self.pref.label} "
                f"reached={self.reached_count()}>")

    @property
    def vertex_count(self) -> int:
        return len(self.costs)

    def reachable(self, v: int) -> bool:
        return self.costs[v] != math.inf

    def reached_count(self) -> int:
        return sum(1 for c in self.costs if c != math.inf)

    def bi_weight(self, v: int) -> BiWeight:
        if not self.reachable(v):
            raise Unreachable(f"vertex {v} not reached by the {self.direction} tree of {self.root}")
        return BiWeight(self.times[v], self.energies[v])

    def cost(self, v: int) -> float:
        return self.costs[v]

    def arrays(self):
        """(reached mask, times, energies) as numpy arrays; unreached entries are 0."""
        reached = np.isfinite(np.asarray(self.costs, dtype=np.float64))
        try:
            times = np.asarray(self.times, dtype=np.int64)
            energies = np.asarray(self.energies, dtype=np.int64)
        except OverflowError as e:
            raise WeightOverflow(f"{self.direction} tree of {self.root} holds a label outside 64-bit integers") from e
        return reached, times, energies


def _search_edges(g: RoadGraph, pref: PreferencePair) -> np.ndarray:
    costs = pref.alpha * g.time.astype(np.float64) + pref.beta * g.energy.astype(np.float64)
    return costs[~g.charger_loop]


def shortest_tree(g: RoadGraph, root: int, pref: PreferencePair, direction: str = OUTBOUND,
                  method: str = 'auto', stats: Optional[SearchStats] = None) -> ShortestPathTree:
    """
    Build the preference-optimal tree at root.

    Args:
        g: road graph (charger self-loops are ignored; stations are handled
           by the charging planner)
        root: tree root
        pref: preference pair
        direction: OUTBOUND (root to v) or INBOUND (v to root)
        method: 'auto', 'priority-queue' or 'label-correcting'
        stats: optional counters

    Ties in scalar cost prefer smaller time, then smaller energy, then the
    smaller last-edge id.
    """
    if direction not in (OUTBOUND, INBOUND):
        raise InvalidParameter(f"unknown tree direction {direction!r}")
    if not 0 <= root < g.n:
        raise InvalidParameter(f"root {root} outside vertex range [0, {g.n})")

    if method == 'auto':
        costs = _search_edges(g, pref)
        negative = bool(len(costs)) and costs.min() < -NEGATIVE_TOLERANCE
        method = 'label-correcting' if negative else 'priority-queue'
    elif method not in ('priority-queue', 'label-correcting'):
        raise InvalidParameter(f"unknown search method {method!r}")

    search = g if direction == OUTBOUND else g.reversed()
    if method == 'priority-queue':
        best = _priority_queue(search, root, pref)
    else:
        best = _label_correcting(search, root, pref)

    n = g.n
    tails = search.columns[0]
    costs = [math.inf] * n
    times = [0] * n
    energies = [0] * n
    parent_edge = [-1] * n
    parent_vertex = [-1] * n
    for v, key in enumerate(best):
        if key is None:
            continue
        _, tm, en, eid = key
        costs[v] = pref.alpha * tm + pref.beta * en
        times[v] = tm
        energies[v] = en
        parent_edge[v] = eid
        if eid >= 0:
            parent_vertex[v] = tails[eid]

    if stats is not None:
        stats.record_build(method)
    tree = ShortestPathTree(root, direction, pref, method, costs, times, energies,
                            parent_edge, parent_vertex)
    logger.debug("%s tree at %d for %s via %s: %d reached", direction, root, pref.label,
                 method, tree.reached_count())
    return tree


def _priority_queue(g: RoadGraph, root: int, pref: PreferencePair) -> list:
    alpha, beta = pref.alpha, pref.beta
    _, heads, times, energies = g.columns
    adjacency = g.adjacency
    loops = g.charger_loop.tolist() if g.charger_loop.any() else None
    best = [None] * g.n
    done = [False] * g.n
    best[root] = (0.0, 0, 0, -1)
    heap = [(0.0, 0, 0, -1, root)]
    while heap:
        entry = heapq.heappop(heap)
        v = entry[4]
        if done[v]:
            continue
        done[v] = True
        best[v] = entry[:4]
        tm = entry[1]
        en = entry[2]
        for eid in adjacency[v]:
            if loops is not None and loops[eid]:
                continue
            w = heads[eid]
            if done[w]:
                continue
            nt = tm + times[eid]
            ne = en + energies[eid]
            key = (alpha * nt + beta * ne, nt, ne, eid)
            old = best[w]
            if old is None or key < old:
                best[w] = key
                heapq.heappush(heap, key + (w,))
    return best


def _label_correcting(g: RoadGraph, root: int, pref: PreferencePair) -> list:
    alpha, beta = pref.alpha, pref.beta
    n = g.n
    _, heads, times, energies = g.columns
    adjacency = g.adjacency
    loops = g.charger_loop.tolist() if g.charger_loop.any() else None
    best = [None] * n
    best[root] = (0.0, 0, 0, -1)
    in_queue = [False] * n
    enqueued = [0] * n
    queue = deque([root])
    in_queue[root] = True
    enqueued[root] = 1
    while queue:
        v = queue.popleft()
        in_queue[v] = False
        _, tm, en, _ = best[v]
        for eid in adjacency[v]:
            if loops is not None and loops[eid]:
                continue
            w = heads[eid]
            nt = tm + times[eid]
            ne = en + energies[eid]
            nc = alpha * nt + beta * ne
            old = best[w]
            if old is not None:
                oc = old[0]
                tol = RELATIVE_TOLERANCE * max(1.0, abs(oc))
                if w == root:
                    # the root keeps its empty path unless a cycle is strictly cheaper
                    if nc < oc - tol:
                        raise NegativeScalarCycle(
                            f"negative cycle through {root} under preference {pref.label}"
                        )
                    continue
                if nc > oc + tol:
                    continue
                if nc >= oc - tol and (nt, ne, eid) >= old[1:]:
                    continue
            best[w] = (nc, nt, ne, eid)
            if not in_queue[w]:
                enqueued[w] += 1
                if enqueued[w] > n:
                    raise NegativeScalarCycle(
                        f"negative cycle reachable from {root} under preference {pref.label}"
                    )
                in_queue[w] = True
                queue.append(w)
    return best


def extract_tree_path(tree: ShortestPathTree, v: int) -> List[int]:
    """
    Edge ids of the tree path: root to v for outbound trees, v to root
    for inbound trees.
    """
    if not tree.reachable(v):
        raise Unreachable(f"vertex {v} not reached by the {tree.direction} tree of {tree.root}")
    edges = []
    current = v
    for _ in range(tree.vertex_count + 1):
        if current == tree.root:
            break
        edges.append(tree.parent_edge[current])
        current = tree.parent_vertex[current]
    else:
        raise GraphError(f"parent pointers of the tree at {tree.root} contain a cycle")
    if tree.direction == OUTBOUND:
        edges.reverse()
    return edges


def _cross(o: BiWeight, a: BiWeight, b: BiWeight) -> int:
    return (a.time - o.time) * (b.energy - o.energy) - (a.energy - o.energy) * (b.time - o.time)


def lower_left_hull(points: Iterable[BiWeight]) -> List[BiWeight]:
    """
    Points of the lower-left convex hull boundary, by time ascending.

    These are the only weights a single preference pair can select.
    Collinear boundary points are kept. Integer arithmetic, exact.
    """
    hull: List[BiWeight] = []
    for p in ParetoSet(BiWeight(*q) for q in points):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) < 0:
            hull.pop()
        hull.append(p)
    return hull


def on_lower_hull(p: BiWeight, points: Iterable[BiWeight]) -> bool:
    return BiWeight(*p) in set(lower_left_hull(points))
