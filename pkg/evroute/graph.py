"""
Graph Core
Bicriterion (time, energy) weights, dominance, Pareto sets and the
directed road multigraph shared by every search module.
"""

import logging
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import GraphError, WeightOverflow

logger = logging.getLogger(__name__)

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1


class BiWeight(NamedTuple):
    """(seconds, Wh) pair; energy may be negative (charging, regeneration)"""
    time: int
    energy: int


ZERO = BiWeight(0, 0)


def _checked(value: int, what: str) -> int:
    if value < INT64_MIN or value > INT64_MAX:
        raise WeightOverflow(f"{what} {value} outside the 64-bit integer range")
    return value


def add_weights(a: BiWeight, b: BiWeight) -> BiWeight:
    """Component-wise sum; raises WeightOverflow instead of wrapping."""
    return BiWeight(
        _checked(a.time + b.time, 'time'),
        _checked(a.energy + b.energy, 'energy')
    )


def sum_weights(weights: Iterable[BiWeight]) -> BiWeight:
    total = ZERO
    for w in weights:
        total = add_weights(total, w)
    return total


def dominates(a: BiWeight, b: BiWeight) -> bool:
    """True iff a is no worse than b in both components and differs from it."""
    return a.time <= b.time and a.energy <= b.energy and a != b


class ParetoSet:
    """
    Mutually non-dominated weights, kept sorted by time ascending
    (so energy is strictly descending).

    Each weight may carry a payload (the labeling search stores its
    predecessor labels here). Insertion is blocked by any member that
    dominates or equals the newcomer; members the newcomer dominates
    are evicted.
    """

    __slots__ = ('_times', '_energies', '_payloads')

    def __init__(self, weights: Iterable[BiWeight] = ()):
        self._times: List[int] = []
        self._energies: List[int] = []
        self._payloads: List[Any] = []
        for w in weights:
            self.insert(w)

    def __len__(self) -> int:
        return len(self._times)

    def __iter__(self) -> Iterator[BiWeight]:
        return (BiWeight(t, e) for t, e in zip(self._times, self._energies))

    def __contains__(self, weight) -> bool:
        i = bisect_left(self._times, weight[0])
        return i < len(self._times) and self._times[i] == weight[0] and self._energies[i] == weight[1]

    def __eq__(self, other) -> bool:
        if isinstance(other, ParetoSet):
            return self._times == other._times and self._energies == other._energies
        return NotImplemented

    def __repr__(self) -> str:
        return f"ParetoSet({self.weights()})"

    def weights(self) -> List[BiWeight]:
        return list(self)

    def payloads(self) -> List[Any]:
        return list(self._payloads)

    def items(self) -> List[Tuple[BiWeight, Any]]:
        return list(zip(self, self._payloads))

    def is_blocked(self, time: int, energy: int) -> bool:
        """True if a member dominates or equals (time, energy)."""
        i = bisect_right(self._times, time)
        # member i-1 has the smallest energy among members with time <= `time`
        return i > 0 and self._energies[i - 1] <= energy

    def insert(self, weight: BiWeight, payload: Any = None) -> bool:
        inserted, _ = self.insert_evicting(weight[0], weight[1], payload)
        return inserted

    def insert_evicting(self, time: int, energy: int, payload: Any = None) -> Tuple[bool, List[Any]]:
        """
        Insert (time, energy) unless blocked.

        Returns:
            (inserted, payloads of the evicted members)
        """
        times = self._times
        energies = self._energies
        i = bisect_right(times, time)
        if i > 0 and energies[i - 1] <= energy:
            return False, []

        # Members at i-1 with equal time have larger energy: dominated too
        lo = i - 1 if i > 0 and times[i - 1] == time else i
        hi = i
        while hi < len(times) and energies[hi] >= energy:
            hi += 1

        evicted = self._payloads[lo:hi]
        times[lo:hi] = [time]
        energies[lo:hi] = [energy]
        self._payloads[lo:hi] = [payload]
        return True, evicted

    def first_within(self, max_time: Optional[int], max_energy: Optional[int]) -> Optional[Tuple[BiWeight, Any]]:
        """Minimum-time member with time <= max_time and energy <= max_energy."""
        i = 0
        if max_energy is not None:
            i = bisect_left(self._energies, -max_energy, key=lambda e: -e)
        if i >= len(self._times):
            return None
        if max_time is not None and self._times[i] > max_time:
            return None
        return BiWeight(self._times[i], self._energies[i]), self._payloads[i]


def pareto_insert(pset: ParetoSet, p: BiWeight) -> Tuple[ParetoSet, bool]:
    inserted = pset.insert(p)
    return pset, inserted


def pareto_filter(weights: Iterable[BiWeight]) -> ParetoSet:
    return ParetoSet(weights)


@dataclass(frozen=True)
class QueryGoal:
    """Upper bounds on a route weight; None means unbounded"""
    max_time: Optional[int] = None
    max_energy: Optional[int] = None

    def accepts(self, weight: BiWeight) -> bool:
        if self.max_time is not None and weight.time > self.max_time:
            return False
        if self.max_energy is not None and weight.energy > self.max_energy:
            return False
        return True

    def describe(self) -> str:
        parts = []
        if self.max_time is not None:
            parts.append(f"time <= {self.max_time} s")
        if self.max_energy is not None:
            parts.append(f"energy <= {self.max_energy} Wh")
        return ' and '.join(parts) or 'unbounded'


@dataclass(frozen=True)
class StyledEdge:
    """One directed traversal of a road at one driving style"""
    index: int
    tail: int
    head: int
    weight: BiWeight
    style: int = 0
    is_charger_loop: bool = False


EdgeSpec = Tuple  # (tail, head, time, energy[, style[, is_charger_loop]])


class RoadGraph:
    """
    Directed multigraph over dense vertex ids [0, n) with styled
    parallel edges.

    Edge columns are numpy int64 arrays indexed by edge id; the
    per-vertex adjacency is a CSR view built on first use. Instances are
    immutable after construction. The reversed view shares edge ids
    with the original, so paths found on either refer to the same edges.
    """

    def __init__(
        self,
        vertex_count: int,
        tails: Sequence[int],
        heads: Sequence[int],
        times: Sequence[int],
        energies: Sequence[int],
        styles: Sequence[int] = None,
        charger_loops: Sequence[bool] = None,
        chargers: Iterable[int] = (),
        style_count: int = None,
        segments: tuple = ()
    ):
        if vertex_count < 0:
            raise GraphError(f"vertex count must be non-negative, got {vertex_count}")
        self.vertex_count = int(vertex_count)
        try:
            self.tail = np.asarray(tails, dtype=np.int64)
            self.head = np.asarray(heads, dtype=np.int64)
            self.time = np.asarray(times, dtype=np.int64)
            self.energy = np.asarray(energies, dtype=np.int64)
        except OverflowError as e:
            raise WeightOverflow(f"edge column does not fit 64-bit integers: {e}") from e
        m = len(self.tail)
        if not (len(self.head) == len(self.time) == len(self.energy) == m):
            raise GraphError("edge columns have different lengths")
        self.style = np.zeros(m, dtype=np.int64) if styles is None else np.asarray(styles, dtype=np.int64)
        self.charger_loop = (np.zeros(m, dtype=bool) if charger_loops is None
                             else np.asarray(charger_loops, dtype=bool))
        self.chargers = frozenset(int(v) for v in chargers)
        inferred = int(self.style.max()) + 1 if m else 1
        self.style_count = int(style_count) if style_count is not None else inferred
        self.segments = tuple(segments)
        self._reverse_of: Optional['RoadGraph'] = None
        self._validate()

    def _validate(self):
        n = self.vertex_count
        for name, col in (('tail', self.tail), ('head', self.head)):
            if len(col) and (col.min() < 0 or col.max() >= n):
                raise GraphError(f"edge {name} outside vertex range [0, {n})")
        if len(self.style) and (self.style.min() < 0 or self.style.max() >= self.style_count):
            raise GraphError(f"edge style outside [0, {self.style_count})")
        loops = self.charger_loop
        if loops.any():
            bad = loops & ((self.tail != self.head) | (self.time <= 0) | (self.energy >= 0))
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise GraphError(
                    f"edge {i} is flagged as a charger loop but is not a self-loop "
                    f"with positive time and negative energy"
                )
        for v in self.chargers:
            if not 0 <= v < n:
                raise GraphError(f"charger {v} outside vertex range [0, {n})")

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable,
        chargers: Iterable[int] = (),
        style_count: int = None,
        segments: tuple = ()
    ) -> 'RoadGraph':
        """
        Build from StyledEdge objects or tuples
        (tail, head, time, energy[, style[, is_charger_loop]]).
        """
        tails, heads, times, energies, styles, loops = [], [], [], [], [], []
        for e in edges:
            if isinstance(e, StyledEdge):
                spec = (e.tail, e.head, e.weight.time, e.weight.energy, e.style, e.is_charger_loop)
            else:
                spec = tuple(e)
                if len(spec) < 6:
                    spec = spec + (0, False)[len(spec) - 4:]
            tails.append(spec[0])
            heads.append(spec[1])
            times.append(_checked(int(spec[2]), 'time'))
            energies.append(_checked(int(spec[3]), 'energy'))
            styles.append(spec[4])
            loops.append(bool(spec[5]))
        return cls(vertex_count, tails, heads, times, energies, styles, loops,
                   chargers=chargers, style_count=style_count, segments=segments)

    # ------------------------------------------------------------------
    # Basic accessors
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def m(self) -> int:
        return len(self.tail)

    def __repr__(self) -> str:
        return f"<RoadGraph n={self.n} m={self.m} styles={self.style_count} chargers={len(self.chargers)}>"

    def edge(self, i: int) -> StyledEdge:
        return StyledEdge(
            index=int(i),
            tail=int(self.tail[i]),
            head=int(self.head[i]),
            weight=BiWeight(int(self.time[i]), int(self.energy[i])),
            style=int(self.style[i]),
            is_charger_loop=bool(self.charger_loop[i])
        )

    def edges(self) -> Iterator[StyledEdge]:
        for i in range(self.m):
            yield self.edge(i)

    def weight_of(self, edge_ids: Iterable[int]) -> BiWeight:
        return sum_weights(BiWeight(int(self.time[i]), int(self.energy[i])) for i in edge_ids)

    def edge_multiset(self) -> Counter:
        return Counter(zip(self.tail.tolist(), self.head.tolist(), self.time.tolist(),
                           self.energy.tolist(), self.style.tolist(), self.charger_loop.tolist()))

    # ------------------------------------------------------------------
    # Adjacency (CSR over edge ids, grouped by tail)
    # ------------------------------------------------------------------

    @cached_property
    def _csr(self) -> Tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.tail, kind='stable')
        counts = np.bincount(self.tail, minlength=self.vertex_count)
        offsets = np.zeros(self.vertex_count + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        return offsets, order

    @cached_property
    def adjacency(self) -> List[List[int]]:
        """Outgoing edge ids per vertex, as plain lists for the search loops."""
        offsets, order = self._csr
        ids = order.tolist()
        bounds = offsets.tolist()
        return [ids[bounds[v]:bounds[v + 1]] for v in range(self.vertex_count)]

    def out_edges(self, v: int) -> List[int]:
        return self.adjacency[v]

    @cached_property
    def columns(self) -> Tuple[List[int], List[int], List[int], List[int]]:
        """(tails, heads, times, energies) as Python lists"""
        return self.tail.tolist(), self.head.tolist(), self.time.tolist(), self.energy.tolist()

    # ------------------------------------------------------------------
    # Derived graphs
    # ------------------------------------------------------------------

    def reversed(self) -> 'RoadGraph':
        if self._reverse_of is None:
            rev = RoadGraph(
                self.vertex_count, self.head, self.tail, self.time, self.energy,
                self.style, self.charger_loop, chargers=self.chargers,
                style_count=self.style_count, segments=self.segments
            )
            rev._reverse_of = self
            self._reverse_of = rev
        return self._reverse_of

    def with_chargers(self, stations: Iterable[int]) -> 'RoadGraph':
        return RoadGraph(
            self.vertex_count, self.tail, self.head, self.time, self.energy,
            self.style, self.charger_loop, chargers=self.chargers | set(stations),
            style_count=self.style_count, segments=self.segments
        )

    def with_charger_loops(self, stations: Iterable[int], time: int, energy: int) -> 'RoadGraph':
        """Add a (time, -energy) self-loop at every station."""
        stations = sorted(set(int(v) for v in stations))
        k = len(stations)
        return RoadGraph(
            self.vertex_count,
            np.concatenate([self.tail, np.asarray(stations, dtype=np.int64)]),
            np.concatenate([self.head, np.asarray(stations, dtype=np.int64)]),
            np.concatenate([self.time, np.full(k, time, dtype=np.int64)]),
            np.concatenate([self.energy, np.full(k, -abs(energy), dtype=np.int64)]),
            np.concatenate([self.style, np.zeros(k, dtype=np.int64)]),
            np.concatenate([self.charger_loop, np.ones(k, dtype=bool)]),
            chargers=self.chargers | set(stations),
            style_count=self.style_count,
            segments=self.segments
        )


def reverse_view(g: RoadGraph) -> RoadGraph:
    """Every edge (u, v, w) becomes (v, u, w); edge ids and charger flags are kept."""
    return g.reversed()
