"""
Ingest - Road network loading and synthetic instance generators

Graph file format (1-based vertex ids, DIMACS style):
    c <comment>
    p ev <n> <num_segments>
    a <u> <v> <length_m> <class>          class: 1 highway, 2 primary, 3 secondary, 4 local
    e <u> <v> <time_s> <energy_wh> <style> explicit directed edge, style 1-based
    l <v> <time_s> <energy_wh>            charger self-loop (energy negative)

Every `a` segment expands to 2 directions x 3 styles; segment edges come
first (edge ids 6k..6k+5 for segment k), then `e` / `l` edges in file order.
"""

import logging
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import InvalidParameter, NonPositiveLength, ParseError, UnknownClass
from .graph import BiWeight, QueryGoal, RoadGraph
from .utility_search import PreferencePair

logger = logging.getLogger(__name__)

ROAD_CLASSES = ('highway', 'primary', 'secondary', 'local')
DRIVING_STYLES = ('fast', 'moderate', 'slow')

MPH_TO_MPS = Decimal('0.44704')
METERS_PER_MILE = Decimal('1609.344')

# (speed mph, Wh per mile), Tesla Model S 85 kWh with climate control on
TABLE_DEFAULTS = {
    ('highway', 'fast'): (70, 378),
    ('highway', 'moderate'): (60, 329),
    ('highway', 'slow'): (50, 291),
    ('primary', 'fast'): (70, 378),
    ('primary', 'moderate'): (55, 308),
    ('primary', 'slow'): (40, 258),
    ('secondary', 'fast'): (60, 329),
    ('secondary', 'moderate'): (45, 275),
    ('secondary', 'slow'): (35, 221),
    ('local', 'fast'): (30, 202),
    ('local', 'moderate'): (25, 199),
    ('local', 'slow'): (20, 197),
}

DEFAULT_CLASS_MIX = {'highway': 0.1, 'primary': 0.2, 'secondary': 0.3, 'local': 0.4}


def _round_half_away(value: Decimal) -> int:
    return int(value.quantize(Decimal(1), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class DrivingParams:
    """Speed and consumption for every (road class, driving style)"""
    table: Dict[Tuple[str, str], Tuple[int, int]] = field(default_factory=lambda: dict(TABLE_DEFAULTS))

    def __post_init__(self):
        missing = [key for key in TABLE_DEFAULTS if key not in self.table]
        if missing:
            raise InvalidParameter(f"driving parameters missing for {missing}")
        for (road_class, style), (speed, wh) in self.table.items():
            if speed <= 0:
                raise InvalidParameter(f"{road_class}.{style}: speed must be positive, got {speed}")
            if wh < 0:
                raise InvalidParameter(f"{road_class}.{style}: consumption must be non-negative, got {wh}")
        for road_class in ROAD_CLASSES:
            speeds = [self.table[(road_class, style)][0] for style in DRIVING_STYLES]
            if not speeds[0] >= speeds[1] >= speeds[2]:
                raise InvalidParameter(f"{road_class}: speeds must satisfy fast >= moderate >= slow, got {speeds}")

    def speed_mph(self, road_class: str, style: str) -> int:
        return self.table[(road_class, style)][0]

    def wh_per_mile(self, road_class: str, style: str) -> int:
        return self.table[(road_class, style)][1]

    def edge_weight(self, length_m: int, road_class: str, style: str) -> BiWeight:
        """Traversal weight, each component rounded half away from zero."""
        speed, wh = self.table[(road_class, style)]
        length = Decimal(str(length_m))
        seconds = length / (Decimal(speed) * MPH_TO_MPS)
        energy = length * Decimal(wh) / METERS_PER_MILE
        return BiWeight(_round_half_away(seconds), _round_half_away(energy))


@dataclass(frozen=True)
class StylePrefs:
    """Named preference pairs, in query order"""
    pairs: Tuple[PreferencePair, ...]

    def __post_init__(self):
        if not self.pairs:
            raise InvalidParameter("at least one preference pair is required")

    @classmethod
    def default(cls) -> 'StylePrefs':
        return cls((
            PreferencePair(0.8, 0.2, 'fast'),
            PreferencePair(0.5, 0.5, 'balanced'),
            PreferencePair(0.2, 0.8, 'energy-saving'),
        ))

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, i: int) -> PreferencePair:
        return self.pairs[i]

    @property
    def names(self) -> List[str]:
        return [p.label for p in self.pairs]

    def with_pair(self, name: str, alpha: float, beta: float) -> 'StylePrefs':
        """Replace the pair called name, or append it."""
        pair = PreferencePair(alpha, beta, name)
        pairs = list(self.pairs)
        for i, p in enumerate(pairs):
            if p.name == name:
                pairs[i] = pair
                return StylePrefs(tuple(pairs))
        return StylePrefs(tuple(pairs) + (pair,))


@dataclass(frozen=True)
class RoutingParams:
    """Contents of a params file applied on top of the compiled-in defaults"""
    driving: DrivingParams = field(default_factory=DrivingParams)
    prefs: StylePrefs = field(default_factory=StylePrefs.default)
    charge_rate_wh_per_s: Optional[float] = None


class Segment(NamedTuple):
    """Undirected road segment as read from an `a` line (0-based ends)"""
    u: int
    v: int
    length_m: int
    road_class: int  # 1..4


def _strip_lines(path):
    with open(path, 'r', encoding='utf-8') as f:
        for number, raw in enumerate(f, start=1):
            yield number, raw.strip()


def load_params(path, base: RoutingParams = None) -> RoutingParams:
    """
    Read `key=value` overrides:
        <class>.<style>.speed_mph=<int>
        <class>.<style>.wh_per_mile=<int>
        pref.<name>=<alpha>,<beta>
        charge.rate_wh_per_s=<real>
    Blank lines and lines starting with '#' are ignored.
    """
    params = base or RoutingParams()
    table, prefs, rate = dict(params.driving.table), params.prefs, params.charge_rate_wh_per_s
    source = str(path)
    for number, line in _strip_lines(path):
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        key, value = key.strip(), value.strip()
        if not sep or not value:
            raise ParseError(f"expected key=value, got {line!r}", number, source)
        parts = key.split('.')
        try:
            if len(parts) == 3 and parts[0] in ROAD_CLASSES and parts[1] in DRIVING_STYLES:
                speed, wh = table[(parts[0], parts[1])]
                if parts[2] == 'speed_mph':
                    table[(parts[0], parts[1])] = (int(value), wh)
                elif parts[2] == 'wh_per_mile':
                    table[(parts[0], parts[1])] = (speed, int(value))
                else:
                    raise ParseError(f"unknown driving parameter {parts[2]!r}", number, source)
            elif len(parts) == 2 and parts[0] == 'pref' and parts[1]:
                alpha, beta = (float(x) for x in value.split(','))
                prefs = prefs.with_pair(parts[1], alpha, beta)
            elif key == 'charge.rate_wh_per_s':
                rate = float(value)
                if not rate > 0:
                    raise InvalidParameter(f"charge rate must be positive, got {value}")
            else:
                raise ParseError(f"unknown key {key!r}", number, source)
        except ValueError as e:
            raise ParseError(f"bad value for {key}: {value!r} ({e})", number, source) from e
        except InvalidParameter as e:
            raise ParseError(str(e), number, source) from e
    try:
        driving = DrivingParams(table)
    except InvalidParameter as e:
        raise ParseError(str(e), None, source) from e
    logger.debug("loaded params from %s: %d preference pairs", source, len(prefs))
    return RoutingParams(driving, prefs, rate)


def _segment_edges(segments: Iterable[Segment], params: DrivingParams) -> List[tuple]:
    edges = []
    for seg in segments:
        road_class = ROAD_CLASSES[seg.road_class - 1]
        weights = [params.edge_weight(seg.length_m, road_class, style) for style in DRIVING_STYLES]
        for tail, head in ((seg.u, seg.v), (seg.v, seg.u)):
            for style, w in enumerate(weights):
                edges.append((tail, head, w.time, w.energy, style, False))
    return edges


def graph_from_segments(n: int, segments: Iterable[Segment], params: DrivingParams = None,
                        extra_edges: Iterable[tuple] = (), chargers: Iterable[int] = ()) -> RoadGraph:
    """Expand segments into styled edges, then append explicit edges."""
    params = params or DrivingParams()
    segments = tuple(segments)
    edges = _segment_edges(segments, params) + list(extra_edges)
    style_count = max([len(DRIVING_STYLES) if segments else 1] + [e[4] + 1 for e in edges])
    return RoadGraph.from_edges(n, edges, chargers=chargers, style_count=style_count, segments=segments)


def _ints(fields: List[str], number: int, source: str) -> List[int]:
    try:
        return [int(x) for x in fields]
    except ValueError as e:
        raise ParseError(f"expected integers, got {' '.join(fields)!r}", number, source) from e


def load_graph(path, params: DrivingParams = None) -> RoadGraph:
    """
    Parse a graph file.

    Raises:
        ParseError: malformed line, missing header, vertex out of range
        UnknownClass: class code outside 1..4
        NonPositiveLength: segment length <= 0
    """
    source = str(path)
    n = None
    declared = 0
    segments: List[Segment] = []
    extra: List[tuple] = []

    def vertex(token: int, number: int) -> int:
        if not 1 <= token <= n:
            raise ParseError(f"vertex {token} outside [1, {n}]", number, source)
        return token - 1

    for number, line in _strip_lines(path):
        if not line or line.startswith('c'):
            continue
        fields = line.split()
        kind = fields[0]
        if kind == 'p':
            if n is not None:
                raise ParseError("duplicate header", number, source)
            if len(fields) != 4 or fields[1] != 'ev':
                raise ParseError(f"expected 'p ev <n> <num_segments>', got {line!r}", number, source)
            n, declared = _ints(fields[2:], number, source)
            if n < 0 or declared < 0:
                raise ParseError("header counts must be non-negative", number, source)
            continue
        if n is None:
            raise ParseError(f"'{kind}' line before the 'p' header", number, source)
        if kind == 'a':
            if len(fields) != 5:
                raise ParseError(f"expected 'a <u> <v> <length_m> <class>', got {line!r}", number, source)
            u, v, length, code = _ints(fields[1:], number, source)
            if length <= 0:
                raise NonPositiveLength(f"segment length must be positive, got {length}", number, source)
            if not 1 <= code <= len(ROAD_CLASSES):
                raise UnknownClass(f"road class {code} not in 1..{len(ROAD_CLASSES)}", number, source)
            segments.append(Segment(vertex(u, number), vertex(v, number), length, code))
        elif kind == 'e':
            if len(fields) != 6:
                raise ParseError(f"expected 'e <u> <v> <time_s> <energy_wh> <style>', got {line!r}",
                                 number, source)
            u, v, time, energy, style = _ints(fields[1:], number, source)
            if style < 1:
                raise ParseError(f"style must be >= 1, got {style}", number, source)
            extra.append((vertex(u, number), vertex(v, number), time, energy, style - 1, False))
        elif kind == 'l':
            if len(fields) != 4:
                raise ParseError(f"expected 'l <v> <time_s> <energy_wh>', got {line!r}", number, source)
            v, time, energy = _ints(fields[1:], number, source)
            if time <= 0 or energy >= 0:
                raise ParseError("charger loop needs positive time and negative energy", number, source)
            v = vertex(v, number)
            extra.append((v, v, time, energy, 0, True))
        else:
            raise ParseError(f"unknown line type {kind!r}", number, source)

    if n is None:
        raise ParseError("missing 'p ev <n> <num_segments>' header", None, source)
    if len(segments) != declared:
        raise ParseError(f"header declares {declared} segments, found {len(segments)}", None, source)
    loops = {e[0] for e in extra if e[5]}
    g = graph_from_segments(n, segments, params, extra, chargers=loops)
    logger.info("loaded %s: n=%d, %d segments, m=%d", source, g.n, len(segments), g.m)
    return g


def graph_text(g: RoadGraph, comment: str = None) -> str:
    """
    g in the graph file format. Segment edges are written back as `a`
    lines, so reloading with the same DrivingParams restores them.
    """
    k = len(g.segments)
    lines = []
    if comment:
        lines.extend(f"c {text}" for text in comment.splitlines())
    lines.append(f"p ev {g.n} {k}")
    for seg in g.segments:
        lines.append(f"a {seg.u + 1} {seg.v + 1} {seg.length_m} {seg.road_class}")
    for e in (g.edge(i) for i in range(6 * k, g.m)):
        if e.is_charger_loop:
            lines.append(f"l {e.tail + 1} {e.weight.time} {e.weight.energy}")
        else:
            lines.append(f"e {e.tail + 1} {e.head + 1} {e.weight.time} {e.weight.energy} {e.style + 1}")
    return '\n'.join(lines) + '\n'


def save_graph(g: RoadGraph, path, comment: str = None):
    Path(path).write_text(graph_text(g, comment), encoding='utf-8')


def load_chargers(path, vertex_count: int = None) -> List[int]:
    """One 1-based vertex id per line, '#' comments; returns sorted 0-based ids."""
    source = str(path)
    stations = set()
    for number, line in _strip_lines(path):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        (v,) = _ints([line], number, source)
        if v < 1 or (vertex_count is not None and v > vertex_count):
            raise ParseError(f"charger vertex {v} outside [1, {vertex_count}]", number, source)
        stations.add(v - 1)
    return sorted(stations)


def save_chargers(stations: Iterable[int], path):
    Path(path).write_text(''.join(f"{v + 1}\n" for v in sorted(set(stations))), encoding='utf-8')


# ============================================================================
# GENERATORS
# ============================================================================

def gen_grid(rows: int, cols: int, class_mix: Dict[str, float] = None, seed: int = 0,
             params: DrivingParams = None) -> RoadGraph:
    """
    4-neighbour grid, vertex id r * cols + c. Segments are listed
    horizontal first, then vertical, both row-major. Local segments are
    100-500 m long, other classes 500-5000 m.
    """
    if rows < 1 or cols < 1:
        raise InvalidParameter(f"grid needs rows, cols >= 1, got {rows}x{cols}")
    mix = class_mix or DEFAULT_CLASS_MIX
    unknown = set(mix) - set(ROAD_CLASSES)
    if unknown:
        raise InvalidParameter(f"unknown road classes in mix: {sorted(unknown)}")
    weights = np.array([float(mix.get(name, 0.0)) for name in ROAD_CLASSES])
    if (weights < 0).any() or weights.sum() <= 0:
        raise InvalidParameter("class mix needs non-negative weights with a positive sum")

    ends = [(r * cols + c, r * cols + c + 1) for r in range(rows) for c in range(cols - 1)]
    ends += [(r * cols + c, (r + 1) * cols + c) for r in range(rows - 1) for c in range(cols)]
    rng = np.random.default_rng(seed)
    codes = rng.choice(len(ROAD_CLASSES), size=len(ends), p=weights / weights.sum()) + 1
    short = rng.integers(100, 501, size=len(ends))
    long = rng.integers(500, 5001, size=len(ends))
    lengths = np.where(codes == ROAD_CLASSES.index('local') + 1, short, long)

    segments = [Segment(u, v, int(length), int(code)) for (u, v), length, code in zip(ends, lengths, codes)]
    return graph_from_segments(rows * cols, segments, params)


def gen_random_graph(n: int, m: int, max_weight: int = 20, seed: int = 0, acyclic: bool = False,
                     min_weight: int = 0, style_count: int = 1) -> RoadGraph:
    """Random bicriterion multigraph without self-loops; weights uniform in [min_weight, max_weight]."""
    if n < 2 and m > 0:
        raise InvalidParameter("a graph with edges needs at least two vertices")
    if min_weight > max_weight:
        raise InvalidParameter(f"min_weight {min_weight} > max_weight {max_weight}")
    rng = np.random.default_rng(seed)
    tails = rng.integers(0, n, size=m) if m else np.zeros(0, dtype=np.int64)
    offsets = rng.integers(1, max(2, n), size=m) if m else np.zeros(0, dtype=np.int64)
    heads = (tails + offsets) % max(1, n)
    if acyclic:
        tails, heads = np.minimum(tails, heads), np.maximum(tails, heads)
    times = rng.integers(min_weight, max_weight + 1, size=m)
    energies = rng.integers(min_weight, max_weight + 1, size=m)
    styles = rng.integers(0, style_count, size=m)
    return RoadGraph(n, tails, heads, times, energies, styles, style_count=style_count)


@dataclass(frozen=True)
class PartitionInstance:
    """
    Chain v_0..v_n with two parallel edges per value a_i:
    (1 + a_i, 1) and (1, 1 + a_i). A route meets X = Y = n + h exactly
    when the values split into two halves of equal sum.
    """
    values: Tuple[int, ...]
    graph: RoadGraph
    goal: QueryGoal

    @property
    def total(self) -> int:
        return sum(self.values)

    @property
    def half_sum(self) -> float:
        return self.total / 2

    @property
    def odd_total(self) -> bool:
        return self.total % 2 == 1

    @classmethod
    def build(cls, values: Iterable[int]) -> 'PartitionInstance':
        values = tuple(int(a) for a in values)
        if not values:
            raise InvalidParameter("partition instance needs at least one value")
        if any(a <= 0 for a in values):
            raise InvalidParameter(f"partition values must be positive, got {values}")
        n = len(values)
        edges = []
        for i, a in enumerate(values):
            edges.append((i, i + 1, 1 + a, 1, 0))
            edges.append((i, i + 1, 1, 1 + a, 1))
        bound = n + sum(values) // 2
        instance = cls(values, RoadGraph.from_edges(n + 1, edges, style_count=2), QueryGoal(bound, bound))
        if instance.odd_total:
            logger.warning("partition values %s have an odd total; the instance is infeasible", values)
        return instance


def gen_partition_instance(values: Iterable[int]) -> Tuple[RoadGraph, QueryGoal]:
    instance = PartitionInstance.build(values)
    return instance.graph, instance.goal


def place_random_chargers(vertex_count: int, count: int, seed: int = 0) -> List[int]:
    """
    Stations at uniformly random distinct vertices. For a fixed seed the
    set for k stations is contained in the set for k + 1.
    """
    if not 0 <= count <= vertex_count:
        raise InvalidParameter(f"cannot place {count} chargers on {vertex_count} vertices")
    order = np.random.default_rng(seed).permutation(vertex_count)
    return sorted(int(v) for v in order[:count])
