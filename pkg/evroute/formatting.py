"""
Output formatting for routes, itineraries and frontiers.

Vertex ids are printed 1-based, matching the input files.
"""

import json
from typing import Dict, List, Sequence

import pandas as pd

from .charging import Itinerary
from .errors import InvalidParameter
from .graph import BiWeight, RoadGraph
from .two_phase import PlanStep, TwoPhaseRoute
from .utility_search import PreferencePair, lower_left_hull

FORMATS = ('text', 'csv', 'json-lines')

STEP_COLUMNS = ['step', 'kind', 'from', 'to', 'style', 'path', 'seconds', 'energy_wh']
FRONTIER_COLUMNS = ['time_s', 'energy_wh']


def _path(g: RoadGraph, step: PlanStep) -> str:
    vertices = [step.vertex + 1] + [int(g.head[eid]) + 1 for eid in step.edges]
    return ' '.join(str(v) for v in vertices)


def _step_records(g: RoadGraph, steps: Sequence[PlanStep]) -> List[Dict]:
    return [
        {
            'step': i,
            'kind': step.kind,
            'from': step.vertex + 1,
            'to': step.end_vertex + 1,
            'style': step.style,
            'path': _path(g, step) if step.edges else '',
            'seconds': step.seconds,
            'energy_wh': step.energy_wh,
        }
        for i, step in enumerate(steps, start=1)
    ]


def _render(records: List[Dict], columns: List[str], fmt: str, text_lines: List[str]) -> str:
    if fmt == 'text':
        return '\n'.join(text_lines) + '\n'
    if fmt == 'csv':
        return pd.DataFrame(records, columns=columns).to_csv(index=False, lineterminator='\n')
    if fmt == 'json-lines':
        return ''.join(json.dumps(r, sort_keys=False) + '\n' for r in records)
    raise InvalidParameter(f"unknown output format {fmt!r}; use one of {', '.join(FORMATS)}")


def _text_steps(steps: Sequence[PlanStep], g: RoadGraph) -> List[str]:
    lines = []
    for step in steps:
        if step.kind == 'drive':
            lines.append(f"  drive {step.vertex + 1} -> {step.end_vertex + 1} [{step.style}] "
                         f"{step.seconds} s, {step.energy_wh} Wh  via {_path(g, step)}")
        elif step.kind == 'switch':
            lines.append(f"  switch at {step.vertex + 1} to {step.style}")
        else:
            lines.append(f"  charge at {step.vertex + 1} for {step.seconds} s (+{-step.energy_wh} Wh)")
    return lines


def format_route(g: RoadGraph, route: TwoPhaseRoute, s: int, t: int, prefs: Sequence[PreferencePair],
                 fmt: str = 'text') -> str:
    steps = route.plan(g, s, t, prefs)
    weight = route.weight
    records = _step_records(g, steps)
    records.append({'step': len(records) + 1, 'kind': 'total', 'from': s + 1, 'to': t + 1, 'style': '',
                    'path': '', 'seconds': weight.time, 'energy_wh': weight.energy})
    lines = [f"route {s + 1} -> {t + 1}, switch at {route.switch_vertex + 1}"]
    lines += _text_steps(steps, g)
    lines.append(f"total: {weight.time} s, {weight.energy} Wh")
    return _render(records, STEP_COLUMNS, fmt, lines)


def format_itinerary(g: RoadGraph, itinerary: Itinerary, s: int, t: int, prefs: Sequence[PreferencePair],
                     fmt: str = 'text') -> str:
    steps = itinerary.plan(g, prefs)
    records = _step_records(g, steps)
    records.append({'step': len(records) + 1, 'kind': 'total', 'from': s + 1, 'to': t + 1, 'style': '',
                    'path': '', 'seconds': itinerary.total_seconds, 'energy_wh': itinerary.energy_wh})
    stops = itinerary.charge_stops
    lines = [f"itinerary {s + 1} -> {t + 1}, {len(stops)} charge stop(s)"]
    lines += _text_steps(steps, g)
    lines.append(f"total: {itinerary.total_seconds} s "
                 f"(driving {itinerary.driving_seconds} s, charging {sum(sec for _, sec in stops)} s), "
                 f"{itinerary.energy_wh} Wh, {itinerary.transitions(g, prefs)} style transition(s)")
    return _render(records, STEP_COLUMNS, fmt, lines)


def format_frontier(points: Sequence[BiWeight], fmt: str = 'text', hull: bool = False) -> str:
    points = list(points)
    columns = FRONTIER_COLUMNS + (['on_hull'] if hull else [])
    on_hull = set(lower_left_hull(points)) if hull else set()
    records = []
    for p in points:
        record = {'time_s': p.time, 'energy_wh': p.energy}
        if hull:
            record['on_hull'] = p in on_hull
        records.append(record)
    lines = [f"{len(points)} Pareto point(s)"]
    for r in records:
        marker = '  *' if r.get('on_hull') else ''
        lines.append(f"  {r['time_s']} s, {r['energy_wh']} Wh{marker}")
    return _render(records, columns, fmt, lines)


def route_record(g: RoadGraph, route: TwoPhaseRoute, s: int, t: int, prefs: Sequence[PreferencePair]) -> Dict:
    """JSON-ready view of a two-phase route"""
    return {
        'kind': 'two-phase',
        'source': s + 1,
        'target': t + 1,
        'switch_vertex': route.switch_vertex + 1,
        'style_out': prefs[route.score.style_out].label,
        'style_in': prefs[route.score.style_in].label,
        'total_seconds': route.weight.time,
        'energy_wh': route.weight.energy,
        'steps': _step_records(g, route.plan(g, s, t, prefs)),
    }


def itinerary_record(g: RoadGraph, itinerary: Itinerary, s: int, t: int,
                     prefs: Sequence[PreferencePair]) -> Dict:
    """JSON-ready view of a charging itinerary"""
    return {
        'kind': 'itinerary',
        'source': s + 1,
        'target': t + 1,
        'total_seconds': itinerary.total_seconds,
        'driving_seconds': itinerary.driving_seconds,
        'energy_wh': itinerary.energy_wh,
        'charge_stops': [{'station': v + 1, 'seconds': sec} for v, sec in itinerary.charge_stops],
        'transitions': itinerary.transitions(g, prefs),
        'steps': _step_records(g, itinerary.plan(g, prefs)),
    }
