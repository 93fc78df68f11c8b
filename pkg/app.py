"""
EV Route Planner
Flask JSON API over the routing engine
"""

from pathlib import Path

from flask import Flask, request, jsonify
from dotenv import load_dotenv

from evroute.charging import ChargeModel, build_super_graph, route_with_chargers
from evroute.config import RoutingConfig
from evroute.errors import EVRouteError, InvalidParameter, UnknownVertex
from evroute.formatting import itinerary_record, route_record
from evroute.graph import QueryGoal
from evroute.ingest import RoutingParams, load_graph, load_params
from evroute.pareto import check_oracle_guard, ev_pareto_frontier
from evroute.two_phase import best_two_phase
from evroute.utility_search import lower_left_hull

load_dotenv()

app = Flask(__name__)

app.config['GRAPH_FILE'] = RoutingConfig.GRAPH_FILE
app.config['PARAMS_FILE'] = RoutingConfig.PARAMS_FILE
app.config['DEFAULT_CAPACITY_WH'] = RoutingConfig.DEFAULT_CAPACITY_WH
app.config['CHARGE_RATE_WH_PER_S'] = RoutingConfig.CHARGE_RATE_WH_PER_S
app.config['PARETO_GUARD'] = RoutingConfig.PARETO_GUARD
app.logger.setLevel(RoutingConfig.LOG_LEVEL)

# (graph path, params path) -> (RoadGraph, RoutingParams); graphs are immutable
_graphs = {}


def get_graph():
    """Load (once per worker) the configured graph, or None if not configured"""
    graph_path = app.config.get('GRAPH_FILE')
    if not graph_path or not Path(graph_path).exists():
        return None
    params_path = app.config.get('PARAMS_FILE') or None
    key = (graph_path, params_path)
    if key not in _graphs:
        params = load_params(params_path) if params_path else RoutingParams()
        _graphs[key] = (load_graph(graph_path, params.driving), params)
        app.logger.info("loaded graph %s", graph_path)
    return _graphs[key]


def error_status(e: EVRouteError) -> int:
    if isinstance(e, UnknownVertex):
        return 404
    return {2: 400, 3: 422, 4: 413}.get(e.exit_code, 500)


def _int_field(data: dict, name: str, default=None):
    value = data.get(name, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidParameter(f"{name} must be an integer, got {value!r}")
    return value


def _number_field(data: dict, name: str):
    value = data.get(name)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidParameter(f"{name} must be a number, got {value!r}")
    return float(value)


def _vertex_field(data: dict, name: str, n: int) -> int:
    value = _int_field(data, name)
    if value is None:
        raise InvalidParameter(f"{name} is required")
    if not 1 <= value <= n:
        raise UnknownVertex(f"{name} {value} outside [1, {n}]")
    return value - 1


def _capacity(data: dict) -> int:
    capacity = _int_field(data, 'capacity', app.config['DEFAULT_CAPACITY_WH'])
    if capacity <= 0:
        raise InvalidParameter(f"capacity must be positive, got {capacity}")
    return capacity


# ============================================================================
# ROUTES
# ============================================================================

@app.route('/api/status', methods=['GET'])
def status():
    """Configuration and loaded graph summary"""
    data = RoutingConfig.get_status()
    data['graph_file'] = app.config.get('GRAPH_FILE')
    try:
        loaded = get_graph()
    except EVRouteError as e:
        app.logger.error("graph failed to load: %s", e)
        return jsonify({**data, 'graph_configured': False, 'error': str(e)}), error_status(e)
    data['graph_configured'] = loaded is not None
    if loaded:
        g, params = loaded
        data.update({
            'vertices': g.n,
            'edges': g.m,
            'styles': g.style_count,
            'chargers': len(g.chargers),
            'preferences': params.prefs.names
        })
    return jsonify(data)


@app.route('/api/route', methods=['POST'])
def api_route():
    """
    Fastest feasible route.

    Body: source, target (1-based), capacity, max_time, max_energy,
    chargers (list of 1-based ids), charge_rate
    """
    try:
        loaded = get_graph()
        if loaded is None:
            return jsonify({'error': 'No graph configured. Set EVROUTE_GRAPH_FILE.'}), 503
        g, params = loaded
        data = request.get_json(silent=True) or {}
        s = _vertex_field(data, 'source', g.n)
        t = _vertex_field(data, 'target', g.n)
        capacity = _capacity(data)
        prefs = list(params.prefs)

        requested = data.get('chargers') or []
        if not isinstance(requested, list):
            raise InvalidParameter(f"chargers must be a list of vertex ids, got {requested!r}")
        requested = [_vertex_field({'charger': v}, 'charger', g.n) for v in requested]
        rate = _number_field(data, 'charge_rate')
        if rate is None:
            rate = params.charge_rate_wh_per_s
        if rate is None:
            rate = app.config['CHARGE_RATE_WH_PER_S']

        # charger loops in the graph only turn the query into an itinerary once a rate is known
        if requested or (g.chargers and rate is not None):
            if rate is None:
                raise InvalidParameter("charge_rate is required when chargers are given")
            stations = set(g.chargers) | set(requested)
            model = ChargeModel.linear(rate)
            sg = build_super_graph(g, stations, s, t, prefs, capacity, model)
            itinerary = route_with_chargers(sg, s, t)
            return jsonify(itinerary_record(g, itinerary, s, t, prefs))

        max_energy = _int_field(data, 'max_energy')
        goal = QueryGoal(_int_field(data, 'max_time'),
                         capacity if max_energy is None else min(capacity, max_energy))
        result = best_two_phase(g, s, t, prefs, goal)
        record = route_record(g, result, s, t, prefs)
        record['battery_violations'] = result.battery_violations(g, capacity)
        return jsonify(record)

    except EVRouteError as e:
        app.logger.warning("route request failed: %s", e)
        return jsonify({'error': str(e)}), error_status(e)
    except Exception as e:
        app.logger.exception("route request failed")
        return jsonify({'error': str(e)}), 500


@app.route('/api/pareto', methods=['POST'])
def api_pareto():
    """Exact battery-constrained frontier at the target. Body: source, target, capacity, hull"""
    try:
        loaded = get_graph()
        if loaded is None:
            return jsonify({'error': 'No graph configured. Set EVROUTE_GRAPH_FILE.'}), 503
        g, _ = loaded
        data = request.get_json(silent=True) or {}
        s = _vertex_field(data, 'source', g.n)
        t = _vertex_field(data, 'target', g.n)
        capacity = _capacity(data)
        check_oracle_guard(g, capacity, app.config['PARETO_GUARD'])
        points = ev_pareto_frontier(g, s, capacity).frontier(t).weights()

        on_hull = set(lower_left_hull(points)) if data.get('hull') else None
        rows = []
        for p in points:
            row = {'time_s': p.time, 'energy_wh': p.energy}
            if on_hull is not None:
                row['on_hull'] = p in on_hull
            rows.append(row)
        return jsonify({'source': s + 1, 'target': t + 1, 'capacity': capacity, 'points': rows})

    except EVRouteError as e:
        app.logger.warning("pareto request failed: %s", e)
        return jsonify({'error': str(e)}), error_status(e)
    except Exception as e:
        app.logger.exception("pareto request failed")
        return jsonify({'error': str(e)}), 500


if __name__ == '__main__':
    app.run(debug=True, host='0.0.0.0', port=8080)
