"""
EV Route Planner
Command-line front end: route, pareto, experiment and instance generators.

Vertex ids on the command line and in every file are 1-based.
"""

import logging
import sys
from functools import wraps

import click

from evroute.charging import ChargeModel, build_super_graph, route_with_chargers
from evroute.config import RoutingConfig
from evroute.errors import EVRouteError, InvalidParameter, UnknownVertex
from evroute.experiment import run_experiment
from evroute.formatting import FORMATS, format_frontier, format_itinerary, format_route
from evroute.graph import QueryGoal, RoadGraph
from evroute.ingest import (
    ROAD_CLASSES, PartitionInstance, RoutingParams, gen_grid, gen_random_graph, graph_text,
    load_chargers, load_graph, load_params, place_random_chargers, save_chargers
)
from evroute.pareto import check_oracle_guard, ev_pareto_frontier
from evroute.two_phase import best_two_phase

logger = logging.getLogger('evroute.cli')


def configure_logging(verbose: bool):
    level = logging.DEBUG if verbose else getattr(logging, RoutingConfig.LOG_LEVEL, logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )


def handle_errors(f):
    """Report EVRouteError on stderr and exit with its code"""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except EVRouteError as e:
            logger.debug("command failed", exc_info=True)
            click.echo(f"error: {e}", err=True)
            click.get_current_context().exit(e.exit_code)
    return decorated_function


# ============================================================================
# SHARED OPTIONS
# ============================================================================

def graph_options(f):
    f = click.option('--params', 'params_path', type=click.Path(exists=True, dir_okay=False),
                     default=lambda: RoutingConfig.PARAMS_FILE or None,
                     help='key=value overrides of driving parameters and preference pairs')(f)
    f = click.option('--graph', 'graph_path', type=click.Path(exists=True, dir_okay=False),
                     default=lambda: RoutingConfig.GRAPH_FILE or None,
                     help='graph file (default: EVROUTE_GRAPH_FILE)')(f)
    return f


def _load(graph_path, params_path):
    if not graph_path:
        raise click.UsageError("--graph is required (or set EVROUTE_GRAPH_FILE)")
    params = load_params(params_path) if params_path else RoutingParams()
    return load_graph(graph_path, params.driving), params


def _vertex(value: int, n: int, name: str) -> int:
    if not 1 <= value <= n:
        raise UnknownVertex(f"{name} {value} outside [1, {n}]")
    return value - 1


def _charge_model(rate, params: RoutingParams) -> ChargeModel:
    for candidate in (rate, params.charge_rate_wh_per_s, RoutingConfig.CHARGE_RATE_WH_PER_S):
        if candidate is not None:
            return ChargeModel.linear(candidate)
    raise InvalidParameter("a charge rate is required: pass --charge-rate, set charge.rate_wh_per_s "
                           "in the params file or EVROUTE_CHARGE_RATE_WH_PER_S")


def _stations(g: RoadGraph, chargers_path, rate, params: RoutingParams):
    """
    (graph, stations) for a charging query, stations being the graph's own
    charger loops plus the chargers file. Loops alone count only when a
    charge rate is configured; otherwise stations is None.
    """
    rate_given = any(c is not None for c in (rate, params.charge_rate_wh_per_s,
                                             RoutingConfig.CHARGE_RATE_WH_PER_S))
    if chargers_path:
        g = g.with_chargers(load_chargers(chargers_path, g.n))
    elif not (g.chargers and rate_given):
        if g.chargers:
            logger.info("ignoring %d charger loop(s): no charge rate configured", len(g.chargers))
        return g, None
    return g, sorted(g.chargers)


def _emit(text: str, output):
    if output in (None, '-'):
        click.echo(text, nl=False)
    else:
        with open(output, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info("wrote %s", output)


# ============================================================================
# COMMANDS
# ============================================================================

@click.group()
@click.option('--verbose', '-v', is_flag=True, help='debug logging on stderr')
def cli(verbose):
    """Bicriterion (time, energy) route planning for electric vehicles."""
    configure_logging(verbose)


@cli.command()
@graph_options
@click.option('--source', '-s', type=int, required=True)
@click.option('--target', '-t', type=int, required=True)
@click.option('--capacity', type=int, default=lambda: RoutingConfig.DEFAULT_CAPACITY_WH, show_default=True,
              help='battery capacity in Wh')
@click.option('--max-time', type=int, help='upper bound on total seconds')
@click.option('--max-energy', type=int, help='upper bound on total Wh (at most the capacity)')
@click.option('--chargers', 'chargers_path', type=click.Path(exists=True, dir_okay=False),
              default=lambda: RoutingConfig.CHARGERS_FILE or None, help='charging stations, one id per line')
@click.option('--charge-rate', type=float, help='Wh added per second of charging')
@click.option('--format', 'fmt', type=click.Choice(FORMATS), default='text', show_default=True)
@handle_errors
def route(graph_path, params_path, source, target, capacity, max_time, max_energy,
          chargers_path, charge_rate, fmt):
    """Fastest battery-feasible route; a charging itinerary with --chargers, or with a charge rate on a graph with charger loops."""
    g, params = _load(graph_path, params_path)
    s = _vertex(source, g.n, 'source')
    t = _vertex(target, g.n, 'target')
    prefs = list(params.prefs)
    if capacity <= 0:
        raise InvalidParameter(f"capacity must be positive, got {capacity}")

    g, stations = _stations(g, chargers_path, charge_rate, params)
    if stations is not None:
        if max_time is not None or max_energy is not None:
            raise InvalidParameter("--max-time / --max-energy do not apply to charging itineraries")
        model = _charge_model(charge_rate, params)
        sg = build_super_graph(g, stations, s, t, prefs, capacity, model)
        itinerary = route_with_chargers(sg, s, t)
        click.echo(format_itinerary(g, itinerary, s, t, prefs, fmt), nl=False)
        return

    energy_bound = capacity if max_energy is None else min(capacity, max_energy)
    result = best_two_phase(g, s, t, prefs, QueryGoal(max_time, energy_bound))
    violations = result.battery_violations(g, capacity)
    if violations:
        logger.warning("route exceeds the battery capacity mid-way at edge position(s) %s", violations)
    click.echo(format_route(g, result, s, t, prefs, fmt), nl=False)


@cli.command()
@graph_options
@click.option('--source', '-s', type=int, required=True)
@click.option('--target', '-t', type=int, required=True)
@click.option('--capacity', type=int, default=lambda: RoutingConfig.DEFAULT_CAPACITY_WH, show_default=True)
@click.option('--hull', is_flag=True, help='mark points a single preference pair can reach')
@click.option('--format', 'fmt', type=click.Choice(FORMATS), default='text', show_default=True)
@handle_errors
def pareto(graph_path, params_path, source, target, capacity, hull, fmt):
    """Exact battery-constrained Pareto frontier at the target."""
    g, _ = _load(graph_path, params_path)
    s = _vertex(source, g.n, 'source')
    t = _vertex(target, g.n, 'target')
    check_oracle_guard(g, capacity)
    table = ev_pareto_frontier(g, s, capacity)
    click.echo(format_frontier(table.frontier(t).weights(), fmt, hull), nl=False)


@cli.command()
@graph_options
@click.option('--source', '-s', type=int, help='start vertex (default: drawn from the seed)')
@click.option('--targets', 'num_targets', type=int, default=100, show_default=True,
              help='number of targets sampled uniformly')
@click.option('--target', '-t', 'explicit_targets', type=int, multiple=True, help='explicit target (repeatable)')
@click.option('--capacity', 'capacities', type=int, multiple=True, required=True, help='repeatable')
@click.option('--charger-count', 'charger_counts', type=int, multiple=True,
              help='random stations to place (repeatable; 0 compares against the oracle)')
@click.option('--chargers', 'chargers_path', type=click.Path(exists=True, dir_okay=False),
              default=lambda: RoutingConfig.CHARGERS_FILE or None,
              help='fixed charging stations, one id per line; adds one row per capacity')
@click.option('--charge-rate', type=float)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--timing', is_flag=True, help='fill wall_seconds (output is then not reproducible)')
@click.option('--output', '-o', default='-', help='CSV path, - for stdout')
@handle_errors
def experiment(graph_path, params_path, source, num_targets, explicit_targets, capacities,
               charger_counts, chargers_path, charge_rate, seed, timing, output):
    """Two-phase reachability and slowdown against the exact oracle, as CSV."""
    g, params = _load(graph_path, params_path)
    s = _vertex(source, g.n, 'source') if source is not None else None
    targets = [_vertex(t, g.n, 'target') for t in explicit_targets] or None
    counts = charger_counts or (0,)
    g, stations = _stations(g, chargers_path, charge_rate, params)
    needs_rate = any(k > 0 for k in counts) or bool(stations)
    model = _charge_model(charge_rate, params) if needs_rate else None
    report = run_experiment(g, s, num_targets, capacities, list(params.prefs), seed=seed, targets=targets,
                            charger_counts=counts, charge_model=model, timing=timing, stations=stations)
    _emit(report.to_csv(), output)


# ============================================================================
# GENERATORS
# ============================================================================

@cli.group()
def gen():
    """Synthetic instances."""


def _class_mix(text):
    if not text:
        return None
    mix = {}
    for part in text.split(','):
        name, _, weight = part.partition('=')
        if name.strip() not in ROAD_CLASSES:
            raise InvalidParameter(f"unknown road class {name.strip()!r} in --mix")
        try:
            mix[name.strip()] = float(weight)
        except ValueError as e:
            raise InvalidParameter(f"bad weight in --mix: {part!r}") from e
    return mix


@gen.command()
@click.option('--rows', type=int, required=True)
@click.option('--cols', type=int, required=True)
@click.option('--mix', help='class weights, e.g. highway=0.1,primary=0.2,secondary=0.3,local=0.4')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--output', '-o', default='-')
@handle_errors
def grid(rows, cols, mix, seed, output):
    """4-neighbour grid with random road classes and lengths."""
    g = gen_grid(rows, cols, _class_mix(mix), seed)
    _emit(graph_text(g, f"grid {rows}x{cols} seed {seed}"), output)


@gen.command()
@click.option('--values', required=True, help='comma separated positive integers')
@click.option('--output', '-o', default='-')
@handle_errors
def partition(values, output):
    """Chain graph whose bounded route exists iff the values split evenly."""
    try:
        numbers = [int(x) for x in values.split(',')]
    except ValueError as e:
        raise InvalidParameter(f"--values must be integers, got {values!r}") from e
    instance = PartitionInstance.build(numbers)
    goal = instance.goal
    comment = f"partition {values}: goal max_time={goal.max_time} max_energy={goal.max_energy}"
    _emit(graph_text(instance.graph, comment), output)
    click.echo(f"goal: --max-time {goal.max_time} --max-energy {goal.max_energy}", err=True)


@gen.command('random')
@click.option('--vertices', '-n', type=int, required=True)
@click.option('--edges', '-m', type=int, required=True)
@click.option('--max-weight', type=int, default=20, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--acyclic', is_flag=True)
@click.option('--output', '-o', default='-')
@handle_errors
def random_graph(vertices, edges, max_weight, seed, acyclic, output):
    """Random bicriterion multigraph."""
    g = gen_random_graph(vertices, edges, max_weight, seed, acyclic)
    _emit(graph_text(g, f"random n={vertices} m={edges} seed {seed}"), output)


@gen.command()
@graph_options
@click.option('--count', type=int, required=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--output', '-o', required=True)
@handle_errors
def chargers(graph_path, params_path, count, seed, output):
    """Charging stations at random vertices of the graph."""
    g, _ = _load(graph_path, params_path)
    stations = place_random_chargers(g.n, count, seed)
    save_chargers(stations, output)
    logger.info("placed %d chargers", len(stations))


if __name__ == '__main__':
    cli()
