"""Command-line interface of the hydrolfc package."""

import sys
import logging

import click
from prettytable import PrettyTable

from hydrolfc._cfg import cfg_out_dir, cfg_log_level
from hydrolfc.errors import DomainError, ScenarioError, DivergenceError
from hydrolfc.harness import (
    CONTROLLER_KINDS,
    GA_KINDS,
    load_scenario,
    run_scenario,
    run_comparison,
    read_trace,
    write_run_artifacts,
    write_comparison_artifacts,
)
from hydrolfc.metrics import compute_report
from hydrolfc.util import dumps_json


logger = logging.getLogger(__name__)


# ======= exit codes ======

EXIT_CONFIG = 1
EXIT_DIVERGENCE = 2
EXIT_IO = 3


def _fail(code, message):
    click.echo(message, err=True)
    sys.exit(code)


def _load(path, overrides):
    try:
        return load_scenario(path, overrides=overrides)
    except (ScenarioError, DomainError, OSError) as exc:
        _fail(EXIT_CONFIG, "Bad scenario {}: {}".format(path, exc))


def _seed_override(seed):
    return {} if seed is None else {'seed': seed}


def _write(writer, *args, **kwargs):
    try:
        return writer(*args, **kwargs)
    except OSError as exc:
        _fail(EXIT_IO, "Cannot write artifacts: {}".format(exc))


def _run(scenario, workers):
    try:
        return run_scenario(scenario, workers=workers)
    except DivergenceError as exc:
        _fail(EXIT_DIVERGENCE, "The closed loop diverged: {}".format(exc))


def _report_table(report):
    table = PrettyTable(['Performance measure', 'Value'])
    table.align['Performance measure'] = 'l'
    for key, val in report.to_dict().items():
        table.add_row([key, val if isinstance(val, bool) else
                       '{:.6g}'.format(val)])
    return table


@click.group()
@click.option('-v', '--verbose', count=True, help="Raise the log level.")
def cli(verbose):
    """Load-frequency control experiments on an islanded hydro plant."""
    level = cfg_log_level()
    if verbose == 1:
        level = 'INFO'
    elif verbose > 1:
        level = 'DEBUG'
    logging.basicConfig(
        level=level, format='%(asctime)s %(name)s %(levelname)s %(message)s')


@cli.command()
@click.argument('scenario_file', type=click.Path())
@click.option('--out', 'out_dir', default=None, help="Artifact directory.")
@click.option('--seed', type=int, default=None, help="Override the seed.")
@click.option('--no-plots', is_flag=True, help="Skip the SVG figures.")
@click.option('--workers', type=int, default=None,
              help="Fitness worker threads of GA controllers.")
def simulate(scenario_file, out_dir, seed, no_plots, workers):
    """Runs the scenario's controller and writes its artifacts."""
    scenario = _load(scenario_file, _seed_override(seed))
    artifacts = _run(scenario, workers)
    out_dir = out_dir or cfg_out_dir()
    _write(write_run_artifacts, artifacts, out_dir, plots=not no_plots)
    click.echo(_report_table(artifacts.report).get_string())
    if artifacts.diverged:
        _fail(EXIT_DIVERGENCE, "The closed loop diverged.")


@cli.command()
@click.argument('scenario_file', type=click.Path())
@click.option('--controllers', default='pd,fuzzy-pd,fuzzy-pd-ga-dsnn',
              show_default=True, help="Comma-separated controller kinds.")
@click.option('--out', 'out_dir', default=None, help="Artifact directory.")
@click.option('--seed', type=int, default=None, help="Override the seed.")
@click.option('--no-plots', is_flag=True, help="Skip the SVG figures.")
@click.option('--workers', type=int, default=None,
              help="Fitness worker threads of GA controllers.")
def compare(scenario_file, controllers, out_dir, seed, no_plots, workers):
    """Runs several controllers on one scenario and ranks them."""
    kinds = [kind.strip() for kind in controllers.split(',') if kind.strip()]
    unknown = [kind for kind in kinds if kind not in CONTROLLER_KINDS]
    if unknown or len(kinds) < 2:
        _fail(EXIT_CONFIG, "Give at least two controllers among {}".format(
            ', '.join(CONTROLLER_KINDS)))
    scenario = _load(scenario_file, _seed_override(seed))
    comparison = run_comparison(scenario, kinds, workers=workers)
    out_dir = out_dir or cfg_out_dir()
    _write(write_comparison_artifacts, comparison, out_dir,
           plots=not no_plots)
    click.echo(comparison.table.pretty().get_string())
    if comparison.failures:
        _fail(EXIT_DIVERGENCE, "Diverged: {}".format(
            ', '.join(comparison.failures)))


@cli.command()
@click.argument('scenario_file', type=click.Path())
@click.option('--generations', type=int, default=None,
              help="Override the generation count.")
@click.option('--screen-ratio', type=float, default=None,
              help="Simulated fraction of offspring; enables the surrogate.")
@click.option('--out', 'out_dir', default=None, help="Artifact directory.")
@click.option('--seed', type=int, default=None, help="Override the seed.")
@click.option('--no-plots', is_flag=True, help="Skip the SVG figures.")
@click.option('--workers', type=int, default=None,
              help="Fitness worker threads.")
def optimize(scenario_file, generations, screen_ratio, out_dir, seed,
             no_plots, workers):
    """Tunes the fuzzy PD genes and simulates the best chromosome."""
    overrides = _seed_override(seed)
    if generations is not None:
        overrides['ga'] = {'max_generations': generations}
    if screen_ratio is not None:
        overrides['dsnn'] = {'screen_ratio': screen_ratio}
    scenario = _load(scenario_file, overrides)
    kind = scenario.controller
    if screen_ratio is not None:
        kind = 'fuzzy-pd-ga-dsnn'
    elif kind not in GA_KINDS:
        kind = 'fuzzy-pd-ga'
    if kind != scenario.controller:
        scenario = scenario.with_controller(kind)
    artifacts = _run(scenario, workers)
    out_dir = out_dir or cfg_out_dir()
    _write(write_run_artifacts, artifacts, out_dir, plots=not no_plots)
    click.echo("Best J {:.6g} after {} true evaluations.".format(
        artifacts.ga_result.record.j, artifacts.ga_result.true_evals))
    click.echo(_report_table(artifacts.report).get_string())
    if artifacts.diverged:
        _fail(EXIT_DIVERGENCE, "The tuned closed loop diverged.")


@cli.command()
@click.argument('trace_file', type=click.Path())
@click.option('--settle-band', type=float, default=0.05, show_default=True,
              help="Settling band half-width, in Hz.")
@click.option('--tail-fraction', type=float, default=0.1, show_default=True,
              help="Trace fraction averaged for the steady-state error.")
@click.option('--t-disturbance', type=float, default=None,
              help="Disturbance instant; defaults to the first load change.")
@click.option('--json', 'as_json', is_flag=True, help="Print JSON.")
def metrics(trace_file, settle_band, tail_fraction, t_disturbance, as_json):
    """Computes the metric report of a trace CSV."""
    try:
        trace = read_trace(trace_file, t_disturbance=t_disturbance)
        report = compute_report(
            trace, settle_band=settle_band, tail_fraction=tail_fraction)
    except DomainError as exc:
        _fail(EXIT_CONFIG, "Bad trace {}: {}".format(trace_file, exc))
    except (OSError, ValueError) as exc:
        _fail(EXIT_IO, "Cannot read {}: {}".format(trace_file, exc))
    if as_json:
        click.echo(dumps_json(report), nl=False)
    else:
        click.echo(_report_table(report).get_string())


if __name__ == '__main__':
    cli()
