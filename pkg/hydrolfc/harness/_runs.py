"""Experiment orchestration: single runs and controller comparisons."""

import logging
from dataclasses import dataclass, field

from hydrolfc._version import __version__
from hydrolfc.errors import DomainError, DivergenceError, ScenarioError
from hydrolfc.metrics import compute_report, compare_reports
from hydrolfc.optim import ga_run, ga_dsnn_run, efficiency
from hydrolfc.plant import turbine_power
from hydrolfc.sim import simulate
from ._scenario import GA_KINDS, build_controller


logger = logging.getLogger(__name__)


def make_manifest(scenario):
    """Returns the config echo that reproduces a run of the scenario."""
    return {
        'version': __version__,
        'seed': scenario.seed,
        'scenario': scenario.to_dict(),
    }


@dataclass(frozen=True, eq=False)
class RunArtifacts:
    """Everything a single run produces.

    optimizer_log and ga_result are None for controllers that are not GA
    tuned; system is the fuzzy system driving fuzzy controllers.
    """
    controller: str
    trace: object
    report: object
    efficiency: float
    manifest: dict
    optimizer_log: tuple = None
    ga_result: object = None
    system: object = None

    @property
    def diverged(self):
        return self.trace.diverged

    def report_dict(self):
        """Returns the JSON content of report.json."""
        content = self.report.to_dict()
        content['efficiency'] = self.efficiency
        content['controller'] = self.controller
        content['diverged'] = self.diverged
        if self.ga_result is not None:
            content['best_genes'] = list(self.ga_result.best.genes)
            content['best_j'] = self.ga_result.record.j
            content['true_evals'] = self.ga_result.true_evals
        return content


@dataclass(frozen=True, eq=False)
class ComparisonArtifacts:
    """The runs of a comparison, keyed by column name, and their table."""
    runs: dict
    table: object
    manifest: dict
    failures: dict = field(default_factory=dict)


def optimize(scenario, kind=None, workers=None):
    """Runs the GA variant of the given kind on the scenario."""
    if kind is None:
        kind = scenario.controller
    if kind == 'fuzzy-pd-ga':
        return ga_run(scenario.ga, scenario, workers=workers)
    if kind == 'fuzzy-pd-ga-dsnn':
        return ga_dsnn_run(
            scenario.ga, scenario, screen_ratio=scenario.screen_ratio,
            surrogate_cfg=scenario.surrogate, workers=workers)
    raise ScenarioError("Controller {} is not GA tuned.".format(kind))


def run_scenario(scenario, strict=False, workers=None):
    """Simulates a scenario and collects all of its artifacts.

    GA-tuned controllers are optimized on the same scenario first and
    their best chromosome is then simulated.

    Arguments
    ---------
    scenario : Scenario
        The experiment.
    strict : bool, default False
        Raise DivergenceError, carrying the artifacts, if the loop
        diverges. Otherwise the artifacts hold the partial trace.
    workers : int, optional
        Fitness worker threads of a GA run. Defaults to HYDROLFC_WORKERS.

    Returns
    -------
    RunArtifacts
        The trace, metric report, efficiency, manifest and, for GA
        controllers, the optimization result.
    """
    kind = scenario.controller
    ga_result = None
    genes = None
    if kind in GA_KINDS:
        logger.info("Tuning %s on the scenario.", kind)
        ga_result = optimize(scenario, kind, workers)
        genes = ga_result.best
    controller = build_controller(scenario, kind, genes)
    trace = simulate(scenario, controller)
    report = compute_report(
        trace, settle_band=scenario.settle_band,
        tail_fraction=scenario.tail_fraction, rule=scenario.rule)
    artifacts = RunArtifacts(
        controller=kind,
        trace=trace,
        report=report,
        efficiency=efficiency(trace, turbine_power(scenario.turbine)),
        manifest=make_manifest(scenario),
        optimizer_log=None if ga_result is None else ga_result.log,
        ga_result=ga_result,
        system=getattr(controller, 'system', None),
    )
    if trace.diverged and strict:
        raise DivergenceError(
            "The {} loop diverged.".format(kind), artifacts=artifacts)
    return artifacts


def _column_names(kinds):
    names = []
    for kind in kinds:
        name = kind
        count = 2
        while name in names:
            name = '{}#{}'.format(kind, count)
            count += 1
        names.append(name)
    return names


def run_comparison(base, controllers, workers=None):
    """Runs several controllers on the same plant, events and seed.

    Arguments
    ---------
    base : Scenario
        The shared experiment; its own controller kind is ignored.
    controllers : sequence of str
        At least two controller kinds. A repeated kind gets its own,
        suffixed, column.
    workers : int, optional
        Fitness worker threads of GA runs.

    Returns
    -------
    ComparisonArtifacts
        Every run and the ranked comparison table. A diverged run keeps its
        artifacts but is marked failed in the table; a run that raised
        DivergenceError has no artifacts and is only marked failed.
    """
    controllers = list(controllers)
    if len(controllers) < 2:
        raise DomainError("A comparison needs at least two controllers.")
    runs = {}
    reports = []
    failures = {}
    for name, kind in zip(_column_names(controllers), controllers):
        scenario = base.with_controller(kind)
        try:
            run = run_scenario(scenario, workers=workers)
        except DivergenceError as exc:
            logger.warning("The %s run failed: %s", name, exc)
            failures[name] = str(exc)
            reports.append((name, None))
            continue
        runs[name] = run
        if run.diverged:
            failures[name] = 'diverged'
            reports.append((name, None))
        else:
            reports.append((name, run.report))
    table = compare_reports(reports)
    if table.dominant is not None:
        logger.info("%s dominates the comparison.", table.dominant)
    manifest = make_manifest(base)
    manifest['controllers'] = controllers
    return ComparisonArtifacts(
        runs=runs, table=table, manifest=manifest, failures=failures)
