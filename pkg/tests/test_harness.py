"""Tests for scenarios, runs, artifacts and the command line of hydrolfc."""

import os
import sys
import json
from unittest import TestCase

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from hydrolfc.errors import DivergenceError, ScenarioError
from hydrolfc.control import (
    PdController,
    AdaptivePidController,
    FuzzyPdController,
)
from hydrolfc.metrics import METRIC_NAMES, compute_report
from hydrolfc.fuzzy import GENE_MIN, GENE_MAX
from hydrolfc.optim import Chromosome, ScenarioObjective, ga_run, ga_dsnn_run
from hydrolfc.harness import (
    DEFAULTS,
    default_config,
    Scenario,
    load_scenario,
    build_controller,
    run_scenario,
    run_comparison,
    write_trace,
    read_trace,
    write_run_artifacts,
    write_comparison_artifacts,
)
from hydrolfc.scripts.hydrolfc_cli import cli


SCENARIO_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'scenarios')

TINY_GA = {
    'pop_size': 4, 'elite_count': 1, 'max_generations': 1,
    'tournament_size': 2,
}


def _short(controller='pd', delta_kw=50.0, horizon=3.0, **extra):
    tree = {
        'controller': controller,
        'horizon': horizon,
        'load_events': [{'time': 0.5, 'delta_kw': delta_kw}],
    }
    tree.update(extra)
    return Scenario.from_dict(tree)


def _write_yaml(path, tree):
    with open(path, 'w') as file_obj:
        yaml.safe_dump(tree, file_obj)
    return str(path)


class TestScenario(TestCase):
    """Checks scenario parsing and validation."""

    def test_defaults(self):
        scenario = Scenario.from_dict({})
        self.assertEqual(scenario.controller, 'fuzzy-pd')
        self.assertEqual(scenario.n_steps, 10000)
        self.assertEqual(scenario.load_events, ())
        self.assertEqual(scenario.t_disturbance, 0.0)
        self.assertEqual(scenario.to_dict(), DEFAULTS)
        self.assertIsNot(default_config(), DEFAULTS)

    def test_shipped_scenarios(self):
        for fname, delta in (('load_increase.yaml', 50.0),
                             ('load_drop.yaml', -50.0)):
            scenario = load_scenario(os.path.join(SCENARIO_DIR, fname))
            self.assertEqual(scenario.load_events[0].delta_kw, delta)
            self.assertEqual(scenario.t_disturbance, 1.0)

    def test_unknown_keys(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({'plant': {'inertiaa': 3.0}})
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({'colour': 'blue'})

    def test_bad_values(self):
        for tree in (
                {'controller': 'lqr'},
                {'actuator': 'valve'},
                {'horizon': 0.001},
                {'plant': {'dt': 0.1}},
                {'slc': {'initial_code': 300}},
                {'dsnn': {'screen_ratio': 0.0}},
                {'metrics': {'rule': 'simpson'}},
                {'controllers': {'fuzzy-pd': {'genes': [0.5] * 11}}},
                {'ga': {'pop_size': 1}},
                {'blowup_hz': 0.0}):
            with self.assertRaises(ScenarioError):
                Scenario.from_dict(tree)

    def test_bad_events(self):
        for events in (
                [{'time': 2.0, 'delta_kw': 1.0},
                 {'time': 1.0, 'delta_kw': 1.0}],
                [{'time': 11.0, 'delta_kw': 1.0}],
                [{'time': 1.0}],
                [{'time': 1.0, 'delta_kw': 1.0, 'ramp': 2.0}]):
            with self.assertRaises(ScenarioError):
                Scenario.from_dict({'load_events': events})

    def test_load_profile(self):
        scenario = Scenario.from_dict({
            'horizon': 1.0,
            'load_events': [{'time': 0.25, 'delta_kw': 10.0},
                            {'time': 0.5, 'delta_kw': -4.0}]})
        profile = scenario.load_profile_kw()
        self.assertEqual(len(profile), 1000)
        self.assertTrue(np.all(profile[:250] == 0))
        self.assertTrue(np.all(profile[250:500] == 10.0))
        self.assertTrue(np.all(profile[500:] == 6.0))

    def test_overrides(self):
        scenario = _short().with_overrides({'plant': {'inertia': 4.0}})
        self.assertEqual(scenario.plant.inertia, 4.0)
        self.assertEqual(scenario.plant.damping, 1.0)
        self.assertEqual(scenario.controller, 'pd')
        self.assertEqual(scenario.with_controller('fuzzy-pd').controller,
                         'fuzzy-pd')

    def test_seed_reaches_ga(self):
        scenario = Scenario.from_dict({'seed': 9})
        self.assertEqual(scenario.ga.seed, 9)

    def test_build_controller(self):
        scenario = _short()
        self.assertIsInstance(build_controller(scenario), PdController)
        self.assertIsInstance(
            build_controller(scenario, 'pid-adaptive'),
            AdaptivePidController)
        fuzzy = build_controller(
            scenario, 'fuzzy-pd-ga', genes=Chromosome((0.3,) * 12))
        self.assertIsInstance(fuzzy, FuzzyPdController)
        self.assertAlmostEqual(float(fuzzy.system.e.high), 0.6 * 0.032)


def test_yaml_overrides(tmp_path):
    path = _write_yaml(tmp_path / 'scn.yaml', {'horizon': 2.0})
    scenario = load_scenario(path, overrides={'seed': 4})
    assert scenario.horizon == 2.0
    assert scenario.seed == 4


def test_malformed_yaml(tmp_path):
    path = tmp_path / 'bad.yaml'
    path.write_text('horizon: [1, 2\n')
    with pytest.raises(ScenarioError):
        load_scenario(str(path))


class TestRuns(TestCase):
    """Checks single closed-loop runs."""

    def test_no_disturbance_is_silent(self):
        scenario = Scenario.from_dict({'controller': 'pd', 'horizon': 1.0})
        artifacts = run_scenario(scenario)
        self.assertTrue(np.all(artifacts.trace.f_err == 0))
        for name in METRIC_NAMES:
            self.assertEqual(getattr(artifacts.report, name), 0.0)
        self.assertFalse(artifacts.diverged)

    def test_load_step_is_exact(self):
        trace = run_scenario(_short()).trace
        self.assertTrue(np.all(trace.p_load[:500] == trace.p_load[0]))
        self.assertTrue(np.all(trace.p_load[500:] == trace.p_load[500]))
        self.assertAlmostEqual(
            trace.p_load[500] - trace.p_load[499], 50.0, places=9)
        self.assertEqual(trace.t_disturbance, 0.5)

    def test_load_increase_dips(self):
        report = run_scenario(_short()).report
        self.assertGreater(report.undershoot, 0.0)
        self.assertGreater(report.iae, 0.0)

    def test_load_drop_rises(self):
        report = run_scenario(_short(delta_kw=-50.0)).report
        self.assertGreater(report.overshoot, 0.0)

    def test_slc_absorbs_the_step(self):
        trace = run_scenario(_short(horizon=10.0)).trace
        # the dump load gives up about the added consumer load
        self.assertLess(abs(trace.p_slc[-1] - (224.0 - 50.0)), 3.0)

    def test_gate_actuator(self):
        report = run_scenario(_short(actuator='gate')).report
        self.assertGreater(report.undershoot, 0.0)

    def test_adaptive_pid_runs(self):
        artifacts = run_scenario(_short('pid-adaptive'))
        self.assertFalse(artifacts.diverged)

    def test_divergence(self):
        scenario = _short(blowup_hz=0.05)
        artifacts = run_scenario(scenario)
        self.assertTrue(artifacts.diverged)
        self.assertLess(len(artifacts.trace.t), scenario.n_steps)
        with self.assertRaises(DivergenceError) as ctx:
            run_scenario(scenario, strict=True)
        self.assertTrue(ctx.exception.artifacts.diverged)

    def test_ga_run_artifacts(self):
        scenario = _short('fuzzy-pd-ga', horizon=1.0, ga=TINY_GA)
        artifacts = run_scenario(scenario)
        self.assertEqual(
            artifacts.ga_result.record.evaluated_by, 'simulation')
        self.assertEqual(len(artifacts.optimizer_log), 2)
        content = artifacts.report_dict()
        self.assertEqual(len(content['best_genes']), 12)
        self.assertEqual(content['controller'], 'fuzzy-pd-ga')
        self.assertEqual(content['true_evals'], 4 + 3)

    def test_efficiency_tells_controllers_apart(self):
        values = {
            kind: run_scenario(_short(kind)).efficiency
            for kind in ('pd', 'fuzzy-pd')}
        for val in values.values():
            self.assertGreater(val, 0.0)
            self.assertLess(val, 1.0)
        self.assertNotEqual(values['pd'], values['fuzzy-pd'])

    def test_comparison(self):
        comparison = run_comparison(
            _short(horizon=2.0), ['pd', 'fuzzy-pd', 'pd'])
        self.assertEqual(list(comparison.runs), ['pd', 'fuzzy-pd', 'pd#2'])
        self.assertEqual(comparison.failures, {})
        self.assertEqual(
            comparison.manifest['controllers'], ['pd', 'fuzzy-pd', 'pd'])
        self.assertEqual(comparison.table.ranks.loc['iae', 'pd'], 2)


class TestWorkerCount(TestCase):
    """Checks that fitness threads never change results."""

    def test_objective_values(self):
        scenario = _short('fuzzy-pd', horizon=1.0)
        genes = np.random.default_rng(5).uniform(
            GENE_MIN, GENE_MAX, (13, 12))
        j_serial, div_serial = ScenarioObjective(
            scenario, workers=1).evaluate(genes)
        j_threads, div_threads = ScenarioObjective(
            scenario, workers=4).evaluate(genes)
        np.testing.assert_array_equal(j_serial, j_threads)
        np.testing.assert_array_equal(div_serial, div_threads)

    def test_ga_best_and_history(self):
        scenario = _short('fuzzy-pd-ga-dsnn', horizon=1.0, ga={
            'pop_size': 12, 'elite_count': 1, 'max_generations': 2,
            'tournament_size': 2})
        for run in (ga_run, ga_dsnn_run):
            serial = run(scenario.ga, scenario, workers=1)
            threads = run(scenario.ga, scenario, workers=4)
            self.assertEqual(serial.best, threads.best)
            self.assertEqual(serial.history, threads.history)
            self.assertEqual(serial.true_evals, threads.true_evals)


def test_trace_files_are_deterministic(tmp_path):
    paths = []
    for idx in range(2):
        path = str(tmp_path / 'trace{}.csv'.format(idx))
        write_trace(run_scenario(_short('fuzzy-pd', horizon=1.5)).trace, path)
        paths.append(path)
    with open(paths[0], 'rb') as first, open(paths[1], 'rb') as second:
        assert first.read() == second.read()


def test_trace_round_trip(tmp_path):
    trace = run_scenario(_short(horizon=1.0)).trace
    path = str(tmp_path / 'trace.csv')
    write_trace(trace, path)
    back = read_trace(path, t_disturbance=0.5)
    np.testing.assert_allclose(back.f_err, trace.f_err, rtol=1e-9)
    assert back.t_disturbance == 0.5
    # the first load change marks the disturbance
    assert read_trace(path).t_disturbance == pytest.approx(0.5)


def test_run_artifact_files(tmp_path):
    artifacts = run_scenario(_short('fuzzy-pd', horizon=1.0))
    paths = write_run_artifacts(artifacts, str(tmp_path))
    for kind in ('trace', 'report', 'manifest', 'frequency', 'families',
                 'surface'):
        assert os.path.isfile(paths[kind])
    assert 'ga_log' not in paths
    with open(paths['report']) as file_obj:
        report = json.load(file_obj)
    assert report['controller'] == 'fuzzy-pd'
    assert report['iae'] == pytest.approx(artifacts.report.iae)
    with open(paths['frequency']) as file_obj:
        assert file_obj.read().lstrip().startswith('<?xml')


def test_manifest_reproduces_scenario(tmp_path):
    scenario = _short(horizon=1.0, seed=7)
    paths = write_run_artifacts(
        run_scenario(scenario), str(tmp_path), plots=False)
    again = load_scenario(paths['manifest'])
    assert again.to_dict() == scenario.to_dict()
    assert again.seed == 7


def test_ga_log_file(tmp_path):
    scenario = _short('fuzzy-pd-ga-dsnn', horizon=0.5, ga=TINY_GA)
    paths = write_run_artifacts(
        run_scenario(scenario), str(tmp_path), plots=False)
    with open(paths['ga_log']) as file_obj:
        lines = file_obj.read().splitlines()
    assert lines[0] == 'generation,best_j,mean_j,true_evals'
    assert len(lines) == 3


def test_comparison_files(tmp_path):
    comparison = run_comparison(_short(horizon=1.0), ['pd', 'pd'])
    paths = write_comparison_artifacts(
        comparison, str(tmp_path), plots=False)
    assert os.path.isfile(paths['comparison'])
    assert os.path.isfile(paths['comparison_txt'])
    assert os.path.isdir(str(tmp_path / 'pd_2'))


def _diverge_early(monkeypatch, kind):
    runs_module = sys.modules[run_scenario.__module__]
    real_simulate = runs_module.simulate

    def simulate(scenario, controller):
        if controller.kind == kind:
            raise DivergenceError("The loop diverged before a second sample.")
        return real_simulate(scenario, controller)

    monkeypatch.setattr(runs_module, 'simulate', simulate)


def test_comparison_survives_a_raising_run(monkeypatch):
    _diverge_early(monkeypatch, 'fuzzy-pd')
    comparison = run_comparison(_short(horizon=1.0), ['pd', 'fuzzy-pd'])
    assert list(comparison.runs) == ['pd']
    assert list(comparison.failures) == ['fuzzy-pd']
    assert 'second sample' in comparison.failures['fuzzy-pd']
    assert comparison.table.ranks.loc['iae', 'pd'] == 1


def test_cli_raising_run_exits_with_divergence(monkeypatch, tmp_path):
    _diverge_early(monkeypatch, 'fuzzy-pd')
    path = _write_yaml(tmp_path / 'scenario.yaml', {
        'controller': 'fuzzy-pd', 'horizon': 1.0,
        'load_events': [{'time': 0.2, 'delta_kw': 20.0}]})
    runner = CliRunner()
    out_dir = str(tmp_path / 'out')
    res = runner.invoke(
        cli, ['simulate', path, '--out', out_dir, '--no-plots'])
    assert res.exit_code == 2
    res = runner.invoke(cli, [
        'compare', path, '--controllers', 'pd,fuzzy-pd', '--out', out_dir,
        '--no-plots'])
    assert res.exit_code == 2
    assert os.path.isfile(os.path.join(out_dir, 'comparison.csv'))


class TestCli(TestCase):
    """Checks the commands and exit codes of the hydrolfc CLI."""

    def setUp(self):
        self.runner = CliRunner()

    def _scenario_file(self, tree):
        return _write_yaml('scenario.yaml', tree)

    def test_simulate(self):
        with self.runner.isolated_filesystem():
            path = self._scenario_file({
                'controller': 'pd', 'horizon': 1.0,
                'load_events': [{'time': 0.2, 'delta_kw': 20.0}]})
            res = self.runner.invoke(
                cli, ['simulate', path, '--out', 'out', '--no-plots'])
            self.assertEqual(res.exit_code, 0, res.output)
            self.assertIn('iae', res.output)
            self.assertTrue(os.path.isfile(os.path.join('out', 'trace.csv')))

            res = self.runner.invoke(
                cli, ['metrics', os.path.join('out', 'trace.csv'), '--json',
                      '--t-disturbance', '0.2'])
            self.assertEqual(res.exit_code, 0, res.output)
            report = json.loads(res.output)
            trace = read_trace(
                os.path.join('out', 'trace.csv'), t_disturbance=0.2)
            self.assertAlmostEqual(
                report['iae'], compute_report(trace).iae, places=12)

    def test_metrics_reproduce_run_report(self):
        with self.runner.isolated_filesystem():
            path = self._scenario_file({
                'controller': 'fuzzy-pd', 'horizon': 3.0,
                'load_events': [{'time': 1.0, 'delta_kw': 50.0}]})
            res = self.runner.invoke(
                cli, ['simulate', path, '--out', 'out', '--no-plots'])
            self.assertEqual(res.exit_code, 0, res.output)
            res = self.runner.invoke(
                cli, ['metrics', os.path.join('out', 'trace.csv'), '--json'])
            self.assertEqual(res.exit_code, 0, res.output)
            from_trace = json.loads(res.output)
            with open(os.path.join('out', 'report.json')) as file_obj:
                from_run = json.load(file_obj)
            for name in METRIC_NAMES:
                self.assertEqual(
                    from_trace[name],
                    pytest.approx(from_run[name], rel=1e-6, abs=1e-9),
                    name)

    def test_config_errors(self):
        with self.runner.isolated_filesystem():
            res = self.runner.invoke(cli, ['simulate', 'missing.yaml'])
            self.assertEqual(res.exit_code, 1)
            path = self._scenario_file({'horizn': 1.0})
            res = self.runner.invoke(cli, ['simulate', path])
            self.assertEqual(res.exit_code, 1)
            res = self.runner.invoke(
                cli, ['compare', path, '--controllers', 'pd'])
            self.assertEqual(res.exit_code, 1)

    def test_divergence_exit_code(self):
        with self.runner.isolated_filesystem():
            path = self._scenario_file({
                'controller': 'pd', 'horizon': 2.0, 'blowup_hz': 0.05,
                'load_events': [{'time': 0.2, 'delta_kw': 50.0}]})
            res = self.runner.invoke(
                cli, ['simulate', path, '--out', 'out', '--no-plots'])
            self.assertEqual(res.exit_code, 2)

    def test_compare(self):
        with self.runner.isolated_filesystem():
            path = self._scenario_file({
                'horizon': 1.0,
                'load_events': [{'time': 0.2, 'delta_kw': 20.0}]})
            res = self.runner.invoke(cli, [
                'compare', path, '--controllers', 'pd,fuzzy-pd',
                '--out', 'cmp', '--no-plots'])
            self.assertEqual(res.exit_code, 0, res.output)
            self.assertTrue(
                os.path.isfile(os.path.join('cmp', 'comparison.csv')))
            self.assertIn('fuzzy-pd', res.output)

    def test_optimize(self):
        with self.runner.isolated_filesystem():
            path = self._scenario_file({
                'horizon': 0.5, 'ga': TINY_GA,
                'load_events': [{'time': 0.1, 'delta_kw': 20.0}]})
            res = self.runner.invoke(cli, [
                'optimize', path, '--generations', '1', '--screen-ratio',
                '0.5', '--out', 'opt', '--no-plots'])
            self.assertEqual(res.exit_code, 0, res.output)
            self.assertIn('Best J', res.output)
            self.assertTrue(
                os.path.isfile(os.path.join('opt', 'ga_log.csv')))

    def test_optimize_artifacts_independent_of_workers(self):
        with self.runner.isolated_filesystem():
            path = self._scenario_file({
                'horizon': 0.5, 'ga': dict(TINY_GA, pop_size=8),
                'load_events': [{'time': 0.1, 'delta_kw': 20.0}]})
            for workers in ('1', '4'):
                res = self.runner.invoke(cli, [
                    'optimize', path, '--generations', '2', '--screen-ratio',
                    '0.5', '--workers', workers, '--out', 'w' + workers,
                    '--no-plots'])
                self.assertEqual(res.exit_code, 0, res.output)
            for fname in ('report.json', 'ga_log.csv', 'trace.csv'):
                with open(os.path.join('w1', fname), 'rb') as first, \
                        open(os.path.join('w4', fname), 'rb') as second:
                    self.assertEqual(first.read(), second.read(), fname)

    def test_metrics_bad_trace(self):
        with self.runner.isolated_filesystem():
            with open('trace.csv', 'w') as file_obj:
                file_obj.write('t,f_err_hz\n0.0,0.1\n')
            res = self.runner.invoke(cli, ['metrics', 'trace.csv'])
            self.assertEqual(res.exit_code, 1)
            res = self.runner.invoke(cli, ['metrics', 'nothing.csv'])
            self.assertEqual(res.exit_code, 3)
