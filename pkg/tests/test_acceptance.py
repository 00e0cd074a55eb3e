"""End-to-end controller comparisons on the shipped scenarios."""

import os

import pytest

from hydrolfc.metrics import INTEGRAL_METRICS
from hydrolfc.harness import load_scenario, run_comparison, run_scenario


SCENARIO_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'scenarios')
SCENARIOS = ['load_increase.yaml', 'load_drop.yaml']
SMALL_GA = {
    'pop_size': 16, 'elite_count': 2, 'max_generations': 4,
    'crossover_rate': 0.5, 'mutation_rate': 0.1,
}


def _scenario(fname, **ga):
    overrides = {'ga': dict(SMALL_GA, **ga)}
    return load_scenario(os.path.join(SCENARIO_DIR, fname), overrides)


@pytest.mark.slow
@pytest.mark.parametrize('fname', SCENARIOS)
def test_controller_ordering(fname):
    comparison = run_comparison(
        _scenario(fname), ['pd', 'fuzzy-pd', 'fuzzy-pd-ga'])
    assert comparison.failures == {}
    values = comparison.table.values
    for metric in INTEGRAL_METRICS:
        pd_val, fuzzy_val, ga_val = values.loc[
            metric, ['pd', 'fuzzy-pd', 'fuzzy-pd-ga']]
        assert pd_val > fuzzy_val > ga_val, metric
    assert values.loc['iae', 'fuzzy-pd'] <= 0.7 * values.loc['iae', 'pd']
    assert values.loc['itae', 'fuzzy-pd-ga'] <= 0.8 * values.loc[
        'itae', 'fuzzy-pd']
    assert comparison.table.dominant == 'fuzzy-pd-ga'


@pytest.mark.slow
def test_surrogate_screening_smoke():
    scenario = _scenario('load_increase.yaml', max_generations=2)
    scenario = scenario.with_controller('fuzzy-pd-ga-dsnn')
    artifacts = run_scenario(scenario)
    result = artifacts.ga_result
    assert not artifacts.diverged
    assert result.record.evaluated_by == 'simulation'
    assert result.true_evals == 16 + 2 * 7
    assert result.history[-1] <= result.history[0]
