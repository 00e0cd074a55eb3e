"""Tests for the genetic tuning of hydrolfc."""

import math
from unittest import TestCase

import numpy as np
import pytest

from hydrolfc.errors import DomainError
from hydrolfc.fuzzy import GENE_MIN, GENE_MAX
from hydrolfc.metrics import SimTrace
from hydrolfc.optim import (
    N_GENES,
    GaConfig,
    SurrogateConfig,
    Chromosome,
    FitnessRecord,
    FunctionObjective,
    ga_run,
    ga_dsnn_run,
    efficiency,
)


def sphere(genes):
    return float(np.sum((np.asarray(genes) - 0.5) ** 2))


def _small_cfg(**kwargs):
    params = dict(pop_size=20, elite_count=2, max_generations=8)
    params.update(kwargs)
    return GaConfig(**params)


class TestGaRun(TestCase):
    """Checks the plain genetic algorithm on analytic objectives."""

    def test_history_never_increases(self):
        for seed in range(20):
            cfg = _small_cfg(seed=seed, include_default=False)
            _, history = ga_run(cfg, sphere)
            self.assertEqual(len(history), cfg.max_generations + 1)
            self.assertTrue(np.all(np.diff(history) <= 0))

    def test_sphere_default_budget(self):
        for seed in range(3):
            cfg = GaConfig(seed=seed, include_default=False)
            best, history = ga_run(cfg, sphere)
            self.assertGreater(history[0], 0.01)
            self.assertTrue(np.all(np.abs(best.as_array() - 0.5) < 0.05))
            self.assertEqual(history[-1], sphere(best.genes))

    def test_sphere_without_default_improves(self):
        cfg = GaConfig(
            pop_size=60, elite_count=3, crossover_rate=0.9,
            mutation_rate=0.2, max_generations=40, include_default=False)
        result = ga_run(cfg, sphere)
        self.assertLess(result.history[-1], 0.25 * result.history[0])

    def test_constant_fitness_is_flat(self):
        result = ga_run(_small_cfg(), lambda genes: 1.0)
        self.assertEqual(set(result.history), {1.0})
        self.assertIsInstance(result.best, Chromosome)

    def test_reproducible(self):
        cfg = _small_cfg(seed=3, include_default=False)
        first = ga_run(cfg, sphere)
        second = ga_run(cfg, sphere)
        self.assertEqual(first.best, second.best)
        self.assertEqual(first.history, second.history)
        other = ga_run(_small_cfg(seed=4, include_default=False), sphere)
        self.assertNotEqual(first.best, other.best)

    def test_genes_stay_in_range(self):
        cfg = _small_cfg(mutation_rate=1.0, blend_alpha=2.0,
                         crossover_rate=1.0, include_default=False)
        result = ga_run(cfg, lambda genes: -float(np.sum(genes)))
        genes = result.best.as_array()
        self.assertTrue(np.all((genes >= GENE_MIN) & (genes <= GENE_MAX)))
        self.assertLess(result.record.j, 0)
        self.assertEqual(result.record.evaluated_by, 'function')

    def test_log_and_record(self):
        cfg = _small_cfg()
        result = ga_run(cfg, sphere)
        self.assertEqual(len(result.log), cfg.max_generations + 1)
        self.assertEqual(result.log[0].true_evals, cfg.pop_size)
        self.assertEqual(
            result.true_evals,
            cfg.pop_size + cfg.max_generations * (
                cfg.pop_size - cfg.elite_count))
        self.assertEqual(result.record.j, result.history[-1])
        self.assertEqual(result.record.evaluated_by, 'function')
        self.assertIsNone(result.surrogate)
        self.assertEqual(
            sorted(result.log[3].to_dict()),
            ['best_j', 'generation', 'mean_j', 'true_evals'])

    def test_objective_object(self):
        objective = FunctionObjective(sphere)
        cfg = _small_cfg(max_generations=2)
        ga_run(cfg, objective)
        self.assertEqual(
            objective.n_true, cfg.pop_size + 2 * (
                cfg.pop_size - cfg.elite_count))


class TestGaDsnnRun(TestCase):
    """Checks surrogate pre-screening."""

    def test_full_ratio_matches_plain_run(self):
        cfg = _small_cfg(seed=5, include_default=False)
        plain = ga_run(cfg, sphere)
        screened = ga_dsnn_run(cfg, sphere, screen_ratio=1.0)
        self.assertEqual(plain.best, screened.best)
        self.assertEqual(plain.history, screened.history)
        self.assertEqual(plain.true_evals, screened.true_evals)

    def test_best_is_simulated(self):
        cfg = _small_cfg(seed=1, include_default=False)
        result = ga_dsnn_run(
            cfg, sphere, screen_ratio=0.5,
            surrogate_cfg=SurrogateConfig(hidden_units=10))
        self.assertEqual(result.record.j, sphere(result.best.genes))
        self.assertIsNotNone(result.surrogate)
        self.assertTrue(np.all(np.diff(result.history) <= 0))

    def test_true_evaluation_budget(self):
        cfg = _small_cfg(seed=2, include_default=False)
        objective = FunctionObjective(sphere)
        result = ga_dsnn_run(cfg, objective, screen_ratio=0.3)
        per_gen = int(math.ceil(0.3 * (cfg.pop_size - cfg.elite_count)))
        expected = cfg.pop_size + cfg.max_generations * per_gen
        self.assertEqual(result.true_evals, expected)
        self.assertEqual(objective.n_true, expected)
        self.assertTrue(
            all(entry.true_evals == per_gen for entry in result.log[1:]))

    def test_bad_ratio(self):
        for ratio in (0.0, -0.1, 1.5):
            with self.assertRaises(DomainError):
                ga_dsnn_run(_small_cfg(), sphere, screen_ratio=ratio)


class TestGaConfig(TestCase):

    def test_defaults(self):
        cfg = GaConfig()
        self.assertEqual(cfg.pop_size, 100)
        self.assertEqual(cfg.elite_count, 5)
        self.assertEqual(cfg.crossover_rate, 0.2)
        self.assertEqual(cfg.mutation_rate, 0.02)
        self.assertEqual(cfg.max_generations, 50)

    def test_validation(self):
        for kwargs in (
                {'pop_size': 1},
                {'pop_size': 10, 'elite_count': 10},
                {'crossover_rate': 1.5},
                {'mutation_rate': -0.1},
                {'max_generations': 0},
                {'pop_size': 2.5},
                {'mutation_sigma': 0.0},
                {'pop_size': 4, 'elite_count': 1, 'tournament_size': 5}):
            with self.assertRaises(DomainError):
                GaConfig(**kwargs)


class TestChromosome(TestCase):

    def test_default(self):
        chrom = Chromosome.default()
        self.assertEqual(chrom.genes, (0.5,) * N_GENES)
        self.assertEqual(len(chrom.quads()), 3)
        system = chrom.system()
        self.assertEqual(system.e.high, 0.032)
        self.assertEqual(system.ec.high, 100.0)

    def test_validation(self):
        with self.assertRaises(DomainError):
            Chromosome((0.5,) * 11)
        with self.assertRaises(DomainError):
            Chromosome((0.5,) * 11 + (0.995,))
        with self.assertRaises(DomainError):
            FitnessRecord(Chromosome.default(), -1.0)
        with self.assertRaises(DomainError):
            FitnessRecord(Chromosome.default(), 1.0, evaluated_by='oracle')

    def test_surrogate_record_may_be_negative(self):
        record = FitnessRecord(
            Chromosome.default(), -0.1, evaluated_by='surrogate')
        self.assertEqual(record.j, -0.1)


def _power_trace(power):
    t = np.arange(101) * 0.01
    return SimTrace(t=t, f_err=np.zeros(101), p_gen=np.full(101, power))


@pytest.mark.parametrize('power, expected', [
    (400.0, 1.0),
    (0.0, 0.0),
    (200.0, 0.5),
])
def test_efficiency(power, expected):
    assert efficiency(_power_trace(power), 400.0) == pytest.approx(expected)


def test_efficiency_window():
    trace = _power_trace(100.0)
    assert efficiency(trace, 400.0, t1=0.2, t2=0.6) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        efficiency(trace, 400.0, t1=0.5, t2=0.5)
    with pytest.raises(DomainError):
        efficiency(trace, 0.0)


def test_efficiency_counts_delivered_power():
    t = np.arange(101) * 0.01
    trace = SimTrace(t=t, f_err=np.zeros(101), p_gen=np.full(101, 400.0),
                     p_slc=np.full(101, 100.0))
    assert efficiency(trace, 400.0) == pytest.approx(0.75)
