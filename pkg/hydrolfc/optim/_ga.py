"""Real-coded genetic algorithm with optional surrogate pre-screening.

Every random draw comes from a counter-based stream keyed by (seed,
generation, individual, purpose), so a run is reproducible no matter how
fitness evaluations are scheduled.
"""

import math
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from hydrolfc.fuzzy import GENE_MIN, GENE_MAX
from ._config import GaConfig, SurrogateConfig, check_screen_ratio
from ._chromosome import N_GENES, DEFAULT_GENE, Chromosome, FitnessRecord
from ._surrogate import SurrogateNet, surrogate_train, predict_batch
from ._fitness import as_objective


logger = logging.getLogger(__name__)


# ======= module-specific constants ======

INIT_STREAM = 0
BREED_STREAM = 1
SURROGATE_STREAM = 2


def stream(seed, generation, index, purpose):
    """Returns the random generator of one (generation, index, purpose)."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence([seed, generation, index, purpose])))


# ======= types ======

@dataclass(frozen=True)
class GenerationLog:
    """One row of the optimization log."""
    generation: int
    best_j: float
    mean_j: float
    true_evals: int

    def to_dict(self):
        return {
            'generation': self.generation, 'best_j': self.best_j,
            'mean_j': self.mean_j, 'true_evals': self.true_evals}


@dataclass(frozen=True, eq=False)
class GaResult:
    """Outcome of a GA run.

    history holds the best-so-far objective after every generation,
    generation 0 being the initial population, and is non-increasing.
    Unpacks as (best, history).
    """
    best: Chromosome
    record: FitnessRecord
    history: tuple
    log: tuple
    true_evals: int
    surrogate: SurrogateNet = None

    def __iter__(self):
        return iter((self.best, self.history))


# ======= operators ======

def tournament(rng, j, size):
    """Returns the index of the best of size uniformly drawn contenders."""
    contenders = rng.integers(0, len(j), size)
    return int(contenders[np.argmin(j[contenders])])


def blend_crossover(rng, first, second, alpha):
    """BLX-alpha: uniform draw from the parents' range extended by alpha."""
    low = np.minimum(first, second)
    high = np.maximum(first, second)
    span = high - low
    return rng.uniform(low - alpha * span, high + alpha * span)


def mutate(rng, genes, rate, sigma):
    """Adds N(0, sigma) noise to each gene with probability rate."""
    mask = rng.random(len(genes)) < rate
    return genes + mask * rng.normal(0.0, sigma, len(genes))


def breed(cfg, population, j, generation, index):
    """Produces one offspring from its own random stream."""
    rng = stream(cfg.seed, generation, index, BREED_STREAM)
    first = population[tournament(rng, j, cfg.tournament_size)]
    second = population[tournament(rng, j, cfg.tournament_size)]
    if rng.random() < cfg.crossover_rate:
        child = blend_crossover(rng, first, second, cfg.blend_alpha)
    else:
        child = first.copy()
    child = mutate(rng, child, cfg.mutation_rate, cfg.mutation_sigma)
    return np.clip(child, GENE_MIN, GENE_MAX)


def initial_population(cfg):
    """Returns the uniformly drawn (pop_size, 12) initial gene matrix."""
    population = np.stack([
        stream(cfg.seed, 0, idx, INIT_STREAM).uniform(
            GENE_MIN, GENE_MAX, N_GENES)
        for idx in range(cfg.pop_size)])
    if cfg.include_default:
        population[0] = DEFAULT_GENE
    return population


# ======= evolution ======

def _screen(net, samples, offspring, n_true):
    """Trains the surrogate and returns the offspring rows to simulate.

    Returns None, meaning every row is simulated, while too few samples
    exist to train any hidden unit.
    """
    if not samples:
        return None, None
    m = min(net.hidden_units, len(samples))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        trained = surrogate_train(samples, net=net.truncated(m))
    if caught:
        logger.debug("Surrogate training: %s", caught[-1].message)
    estimates = predict_batch(trained, offspring)
    order = np.argsort(estimates, kind='stable')
    return np.sort(order[:n_true]), (trained, np.maximum(estimates, 0.0))


def _evolve(cfg, objective, screen_ratio=1.0, surrogate_cfg=None):
    screened = screen_ratio < 1
    net = None
    if screened:
        if surrogate_cfg is None:
            surrogate_cfg = SurrogateConfig()
        net = SurrogateNet.random(
            N_GENES, surrogate_cfg,
            stream(cfg.seed, 0, 0, SURROGATE_STREAM))
    trained = None
    samples = []

    population = initial_population(cfg)
    j, diverged = objective.evaluate(population)
    is_true = np.ones(cfg.pop_size, dtype=bool)
    true_evals = cfg.pop_size
    samples.extend(
        (genes, val) for genes, val, div in zip(population, j, diverged)
        if not div)
    best_idx = int(np.argmin(j))
    best_genes, best_j = population[best_idx].copy(), float(j[best_idx])
    best_penalized = bool(diverged[best_idx])
    history = [best_j]
    log = [GenerationLog(0, best_j, float(np.mean(j)), cfg.pop_size)]
    logger.info(
        "Generation 0: best J %.6g, mean J %.6g, %d true evaluations.",
        best_j, log[0].mean_j, cfg.pop_size)

    n_off = cfg.pop_size - cfg.elite_count
    for gen in range(1, cfg.max_generations + 1):
        true_rank = np.where(is_true, j, np.inf)
        elites = np.argsort(true_rank, kind='stable')[:cfg.elite_count]
        offspring = np.stack([
            breed(cfg, population, j, gen, idx) for idx in range(n_off)])

        off_j = np.zeros(n_off)
        off_div = np.zeros(n_off, dtype=bool)
        off_true = np.ones(n_off, dtype=bool)
        rows = None
        if screened:
            n_true = int(math.ceil(screen_ratio * n_off))
            rows, fitted = _screen(net, samples, offspring, n_true)
            if rows is not None:
                trained, estimates = fitted
                off_true[:] = False
                off_true[rows] = True
                off_j = estimates
        if rows is None:
            rows = np.arange(n_off)
        sim_j, sim_div = objective.evaluate(offspring[rows])
        off_j[rows] = sim_j
        off_div[rows] = sim_div
        samples.extend(
            (offspring[r], val) for r, val, div in zip(rows, sim_j, sim_div)
            if not div)

        population = np.concatenate([population[elites], offspring])
        j = np.concatenate([j[elites], off_j])
        diverged = np.concatenate([diverged[elites], off_div])
        is_true = np.concatenate([np.ones(len(elites), dtype=bool), off_true])
        true_evals += len(rows)

        true_j = np.where(is_true, j, np.inf)
        gen_best = int(np.argmin(true_j))
        if true_j[gen_best] < best_j:
            best_genes = population[gen_best].copy()
            best_j = float(true_j[gen_best])
            best_penalized = bool(diverged[gen_best])
        history.append(best_j)
        entry = GenerationLog(
            gen, best_j, float(np.mean(j[is_true])), len(rows))
        log.append(entry)
        logger.info(
            "Generation %d: best J %.6g, mean J %.6g, %d true evaluations.",
            gen, best_j, entry.mean_j, entry.true_evals)

    best = Chromosome(best_genes)
    record = FitnessRecord(
        chromosome=best, j=best_j,
        evaluated_by=getattr(objective, 'evaluated_by', 'function'),
        penalized=best_penalized)
    if best_penalized:
        logger.warning("Every simulated individual diverged.")
    return GaResult(
        best=best, record=record, history=tuple(history), log=tuple(log),
        true_evals=true_evals, surrogate=trained)


def ga_run(cfg, scenario, workers=None):
    """Tunes the fuzzy PD genes with a real-coded genetic algorithm.

    Offspring are bred by tournament selection, blend crossover at the
    crossover rate and per-gene Gaussian mutation, clamped to the gene
    range; the elite individuals are copied unchanged.

    Arguments
    ---------
    cfg : GaConfig
        The algorithm's hyperparameters.
    scenario : hydrolfc.harness.Scenario or callable
        The closed-loop scenario whose quadratic objective is minimized.
        A callable mapping a 12-gene array to an objective value, or any
        object with an evaluate(genes) method, is minimized instead.
    workers : int, optional
        Fitness worker threads for scenario objectives.

    Returns
    -------
    GaResult
        The best chromosome, its record, the best-so-far history and the
        per-generation log.
    """
    if cfg is None:
        cfg = GaConfig()
    return _evolve(cfg, as_objective(scenario, workers), screen_ratio=1.0)


def ga_dsnn_run(cfg, scenario, screen_ratio=0.5, surrogate_cfg=None,
                workers=None):
    """Runs the genetic algorithm with surrogate pre-screening.

    Every generation the surrogate is retrained on all simulated, non
    diverged individuals so far; offspring are ranked by its estimate and
    only the best screen_ratio fraction is simulated. The others carry
    their estimate into selection but are never elites, so the returned
    best is always a simulated individual.

    Arguments
    ---------
    cfg : GaConfig
        The algorithm's hyperparameters.
    scenario : hydrolfc.harness.Scenario or callable
        The objective, as for ga_run.
    screen_ratio : float, default 0.5
        Fraction of offspring simulated each generation, in (0, 1]. With
        1 the run is identical to ga_run.
    surrogate_cfg : SurrogateConfig, optional
        Shape of the surrogate network.
    workers : int, optional
        Fitness worker threads for scenario objectives.

    Returns
    -------
    GaResult
        As for ga_run, plus the last trained surrogate.
    """
    check_screen_ratio(screen_ratio)
    if cfg is None:
        cfg = GaConfig()
    return _evolve(
        cfg, as_objective(scenario, workers), screen_ratio=screen_ratio,
        surrogate_cfg=surrogate_cfg)
