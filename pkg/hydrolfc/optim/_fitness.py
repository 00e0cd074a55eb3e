"""Closed-loop objective of the fuzzy PD tuning problem."""

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from hydrolfc.errors import DomainError
from hydrolfc.control import FuzzyPdController
from hydrolfc.fuzzy import FuzzySystem
from hydrolfc.sim import run_closed_loop
from hydrolfc._cfg import cfg_workers
from ._chromosome import N_GENES, Chromosome, FitnessRecord


logger = logging.getLogger(__name__)


class ScenarioObjective:
    """Evaluates gene matrices by simulating the scenario's closed loop.

    Rows are split into contiguous chunks evaluated on a thread pool. Each
    row's arithmetic is independent of the chunking, so results do not
    depend on the worker count. Rows whose loop diverged are assigned the
    scenario's penalty.

    Parameters
    ----------
    scenario : hydrolfc.harness.Scenario
        Supplies the plant, load events, fuzzy gains, universe scales,
        blow-up bound and penalty.
    workers : int, optional
        Worker threads. Defaults to the configured HYDROLFC_WORKERS.
    """

    evaluated_by = 'simulation'

    def __init__(self, scenario, workers=None):
        self.scenario = scenario
        self.workers = cfg_workers() if workers is None else max(1, workers)
        self.n_true = 0

    def _controller(self, genes):
        system = FuzzySystem.from_genes(genes, self.scenario.fuzzy_scales)
        return FuzzyPdController(system, self.scenario.fuzzy_gains)

    def _run_chunk(self, genes):
        if self.scenario.fuzzy_gains.mu > 0:
            # an adapted gain is shared by a batch, so each row runs alone
            costs, flags = [], []
            for row in genes:
                res = run_closed_loop(
                    self.scenario, self._controller(row), record=False)
                costs.append(res.cost[0])
                flags.append(res.diverged[0])
            return np.array(costs), np.array(flags, dtype=bool)
        res = run_closed_loop(
            self.scenario, self._controller(genes), n=len(genes),
            record=False)
        return res.cost, res.diverged

    def evaluate(self, genes):
        """Returns the objective values and divergence flags of gene rows.

        Arguments
        ---------
        genes : numpy.ndarray
            An (n, 12) gene matrix.

        Returns
        -------
        j : numpy.ndarray
            The objective of every row, in Hz^2*s.
        diverged : numpy.ndarray
            True for rows that were penalized.
        """
        genes = np.atleast_2d(np.asarray(genes, dtype=float))
        if genes.shape[1] != N_GENES:
            raise DomainError("Expected rows of 12 genes.")
        chunks = [
            chunk for chunk in np.array_split(
                genes, min(self.workers, len(genes))) if len(chunk)]
        if len(chunks) == 1:
            results = [self._run_chunk(chunks[0])]
        else:
            with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
                results = list(pool.map(self._run_chunk, chunks))
        cost = np.concatenate([res[0] for res in results])
        diverged = np.concatenate([res[1] for res in results])
        self.n_true += len(genes)
        if diverged.any():
            logger.debug(
                "%d of %d rows penalized.", diverged.sum(), len(genes))
        return np.where(diverged, self.scenario.penalty, cost), diverged


class FunctionObjective:
    """Wraps a plain row function f(genes) -> J as a GA objective."""

    evaluated_by = 'function'

    def __init__(self, func):
        self.func = func
        self.n_true = 0

    def evaluate(self, genes):
        genes = np.atleast_2d(np.asarray(genes, dtype=float))
        self.n_true += len(genes)
        j = np.array([float(self.func(row)) for row in genes])
        return j, np.zeros(len(genes), dtype=bool)


def as_objective(target, workers=None):
    """Returns a GA objective for a scenario or a row function."""
    if hasattr(target, 'evaluate'):
        return target
    if callable(target):
        return FunctionObjective(target)
    return ScenarioObjective(target, workers=workers)


def evaluate_fitness(chromosome, scenario):
    """Simulates one chromosome and returns its FitnessRecord."""
    j, diverged = ScenarioObjective(scenario, workers=1).evaluate(
        chromosome.as_array()[None, :])
    if diverged[0]:
        warnings.warn(
            "Closed loop diverged; objective set to the penalty {}.".format(
                scenario.penalty))
    return FitnessRecord(
        chromosome=chromosome, j=float(j[0]), evaluated_by='simulation',
        penalized=bool(diverged[0]))


def fitness(chromosome, scenario):
    """Returns the quadratic objective of a chromosome on a scenario.

    Arguments
    ---------
    chromosome : Chromosome
        The genes of the fuzzy PD controller under test.
    scenario : hydrolfc.harness.Scenario
        The closed-loop scenario.

    Returns
    -------
    float
        sum(e^2)*dt over the horizon, with e the frequency error in Hz, or
        the scenario's penalty if the loop diverged.
    """
    if not isinstance(chromosome, Chromosome):
        chromosome = Chromosome(chromosome)
    return evaluate_fitness(chromosome, scenario).j


def efficiency(trace, p_max, t1=None, t2=None):
    """Returns the power efficiency of a run over a time window.

    Arguments
    ---------
    trace : hydrolfc.metrics.SimTrace
        The run. The power counted is the generator output less what the
        dump loads absorb, i.e. the power delivered to the consumer.
    p_max : float
        The rated power, in kW.
    t1, t2 : float, optional
        Window bounds, in s. Default to the first and last samples.

    Returns
    -------
    float
        The trapezoidal integral of p_gen - p_slc over that of p_max.
    """
    if not p_max > 0:
        raise DomainError("Rated power must be positive.")
    t1 = trace.t[0] if t1 is None else t1
    t2 = trace.t[-1] if t2 is None else t2
    window = (trace.t >= t1) & (trace.t <= t2)
    if window.sum() < 2:
        raise DomainError("Efficiency window holds fewer than two samples.")
    t = trace.t[window]
    power = trace.p_gen[window] - trace.p_slc[window]
    dt = np.diff(t)
    delivered = float(np.sum(dt * (power[1:] + power[:-1]) / 2))
    return delivered / (p_max * float(t[-1] - t[0]))
