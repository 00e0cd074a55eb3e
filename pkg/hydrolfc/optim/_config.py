"""Configuration objects of the genetic algorithm and its surrogate."""

from dataclasses import dataclass

from comath.segment import LineSegment

from hydrolfc.errors import DomainError


# ======= module-specific constants ======

UNIT_INTERVAL = LineSegment(0, 1, True, True)
SCREEN_RATIO_RANGE = LineSegment(0, 1, False, True)
ACTIVATIONS = ('spike-rate', 'sigmoid', 'identity')


def _check_int(name, val, low):
    if int(val) != val or val < low:
        raise DomainError("{} must be an integer >= {}, got {}".format(
            name, low, val))


@dataclass(frozen=True)
class GaConfig:
    """Hyperparameters of the real-coded genetic algorithm.

    Parameters
    ----------
    pop_size : int, default 100
        Number of individuals per generation.
    elite_count : int, default 5
        Best true-evaluated individuals copied unchanged to the next
        generation.
    crossover_rate : float, default 0.2
        Probability an offspring is produced by blend crossover.
    mutation_rate : float, default 0.02
        Per-gene probability of Gaussian mutation.
    max_generations : int, default 50
        Number of generations bred after the initial population.
    seed : int, default 0
        Root of every random stream of a run.
    tournament_size : int, default 3
        Contenders per tournament selection.
    blend_alpha : float, default 0.5
        Extension factor of BLX crossover.
    mutation_sigma : float, default 0.1
        Standard deviation of a gene mutation.
    include_default : bool, default True
        Seed individual 0 with the symmetric 0.5 genes.
    """
    pop_size: int = 100
    elite_count: int = 5
    crossover_rate: float = 0.2
    mutation_rate: float = 0.02
    max_generations: int = 50
    seed: int = 0
    tournament_size: int = 3
    blend_alpha: float = 0.5
    mutation_sigma: float = 0.1
    include_default: bool = True

    def __post_init__(self):
        _check_int('pop_size', self.pop_size, 2)
        _check_int('elite_count', self.elite_count, 1)
        if not self.elite_count < self.pop_size:
            raise DomainError("Elite count must be below the population size.")
        for name in ('crossover_rate', 'mutation_rate'):
            if getattr(self, name) not in UNIT_INTERVAL:
                raise DomainError("{} must be in [0, 1].".format(name))
        _check_int('max_generations', self.max_generations, 1)
        _check_int('seed', self.seed, 0)
        _check_int('tournament_size', self.tournament_size, 1)
        if self.tournament_size > self.pop_size:
            raise DomainError("Tournament exceeds the population size.")
        if not self.blend_alpha >= 0:
            raise DomainError("Blend alpha must be non-negative.")
        if not self.mutation_sigma > 0:
            raise DomainError("Mutation sigma must be positive.")


@dataclass(frozen=True)
class SurrogateConfig:
    """Shape of the fitness surrogate network.

    The hidden unit count is reduced to the number of training samples
    while fewer samples than units are available.
    """
    hidden_units: int = 20
    activation: str = 'spike-rate'
    gain: float = 1.0
    threshold: float = 0.0

    def __post_init__(self):
        _check_int('hidden_units', self.hidden_units, 1)
        if self.activation not in ACTIVATIONS:
            raise DomainError("Unknown activation {}".format(self.activation))
        if not self.gain > 0:
            raise DomainError("Activation gain must be positive.")


def check_screen_ratio(screen_ratio):
    """Raises a DomainError unless the ratio lies in (0, 1]."""
    if screen_ratio not in SCREEN_RATIO_RANGE:
        raise DomainError(
            "Screen ratio must be in (0, 1], got {}".format(screen_ratio))
