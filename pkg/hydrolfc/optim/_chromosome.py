"""The twelve-gene encoding of a fuzzy PD controller."""

from dataclasses import dataclass

import numpy as np

from hydrolfc.errors import DomainError
from hydrolfc.fuzzy import GENE_MIN, GENE_MAX, GeneQuad, FuzzySystem


N_GENES = 12
DEFAULT_GENE = 0.5
EVALUATORS = ('simulation', 'function', 'surrogate')


@dataclass(frozen=True)
class Chromosome:
    """Three gene quads, for the e, ec and u families in that order."""
    genes: tuple

    def __post_init__(self):
        genes = tuple(float(g) for g in np.ravel(self.genes))
        if len(genes) != N_GENES:
            raise DomainError("A chromosome has exactly 12 genes.")
        for gene in genes:
            if not (np.isfinite(gene) and GENE_MIN <= gene <= GENE_MAX):
                raise DomainError("Gene {} is outside [{}, {}]".format(
                    gene, GENE_MIN, GENE_MAX))
        object.__setattr__(self, 'genes', genes)

    @classmethod
    def default(cls):
        """The symmetric chromosome with every gene at 0.5."""
        return cls((DEFAULT_GENE,) * N_GENES)

    def quads(self):
        """Returns the e, ec and u GeneQuads."""
        return tuple(
            GeneQuad(*self.genes[start:start + 4]) for start in (0, 4, 8))

    def as_array(self):
        return np.array(self.genes)

    def system(self, scales=None, rules=None):
        """Decodes the chromosome into a FuzzySystem."""
        return FuzzySystem.from_genes(self.as_array(), scales, rules)


@dataclass(frozen=True)
class FitnessRecord:
    """A chromosome with its objective value and how it was obtained.

    evaluated_by is 'simulation' for closed-loop runs, whose quadratic
    objective is never negative, 'function' for a plain objective function
    and 'surrogate' for a network estimate.
    """
    chromosome: Chromosome
    j: float
    evaluated_by: str = 'simulation'
    penalized: bool = False

    def __post_init__(self):
        if self.evaluated_by not in EVALUATORS:
            raise DomainError(
                "Unknown evaluator {}".format(self.evaluated_by))
        if self.evaluated_by == 'simulation' and not self.j >= 0:
            raise DomainError("A simulated objective is never negative.")
