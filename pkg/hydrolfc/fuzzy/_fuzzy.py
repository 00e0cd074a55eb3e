"""Zero-order Sugeno fuzzy inference over seven-term triangular families.

Each of the three fuzzy variables (error e, error rate ec and control u)
has a family of seven triangular terms whose centers are decoded from a
quad of genes. Inference fires the 7x7 knowledge base with the product
t-norm and returns the normalized weighted average of the consequent
centers.

Every function accepts either a single family (centers of shape (7,)) or
a stack of families (shape (n, 7)), in which case inputs of shape (n,)
are evaluated row by row.
"""

from dataclasses import dataclass, field

import numpy as np
from comath.segment import LineSegment

from hydrolfc.errors import DomainError


# ======= module-specific constants ======

TERMS = ('NB', 'NM', 'NS', 'ZE', 'PS', 'PM', 'PB')
N_TERMS = len(TERMS)
GENE_MIN = 0.01
GENE_MAX = 0.99
GENE_RANGE = LineSegment(GENE_MIN, GENE_MAX, True, True)

DEFAULT_SCALES = {'e': 0.032, 'ec': 100.0, 'u': 0.032}

# Rows index the first antecedent, columns the second; the table is
# symmetric so either variable order reads the same.
RULE_TABLE = (
    ('NB', 'NB', 'NM', 'NM', 'NS', 'NS', 'ZE'),
    ('NB', 'NM', 'NM', 'NS', 'NS', 'ZE', 'PS'),
    ('NM', 'NM', 'NS', 'NS', 'ZE', 'PS', 'PS'),
    ('NM', 'NS', 'NS', 'ZE', 'PS', 'PS', 'PM'),
    ('NS', 'NS', 'ZE', 'PS', 'PS', 'PM', 'PM'),
    ('NS', 'ZE', 'PS', 'PS', 'PM', 'PM', 'PB'),
    ('ZE', 'PS', 'PS', 'PM', 'PM', 'PB', 'PB'),
)


def negate_term(term):
    """Returns the mirror term, e.g. NB for PB; ZE is its own mirror."""
    return TERMS[N_TERMS - 1 - TERMS.index(term)]


def rule_formula(i, j):
    """Returns the consequent term offset for antecedent offsets i and j.

    Offsets run from -3 (NB) to 3 (PB). The consequent is the mean of the
    two, rounded half away from zero and clamped to the term range.
    """
    mean = (i + j) / 2
    rounded = int(np.sign(mean) * np.floor(abs(mean) + 0.5))
    return max(-3, min(3, rounded))


# ======= types ======

def _check_gene(gene):
    if not (np.isfinite(gene) and gene in GENE_RANGE):
        raise DomainError("Gene {} is outside [{}, {}]".format(
            gene, GENE_MIN, GENE_MAX))


@dataclass(frozen=True)
class GeneQuad:
    """The four genes decoding the breakpoints of one fuzzy variable."""
    f1: float
    f2: float
    f3: float
    f4: float

    def __post_init__(self):
        for gene in self.as_tuple():
            _check_gene(gene)

    def as_tuple(self):
        return (self.f1, self.f2, self.f3, self.f4)


@dataclass(frozen=True)
class BreakpointSet:
    """Four universe breakpoints b1 < b2 < 0 < b3 < b4 and their scale."""
    b1: float
    b2: float
    b3: float
    b4: float
    scale: float


@dataclass(frozen=True, eq=False)
class MembershipFamily:
    """Seven ordered triangle centers, NB to PB.

    Triangles span neighbor to neighbor; the outer terms saturate to full
    membership beyond the outermost centers.
    """
    centers: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        if centers.shape[-1] != N_TERMS:
            raise DomainError("A family has exactly seven centers.")
        if not np.all(np.diff(centers, axis=-1) > 0):
            raise DomainError("Family centers must be strictly increasing.")
        if not np.all(centers[..., 3] == 0):
            raise DomainError("The ZE center must be 0.")
        object.__setattr__(self, 'centers', centers)

    @property
    def low(self):
        return self.centers[..., 0]

    @property
    def high(self):
        return self.centers[..., -1]

    def clamp(self, x):
        """Clamps x to the closed universe of the family."""
        return np.clip(x, self.low, self.high)

    def degrees(self, x):
        """Returns the membership degrees of x in the seven terms."""
        return membership_degrees(x, self.centers)


@dataclass(frozen=True)
class RuleBase:
    """The 7x7 map from (first term, second term) to consequent term."""
    table: tuple = RULE_TABLE
    index: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.table) != N_TERMS or any(
                len(row) != N_TERMS for row in self.table):
            raise DomainError("The rule base is a 7x7 table.")
        index = np.array(
            [[TERMS.index(term) for term in row] for row in self.table])
        object.__setattr__(self, 'index', index)

    def consequent(self, first, second):
        """Returns the consequent term name for two antecedent term names."""
        return self.table[TERMS.index(first)][TERMS.index(second)]


DEFAULT_RULES = RuleBase()


# ======= decoding ======

def decode_quad(quad, scale):
    """Decodes a gene quad into universe breakpoints.

    Arguments
    ---------
    quad : GeneQuad
        The genes (F1, F2, F3, F4) of one fuzzy variable.
    scale : float
        The universe scale factor of that variable.

    Returns
    -------
    BreakpointSet
        b1 = -(F4 + F3)*scale, b2 = -F3*scale, b3 = F1*scale and
        b4 = (F1 + F2)*scale.
    """
    if not (np.isfinite(scale) and scale > 0):
        raise DomainError("Universe scale must be positive.")
    return BreakpointSet(
        b1=-(quad.f4 + quad.f3) * scale,
        b2=-quad.f3 * scale,
        b3=quad.f1 * scale,
        b4=(quad.f1 + quad.f2) * scale,
        scale=scale,
    )


def build_family(breakpoints):
    """Builds the seven-term family of a breakpoint set.

    The centers are (b1, mid(b1, b2), b2, 0, b3, mid(b3, b4), b4).
    """
    b = breakpoints
    if not b.b1 < b.b2 < 0 < b.b3 < b.b4:
        raise DomainError("Breakpoints must satisfy b1 < b2 < 0 < b3 < b4.")
    return MembershipFamily(np.array([
        b.b1, (b.b1 + b.b2) / 2, b.b2, 0.0, b.b3, (b.b3 + b.b4) / 2, b.b4]))


def family_centers(quads, scale):
    """Vectorized decode: an (n, 4) gene array into (n, 7) family centers."""
    quads = np.asarray(quads, dtype=float)
    f1, f2, f3, f4 = (quads[..., i] for i in range(4))
    b1 = -(f4 + f3) * scale
    b2 = -f3 * scale
    b3 = f1 * scale
    b4 = (f1 + f2) * scale
    zero = np.zeros_like(b1)
    return np.stack(
        [b1, (b1 + b2) / 2, b2, zero, b3, (b3 + b4) / 2, b4], axis=-1)


# ======= inference ======

def _locate(x, centers):
    """Returns the left term index and right-term weight of x.

    x is clamped to the universe; its membership is then 1 - w in term k
    and w in term k + 1, with all other terms at zero.
    """
    x = np.asarray(x, dtype=float)
    shape = np.broadcast_shapes(x.shape, centers.shape[:-1])
    centers = np.broadcast_to(centers, shape + (N_TERMS,))
    x = np.asarray(np.clip(
        np.broadcast_to(x, shape), centers[..., 0], centers[..., -1]))
    k = np.sum(centers[..., 1:-1] <= x[..., None], axis=-1)
    k = np.asarray(np.minimum(k, N_TERMS - 2))
    left = np.take_along_axis(centers, k[..., None], axis=-1)[..., 0]
    right = np.take_along_axis(centers, k[..., None] + 1, axis=-1)[..., 0]
    weight = np.asarray((x - left) / (right - left))
    return k, weight


def membership_degrees(x, centers):
    """Returns the degrees of x in each of the seven terms, shape (..., 7)."""
    centers = np.asarray(centers, dtype=float)
    k, weight = _locate(x, centers)
    degrees = np.zeros(k.shape + (N_TERMS,))
    left_degree = np.asarray(1 - weight)
    np.put_along_axis(degrees, k[..., None], left_degree[..., None], -1)
    np.put_along_axis(degrees, k[..., None] + 1, weight[..., None], -1)
    return degrees


@dataclass(frozen=True, eq=False)
class FuzzySystem:
    """The e, ec and u membership families together with the rule base."""
    e: MembershipFamily
    ec: MembershipFamily
    u: MembershipFamily
    rules: RuleBase = DEFAULT_RULES

    @classmethod
    def from_genes(cls, genes, scales=None, rules=None):
        """Builds a system from 12 genes, or a stack from an (n, 12) array.

        Genes are ordered as three quads, for e, ec and u.
        """
        if scales is None:
            scales = DEFAULT_SCALES
        if rules is None:
            rules = DEFAULT_RULES
        genes = np.asarray(genes, dtype=float)
        if genes.shape[-1] != 12:
            raise DomainError("A fuzzy system is decoded from 12 genes.")
        if not np.all((genes >= GENE_MIN) & (genes <= GENE_MAX)):
            raise DomainError("Genes must lie in [{}, {}]".format(
                GENE_MIN, GENE_MAX))
        return cls(
            e=MembershipFamily(family_centers(genes[..., 0:4], scales['e'])),
            ec=MembershipFamily(
                family_centers(genes[..., 4:8], scales['ec'])),
            u=MembershipFamily(family_centers(genes[..., 8:12], scales['u'])),
            rules=rules,
        )

    def rule_weights(self, e_val, ec_val):
        """Returns the normalized 7x7 rule weights for the given inputs."""
        raw = self.e.degrees(e_val)[..., :, None] * self.ec.degrees(
            ec_val)[..., None, :]
        total = raw.sum(axis=(-2, -1))
        if np.any(total <= 0):
            raise DomainError("No rule fires for the given inputs.")
        return raw / total[..., None, None]


def infer(e_val, ec_val, system):
    """Runs zero-order Sugeno inference.

    Only the (at most) four rules whose antecedents have non-zero degree
    are fired; each weight is the product of its two antecedent degrees
    and the output is the weight-normalized sum of the consequent centers
    of the u family.

    Arguments
    ---------
    e_val : float or numpy.ndarray
        The error input, in e-universe units.
    ec_val : float or numpy.ndarray
        The error-rate input, in ec-universe units.
    system : FuzzySystem
        The families and rules.

    Returns
    -------
    float or numpy.ndarray
        The control output, in u-universe units.
    """
    ke, we = _locate(e_val, system.e.centers)
    kc, wc = _locate(ec_val, system.ec.centers)
    ke, we, kc, wc = np.broadcast_arrays(ke, we, kc, wc)
    u_centers = np.broadcast_to(system.u.centers, ke.shape + (N_TERMS,))
    index = system.rules.index
    numerator = np.zeros(ke.shape)
    total = np.zeros(ke.shape)
    for de, e_weight in ((0, 1 - we), (1, we)):
        for dc, ec_weight in ((0, 1 - wc), (1, wc)):
            weight = e_weight * ec_weight
            consequent = np.asarray(index[ke + de, kc + dc])
            center = np.take_along_axis(
                u_centers, consequent[..., None], axis=-1)[..., 0]
            numerator = numerator + weight * center
            total = total + weight
    if np.any(total <= 0):
        raise DomainError("No rule fires for the given inputs.")
    out = numerator / total
    if out.ndim == 0:
        return float(out)
    return out
