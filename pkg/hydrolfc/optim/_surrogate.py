"""Single-hidden-layer fitness surrogate with a least-squares output layer.

The hidden weights and biases are drawn once and never trained; only the
output weights are fitted, by solving H*beta = y in the least-squares
sense, where H holds the hidden-unit activations of the training inputs.
"""

import logging
import warnings
from dataclasses import dataclass, replace

import numpy as np

from hydrolfc.errors import DomainError
from ._config import ACTIVATIONS, SurrogateConfig


logger = logging.getLogger(__name__)


def activate(net, activation, gain=1.0, threshold=0.0):
    """Applies a hidden-unit activation to net inputs.

    'spike-rate' is the normalized firing rate of a threshold unit,
    clamp(gain*(net - threshold), 0, 1); 'sigmoid' is the logistic
    function and 'identity' passes net through.
    """
    if activation == 'spike-rate':
        return np.clip(gain * (net - threshold), 0.0, 1.0)
    if activation == 'sigmoid':
        return 1.0 / (1.0 + np.exp(-gain * (net - threshold)))
    if activation == 'identity':
        return net
    raise DomainError("Unknown activation {}".format(activation))


@dataclass(frozen=True, eq=False)
class SurrogateNet:
    """Hidden weights w (n inputs x m units), biases b, output weights beta.

    beta is None until the net is trained. residual is the Euclidean norm
    of the training misfit and rank_deficient flags a training matrix of
    rank below m, in which case beta is the minimum-norm solution.
    """
    w: np.ndarray
    b: np.ndarray
    beta: np.ndarray = None
    activation: str = 'spike-rate'
    gain: float = 1.0
    threshold: float = 0.0
    residual: float = None
    rank_deficient: bool = False

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.w, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if w.shape[1] != b.shape[0]:
            raise DomainError("Hidden weights and biases disagree on m.")
        if self.activation not in ACTIVATIONS:
            raise DomainError("Unknown activation {}".format(self.activation))
        object.__setattr__(self, 'w', w)
        object.__setattr__(self, 'b', b)
        if self.beta is not None:
            beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
            if beta.shape != b.shape:
                raise DomainError("Need one output weight per hidden unit.")
            object.__setattr__(self, 'beta', beta)

    @classmethod
    def random(cls, n_inputs, config=None, rng=None):
        """Draws an untrained net with uniform [-1, 1] hidden parameters."""
        if config is None:
            config = SurrogateConfig()
        if rng is None:
            rng = np.random.default_rng(0)
        m = config.hidden_units
        return cls(
            w=rng.uniform(-1.0, 1.0, (n_inputs, m)),
            b=rng.uniform(-1.0, 1.0, m),
            activation=config.activation, gain=config.gain,
            threshold=config.threshold)

    @property
    def n_inputs(self):
        return self.w.shape[0]

    @property
    def hidden_units(self):
        return self.w.shape[1]

    @property
    def trained(self):
        return self.beta is not None

    def truncated(self, m):
        """Returns an untrained net keeping only the first m hidden units."""
        return replace(
            self, w=self.w[:, :m], b=self.b[:m], beta=None, residual=None,
            rank_deficient=False)

    def hidden(self, inputs):
        """Returns the hidden-layer output matrix H of shape (p, m)."""
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        if inputs.shape[1] != self.n_inputs:
            raise DomainError("Expected {} inputs, got {}".format(
                self.n_inputs, inputs.shape[1]))
        return activate(
            inputs @ self.w + self.b, self.activation, self.gain,
            self.threshold)


def _genes_of(item):
    return np.asarray(getattr(item, 'genes', item), dtype=float)


def surrogate_train(samples, net=None, config=None, rng=None):
    """Fits the output weights of a surrogate to (genes, J) samples.

    Arguments
    ---------
    samples : sequence of (genes, float) pairs
        Training inputs, given as gene arrays or Chromosomes, with their
        true objective values.
    net : SurrogateNet, optional
        The net whose hidden layer is used. A random one is drawn from
        config and rng when not given.
    config : SurrogateConfig, optional
        Shape of a freshly drawn net.
    rng : numpy.random.Generator, optional
        Source of a freshly drawn net's hidden parameters.

    Returns
    -------
    SurrogateNet
        The trained net, with its training residual.
    """
    samples = list(samples)
    if not samples:
        raise DomainError("No training samples given.")
    inputs = np.stack([_genes_of(genes) for genes, _ in samples])
    targets = np.array([float(j) for _, j in samples])
    if net is None:
        net = SurrogateNet.random(inputs.shape[1], config, rng)
    m = net.hidden_units
    if len(samples) < m:
        raise DomainError("Training needs at least {} samples, got {}".format(
            m, len(samples)))
    hmat = net.hidden(inputs)
    beta, _, rank, _ = np.linalg.lstsq(hmat, targets, rcond=None)
    residual = float(np.linalg.norm(hmat @ beta - targets))
    deficient = rank < m
    if deficient:
        warnings.warn(
            "Surrogate hidden matrix has rank {} < {}; using the "
            "minimum-norm output weights.".format(rank, m))
    if not np.all(np.isfinite(beta)):
        raise DomainError("Surrogate training produced non-finite weights.")
    logger.debug(
        "Surrogate trained on %d samples, residual %.4g.", len(samples),
        residual)
    return replace(net, beta=beta, residual=residual, rank_deficient=deficient)


def predict_batch(net, inputs):
    """Returns the surrogate estimates for a (p, n) input array."""
    if not net.trained:
        raise DomainError("The surrogate has not been trained.")
    return net.hidden(inputs) @ net.beta


def surrogate_predict(net, chromosome):
    """Returns the surrogate estimate of one chromosome's objective."""
    return float(predict_batch(net, _genes_of(chromosome)[None, :])[0])
