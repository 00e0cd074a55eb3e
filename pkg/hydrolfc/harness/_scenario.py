"""Scenario files: defaults, loading, validation and controller building."""

import os
import copy
import math
import logging
from dataclasses import dataclass

import numpy as np
import yaml

from hydrolfc.errors import DomainError, ScenarioError
from hydrolfc.plant import PlantParams, TurbineRating, SlcLadder
from hydrolfc.control import (
    GainSet,
    PdController,
    AdaptivePidController,
    FuzzyPdController,
)
from hydrolfc.fuzzy import FuzzySystem
from hydrolfc.optim import (
    GaConfig,
    SurrogateConfig,
    Chromosome,
    check_screen_ratio,
)
from hydrolfc.sim import ACTUATORS
from hydrolfc.util import deep_merge, unknown_key_paths


logger = logging.getLogger(__name__)


# ======= module-specific constants ======

CONTROLLER_KINDS = (
    'pd', 'pid-adaptive', 'fuzzy-pd', 'fuzzy-pd-ga', 'fuzzy-pd-ga-dsnn')
GA_KINDS = ('fuzzy-pd-ga', 'fuzzy-pd-ga-dsnn')
FUZZY_KINDS = ('fuzzy-pd',) + GA_KINDS
INTEGRATION_RULES = ('rectangle', 'trapezoid')

DEFAULTS = {
    'seed': 0,
    'horizon': 10.0,
    'controller': 'fuzzy-pd',
    'actuator': 'slc',
    'pll_tau': 0.0,
    'blowup_hz': 10.0,
    'penalty': 1.0e6,
    'load_events': [],
    'plant': {
        'f_base': 50.0, 'p_base': 500.0, 'inertia': 3.0, 'damping': 1.0,
        't_gov': 0.2, 't_water': 1.0, 'dt': 0.001,
    },
    'turbine': {'flow': 5.0, 'head': 10.0, 'efficiency': 0.91},
    'slc': {'step_kw': 1.75, 'n_bits': 8, 'initial_code': 128},
    'controllers': {
        'pd': {'kp': 0.04, 'kd': 0.1},
        'pid-adaptive': {
            'kp': 0.1, 'ki': 0.04, 'kd': 0.0, 'mu': 1.0e-4,
            'output_limit': 0.45,
            'boxes': {'kp': [0.0, 1.0], 'ki': [0.0, 0.5], 'kd': [0.0, 0.5]},
        },
        'fuzzy-pd': {
            'ge': 0.012, 'gce': 50.0, 'gu': 10.0, 'mu': 0.0,
            'boxes': {'gu': [0.0, 100.0]},
            'genes': None,
            'scales': {'e': 0.032, 'ec': 100.0, 'u': 0.032},
        },
    },
    'ga': {
        'pop_size': 100, 'elite_count': 5, 'crossover_rate': 0.2,
        'mutation_rate': 0.02, 'max_generations': 50, 'tournament_size': 3,
        'blend_alpha': 0.5, 'mutation_sigma': 0.1, 'include_default': True,
    },
    'dsnn': {
        'screen_ratio': 0.5, 'hidden_units': 20, 'activation': 'spike-rate',
        'gain': 1.0, 'threshold': 0.0,
    },
    'metrics': {
        'settle_band': 0.05, 'tail_fraction': 0.1, 'rule': 'rectangle',
    },
}


def default_config():
    """Returns a fresh copy of the complete default scenario tree."""
    return copy.deepcopy(DEFAULTS)


# ======= types ======

@dataclass(frozen=True)
class LoadEvent:
    """A step change of the consumer load, in kW, at a time, in s."""
    time: float
    delta_kw: float

    def to_dict(self):
        return {'time': self.time, 'delta_kw': self.delta_kw}


def _gains(block):
    boxes = {
        name: tuple(float(x) for x in box)
        for name, box in (block.get('boxes') or {}).items()}
    kwargs = {
        key: float(val) for key, val in block.items()
        if key in ('kp', 'ki', 'kd', 'mu', 'ge', 'gce', 'gu', 'output_limit')}
    return GainSet(boxes=boxes, **kwargs)


@dataclass(frozen=True, eq=False)
class Scenario:
    """A validated closed-loop experiment.

    Built from the complete configuration tree it echoes back through
    to_dict; every other field is parsed from that tree.
    """
    config: dict
    controller: str
    seed: int
    horizon: float
    plant: PlantParams
    turbine: TurbineRating
    ladder: SlcLadder
    slc_initial_code: int
    actuator: str
    pll_tau: float
    blowup_hz: float
    penalty: float
    load_events: tuple
    pd_gains: GainSet
    pid_gains: GainSet
    fuzzy_gains: GainSet
    fuzzy_scales: dict
    fuzzy_genes: Chromosome
    ga: GaConfig
    surrogate: SurrogateConfig
    screen_ratio: float
    settle_band: float
    tail_fraction: float
    rule: str

    @classmethod
    def from_dict(cls, tree):
        """Builds a scenario from a (partial) configuration tree.

        Arguments
        ---------
        tree : dict
            User configuration, deep-merged over the defaults. Every key
            path must exist in the default tree.

        Returns
        -------
        Scenario
            The validated scenario.
        """
        if tree is None:
            tree = {}
        if not isinstance(tree, dict):
            raise ScenarioError("A scenario is a mapping of settings.")
        unknown = unknown_key_paths(tree, DEFAULTS)
        if unknown:
            raise ScenarioError("Unknown scenario keys: {}".format(
                ', '.join(unknown)))
        config = deep_merge(DEFAULTS, tree)
        try:
            return cls._parse(config)
        except DomainError as exc:
            raise ScenarioError(str(exc)) from exc
        except (TypeError, KeyError, AttributeError) as exc:
            raise ScenarioError(
                "Malformed scenario setting: {}".format(exc)) from exc

    @classmethod
    def _parse(cls, config):
        kind = config['controller']
        if kind not in CONTROLLER_KINDS:
            raise ScenarioError("Unknown controller {}; expected one of {}"
                                .format(kind, ', '.join(CONTROLLER_KINDS)))
        if config['actuator'] not in ACTUATORS:
            raise ScenarioError("Unknown actuator {}".format(
                config['actuator']))
        plant = PlantParams(
            **{k: float(v) for k, v in config['plant'].items()})
        horizon = float(config['horizon'])
        if not (math.isfinite(horizon) and horizon >= 2 * plant.dt):
            raise ScenarioError("Horizon must span at least two steps.")
        slc = config['slc']
        ladder = SlcLadder(step_kw=float(slc['step_kw']),
                           n_bits=int(slc['n_bits']))
        initial_code = int(slc['initial_code'])
        if not 0 <= initial_code <= ladder.max_code:
            raise ScenarioError("Initial SLC code outside the ladder.")
        for ev in config['load_events']:
            if set(ev) != {'time', 'delta_kw'}:
                raise ScenarioError(
                    "A load event has exactly a time and a delta_kw.")
        events = tuple(
            LoadEvent(float(ev['time']), float(ev['delta_kw']))
            for ev in config['load_events'])
        times = [ev.time for ev in events]
        if times != sorted(times):
            raise ScenarioError("Load events must be time-ordered.")
        for ev in events:
            if not (0 <= ev.time <= horizon and math.isfinite(ev.delta_kw)):
                raise ScenarioError(
                    "Load event {} lies outside [0, {}] s.".format(
                        ev, horizon))
        fuzzy = config['controllers']['fuzzy-pd']
        genes = fuzzy['genes']
        chromosome = Chromosome.default() if genes is None else Chromosome(
            genes)
        scales = {k: float(v) for k, v in fuzzy['scales'].items()}
        if set(scales) != {'e', 'ec', 'u'} or min(scales.values()) <= 0:
            raise ScenarioError("Fuzzy scales e, ec and u must be positive.")
        dsnn = config['dsnn']
        check_screen_ratio(float(dsnn['screen_ratio']))
        metrics = config['metrics']
        if metrics['rule'] not in INTEGRATION_RULES:
            raise ScenarioError("Unknown integration rule {}".format(
                metrics['rule']))
        if not 0 < float(metrics['tail_fraction']) <= 0.5:
            raise ScenarioError("Tail fraction must be in (0, 0.5].")
        if not float(metrics['settle_band']) > 0:
            raise ScenarioError("Settling band must be positive.")
        seed = int(config['seed'])
        for name in ('pll_tau', 'blowup_hz', 'penalty'):
            if not float(config[name]) >= 0:
                raise ScenarioError("{} must be non-negative.".format(name))
        if not float(config['blowup_hz']) > 0:
            raise ScenarioError("The blow-up bound must be positive.")
        return cls(
            config=config,
            controller=kind,
            seed=seed,
            horizon=horizon,
            plant=plant,
            turbine=TurbineRating(**{
                k: float(v) for k, v in config['turbine'].items()}),
            ladder=ladder,
            slc_initial_code=initial_code,
            actuator=config['actuator'],
            pll_tau=float(config['pll_tau']),
            blowup_hz=float(config['blowup_hz']),
            penalty=float(config['penalty']),
            load_events=events,
            pd_gains=_gains(config['controllers']['pd']),
            pid_gains=_gains(config['controllers']['pid-adaptive']),
            fuzzy_gains=_gains(fuzzy),
            fuzzy_scales=scales,
            fuzzy_genes=chromosome,
            ga=GaConfig(seed=seed, **config['ga']),
            surrogate=SurrogateConfig(
                hidden_units=int(dsnn['hidden_units']),
                activation=dsnn['activation'], gain=float(dsnn['gain']),
                threshold=float(dsnn['threshold'])),
            screen_ratio=float(dsnn['screen_ratio']),
            settle_band=float(config['metrics']['settle_band']),
            tail_fraction=float(config['metrics']['tail_fraction']),
            rule=config['metrics']['rule'],
        )

    def to_dict(self):
        """Returns the complete configuration tree of this scenario."""
        return copy.deepcopy(self.config)

    def with_overrides(self, tree):
        """Returns a new scenario with the given partial tree merged in."""
        return Scenario.from_dict(deep_merge(self.config, tree))

    def with_controller(self, kind):
        return self.with_overrides({'controller': kind})

    @property
    def dt(self):
        return self.plant.dt

    @property
    def n_steps(self):
        return int(round(self.horizon / self.plant.dt))

    def event_index(self, event):
        """Returns the sample at which an event takes effect."""
        return int(round(event.time / self.plant.dt))

    @property
    def t_disturbance(self):
        """Sample time of the first load event, or 0 without events."""
        if not self.load_events:
            return 0.0
        return self.event_index(self.load_events[0]) * self.plant.dt

    def load_profile_kw(self):
        """Returns the consumer load deviation, in kW, at every sample."""
        profile = np.zeros(self.n_steps)
        for event in self.load_events:
            profile[self.event_index(event):] += event.delta_kw
        return profile


# ======= loading ======

def load_scenario(path, overrides=None):
    """Reads a scenario from a YAML file or a run manifest.

    Arguments
    ---------
    path : str
        Path to a YAML scenario file, or to a manifest.json written by a
        run, whose echoed scenario is then used.
    overrides : dict, optional
        A partial tree merged over the file's contents.

    Returns
    -------
    Scenario
        The validated scenario.
    """
    path = os.path.expanduser(path)
    with open(path, 'r') as file_obj:
        try:
            tree = yaml.safe_load(file_obj)
        except yaml.YAMLError as exc:
            raise ScenarioError("Cannot parse {}: {}".format(path, exc)) \
                from exc
    if tree is None:
        tree = {}
    if isinstance(tree, dict) and 'scenario' in tree and 'version' in tree:
        logger.info("Reading the scenario echoed by manifest %s.", path)
        tree = tree['scenario']
    if overrides:
        if not isinstance(tree, dict):
            raise ScenarioError("A scenario is a mapping of settings.")
        tree = deep_merge(tree, overrides)
    return Scenario.from_dict(tree)


# ======= controllers ======

def build_controller(scenario, kind=None, genes=None):
    """Returns the controller of the given kind configured by a scenario.

    Arguments
    ---------
    scenario : Scenario
        Supplies the gain blocks, fuzzy genes and universe scales.
    kind : str, optional
        Controller kind. Defaults to the scenario's own.
    genes : Chromosome, optional
        Fuzzy genes overriding the scenario's, e.g. a GA result.

    Returns
    -------
    object
        A PdController, AdaptivePidController or FuzzyPdController.
    """
    if kind is None:
        kind = scenario.controller
    if kind == 'pd':
        return PdController(scenario.pd_gains)
    if kind == 'pid-adaptive':
        return AdaptivePidController(scenario.pid_gains)
    if kind in FUZZY_KINDS:
        if genes is None:
            genes = scenario.fuzzy_genes
        system = FuzzySystem.from_genes(
            genes.as_array(), scenario.fuzzy_scales)
        return FuzzyPdController(system, scenario.fuzzy_gains)
    raise ScenarioError("Unknown controller {}".format(kind))
