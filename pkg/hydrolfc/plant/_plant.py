"""Fixed-step discrete-time model of an islanded small hydropower plant.

The plant is a linearized single-area model in per-unit quantities: a
first-order governor, a non-minimum-phase hydro turbine and the swing
dynamics of the isolated generator and its load. A secondary load
controller (SLC) made of binary-weighted dump resistors absorbs surplus
power in fixed steps.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from hydrolfc.errors import DomainError


# ======= module-specific constants ======

GRAVITY = 9.81
NOMINAL_FREQUENCY_HZ = 50.0
SLC_STEP_KW = 1.75
SLC_BITS = 8


def _check_finite(*values):
    for value in values:
        if not np.all(np.isfinite(value)):
            raise DomainError("Non-finite plant input: {}".format(value))


# ======= types ======

@dataclass(frozen=True)
class TurbineRating:
    """Hydraulic rating of the turbine.

    Parameters
    ----------
    flow : float
        Flow rate, in m^3/s.
    head : float
        Gross head, in m.
    efficiency : float
        Turbine efficiency, in [0, 1].
    gravity : float, default 9.81
        Gravitational constant, in m/s^2. Fixed.
    """
    flow: float
    head: float
    efficiency: float
    gravity: float = GRAVITY

    def __post_init__(self):
        if not (math.isfinite(self.flow) and self.flow >= 0):
            raise DomainError("Flow rate must be non-negative.")
        if not (math.isfinite(self.head) and self.head >= 0):
            raise DomainError("Gross head must be non-negative.")
        if not 0 <= self.efficiency <= 1:
            raise DomainError("Turbine efficiency must be in [0, 1].")
        if self.gravity != GRAVITY:
            raise DomainError("Gravitational constant is fixed at 9.81.")


@dataclass(frozen=True)
class PlantParams:
    """Dynamic constants of the linearized plant.

    Parameters
    ----------
    f_base : float, default 50
        Nominal frequency, in Hz.
    p_base : float, default 500
        Power base, in kW.
    inertia : float, default 3.0
        Inertia constant H, in s.
    damping : float, default 1.0
        Load damping D, in per-unit.
    t_gov : float, default 0.2
        Governor time constant, in s.
    t_water : float, default 1.0
        Water starting time, in s.
    dt : float, default 0.001
        Simulation step, in s.
    """
    f_base: float = NOMINAL_FREQUENCY_HZ
    p_base: float = 500.0
    inertia: float = 3.0
    damping: float = 1.0
    t_gov: float = 0.2
    t_water: float = 1.0
    dt: float = 0.001

    def __post_init__(self):
        if self.f_base != NOMINAL_FREQUENCY_HZ:
            raise DomainError("Nominal frequency is fixed at 50 Hz.")
        for name in ('p_base', 'inertia', 't_gov', 't_water', 'dt'):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError("{} must be positive, got {}".format(
                    name, val))
        if not (math.isfinite(self.damping) and self.damping >= 0):
            raise DomainError("Load damping must be non-negative.")
        if self.dt > self.t_gov / 10:
            raise DomainError(
                "Step dt={} exceeds a tenth of the governor time constant."
                .format(self.dt))


@dataclass(frozen=True)
class PlantState:
    """State of the plant at time t.

    All per-unit fields may be floats or equally-shaped numpy arrays; the
    latter simulates a batch of independent plants in lockstep.

    Parameters
    ----------
    df : float or numpy.ndarray
        Frequency deviation, per-unit of f_base.
    gov : float or numpy.ndarray
        Governor output, per-unit.
    turbine : float or numpy.ndarray
        Internal state of the turbine water column, per-unit.
    slc_code : int or numpy.ndarray
        Byte currently applied to the SLC switches.
    t : float
        Simulation time, in s.
    pll_hz : float or numpy.ndarray
        Last frequency-deviation reading of the phase-locked loop, in Hz.
    """
    df: float = 0.0
    gov: float = 0.0
    turbine: float = 0.0
    slc_code: int = 0
    t: float = 0.0
    pll_hz: float = 0.0

    @classmethod
    def at_rest(cls, n=None, slc_code=0):
        """Returns the zero state, optionally for a batch of n plants."""
        if n is None:
            return cls(slc_code=slc_code)
        return cls(
            df=np.zeros(n), gov=np.zeros(n), turbine=np.zeros(n),
            slc_code=np.full(n, slc_code, dtype=int), pll_hz=np.zeros(n))


@dataclass(frozen=True)
class SlcLadder:
    """An n-bit binary-weighted dump-load ladder."""
    step_kw: float = SLC_STEP_KW
    n_bits: int = SLC_BITS

    def __post_init__(self):
        if not (math.isfinite(self.step_kw) and self.step_kw > 0):
            raise DomainError("SLC step must be positive.")
        if int(self.n_bits) != self.n_bits or self.n_bits < 1:
            raise DomainError("SLC bit count must be a positive integer.")

    @property
    def max_code(self):
        return 2 ** self.n_bits - 1

    @property
    def max_kw(self):
        return self.max_code * self.step_kw


# ======= operations ======

def turbine_power(rating):
    """Returns the theoretical turbine power P = Q*h*g*ef, in kW.

    Arguments
    ---------
    rating : TurbineRating
        The hydraulic rating of the turbine.

    Returns
    -------
    float
        The turbine output power, in kW.
    """
    return rating.flow * rating.head * rating.gravity * rating.efficiency


def slc_quantize(surplus, ladder=None):
    """Maps a commanded surplus power onto the nearest SLC ladder code.

    Arguments
    ---------
    surplus : float or numpy.ndarray
        Power the dump loads are asked to absorb, in kW.
    ladder : SlcLadder, optional
        The dump-load ladder. Defaults to the 8-bit, 1.75 kW ladder.

    Returns
    -------
    code : int or numpy.ndarray
        The switch byte, clamped to [0, 2^n_bits - 1].
    absorbed : float or numpy.ndarray
        The power actually absorbed, code * step_kw, in kW.
    """
    if ladder is None:
        ladder = SlcLadder()
    surplus = np.asarray(surplus, dtype=float)
    _check_finite(surplus)
    code = np.clip(
        np.floor(surplus / ladder.step_kw + 0.5), 0, ladder.max_code)
    absorbed = code * ladder.step_kw
    if code.ndim == 0:
        return int(code), float(absorbed)
    return code.astype(int), absorbed


def mechanical_power(state):
    """Returns the turbine power deviation, in per-unit, of the given state.

    The turbine transfer (1 - Tw*s) / (1 + 0.5*Tw*s) is realized as
    -2 + 3 / (1 + 0.5*Tw*s), so its single state lags the governor output.
    """
    return 3.0 * state.turbine - 2.0 * state.gov


def step_plant(state, u_gate, dp_load, params):
    """Advances the plant by one step of params.dt.

    Each first-order block is discretized exactly under a zero-order hold
    of its input over the step.

    Arguments
    ---------
    state : PlantState
        The current plant state.
    u_gate : float or numpy.ndarray
        Gate command, per-unit.
    dp_load : float or numpy.ndarray
        Net electrical load deviation, per-unit (consumer load plus the
        change in absorbed SLC power).
    params : PlantParams
        The plant constants.

    Returns
    -------
    PlantState
        The state one step later. slc_code and pll_hz are carried over.
    """
    _check_finite(u_gate, dp_load, state.df, state.gov, state.turbine)
    dt = params.dt
    gov_decay = math.exp(-dt / params.t_gov)
    water_decay = math.exp(-dt / (0.5 * params.t_water))
    dp_mech = mechanical_power(state)
    imbalance = dp_mech - dp_load
    if params.damping > 0:
        swing_decay = math.exp(-params.damping * dt / (2 * params.inertia))
        df = swing_decay * state.df + (
            1 - swing_decay) * imbalance / params.damping
    else:
        df = state.df + dt * imbalance / (2 * params.inertia)
    gov = gov_decay * state.gov + (1 - gov_decay) * u_gate
    turbine = water_decay * state.turbine + (1 - water_decay) * state.gov
    return replace(state, df=df, gov=gov, turbine=turbine, t=state.t + dt)


def measure_frequency(state, params, pll_tau=0.0):
    """Returns the phase-locked loop reading of the frequency deviation.

    The PLL is a first-order lag of time constant pll_tau over the true
    deviation f_base * df; its previous output is state.pll_hz. With
    pll_tau = 0 the reading is exact.

    Arguments
    ---------
    state : PlantState
        The current plant state.
    params : PlantParams
        The plant constants.
    pll_tau : float, default 0
        PLL time constant, in s.

    Returns
    -------
    float or numpy.ndarray
        The measured frequency deviation, in Hz.
    """
    if not (math.isfinite(pll_tau) and pll_tau >= 0):
        raise DomainError("PLL time constant must be non-negative.")
    _check_finite(state.df, state.pll_hz)
    target = params.f_base * state.df
    if pll_tau == 0:
        return target
    gain = 1 - math.exp(-params.dt / pll_tau)
    return state.pll_hz + gain * (target - state.pll_hz)
