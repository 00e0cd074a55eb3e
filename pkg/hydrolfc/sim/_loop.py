"""The fixed-step closed loop joining plant, measurement, controller and SLC.

A loop run is vectorized over a batch axis: n independent loops sharing
one scenario are simulated in lockstep, each with its own controller (for
instance one fuzzy system per GA individual).
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from hydrolfc.errors import DomainError, DivergenceError
from hydrolfc.metrics import SimTrace
from hydrolfc.plant import (
    PlantState,
    turbine_power,
    slc_quantize,
    mechanical_power,
    step_plant,
    measure_frequency,
)


logger = logging.getLogger(__name__)


# ======= module-specific constants ======

ACTUATORS = ('slc', 'gate')
GATE_LIMIT = 1.0


# ======= types ======

@dataclass(frozen=True, eq=False)
class LoopResult:
    """Outcome of a batch of closed-loop runs.

    cost holds the per-loop sum of squared frequency error times dt, in
    Hz^2*s, and diverged flags loops whose error left the blow-up bound.
    Channel arrays have shape (n_samples, n) and are None when the run was
    not recorded.
    """
    cost: np.ndarray
    diverged: np.ndarray
    n_samples: int
    t: np.ndarray = None
    f_err: np.ndarray = None
    p_gen: np.ndarray = None
    p_load: np.ndarray = None
    p_slc: np.ndarray = None

    def trace(self, index=0, t_disturbance=None):
        """Returns the recorded channels of one loop as a SimTrace."""
        if self.t is None:
            raise DomainError("The run was not recorded.")
        return SimTrace(
            t=self.t, f_err=self.f_err[:, index],
            p_gen=self.p_gen[:, index], p_load=self.p_load[:, index],
            p_slc=self.p_slc[:, index], t_disturbance=t_disturbance,
            diverged=bool(self.diverged[index]))


# ======= operations ======

def quadratic_cost(f_err, dt):
    """Returns the quadratic criterion sum(e^2)*dt of a frequency error.

    Arguments
    ---------
    f_err : array-like
        Frequency error samples, in Hz.
    dt : float
        The sampling step, in s.

    Returns
    -------
    float
        The cost, in Hz^2*s.
    """
    f_err = np.asarray(f_err, dtype=float)
    return float(np.sum(f_err ** 2) * dt)


def _actuator_range(scenario, slc0_kw):
    if scenario.actuator == 'gate':
        return -GATE_LIMIT, GATE_LIMIT
    p_base = scenario.plant.p_base
    return (slc0_kw - scenario.ladder.max_kw) / p_base, slc0_kw / p_base


def run_closed_loop(scenario, controller, n=None, record=True,
                    stop_on_divergence=False):
    """Simulates the closed loop of a scenario under the given controller.

    Every step the true frequency deviation is recorded, read through the
    PLL, turned into the error e = -reading and fed to the controller. The
    control is summed into the actuator command (positional controllers
    set it directly), which either drives the SLC dump loads or the gate.

    Arguments
    ---------
    scenario : hydrolfc.harness.Scenario
        The plant, load events, actuator and horizon to simulate.
    controller : object
        Any controller exposing initial_state(n), step(e, state, dt) and
        a positional flag.
    n : int, optional
        Batch size. When None a single loop is run on scalar state, and
        channels are still returned with a batch axis of 1.
    record : bool, default True
        Whether to keep the time series of every channel.
    stop_on_divergence : bool, default False
        Stop at the first sample where any loop leaves the blow-up bound.
        Otherwise a diverged loop is flagged and reset to rest.

    Returns
    -------
    LoopResult
        The per-loop cost, divergence flags and the recorded channels.
    """
    if scenario.actuator not in ACTUATORS:
        raise DomainError("Unknown actuator {}".format(scenario.actuator))
    params = scenario.plant
    dt = params.dt
    p_base = params.p_base
    steps = scenario.n_steps
    batch = 1 if n is None else n
    load_kw = scenario.load_profile_kw()
    p_rated = turbine_power(scenario.turbine)
    slc0_code = scenario.slc_initial_code
    slc0_kw = slc0_code * scenario.ladder.step_kw
    load0_kw = p_rated - slc0_kw
    acc_low, acc_high = _actuator_range(scenario, slc0_kw)
    use_slc = scenario.actuator == 'slc'

    state = PlantState.at_rest(n, slc_code=slc0_code)
    cstate = controller.initial_state(n)
    command = 0.0 if n is None else np.zeros(n)
    absorbed = slc0_kw if n is None else np.full(n, slc0_kw)
    cost = np.zeros(batch)
    diverged = np.zeros(batch, dtype=bool)
    if record:
        channels = {
            name: np.zeros((steps, batch))
            for name in ('f_err', 'p_gen', 'p_load', 'p_slc')}

    n_samples = steps
    for k in range(steps):
        f_err = params.f_base * state.df
        if record:
            channels['f_err'][k] = f_err
            channels['p_gen'][k] = p_rated + mechanical_power(state) * p_base
            channels['p_load'][k] = load0_kw + load_kw[k]
            channels['p_slc'][k] = absorbed
        cost += np.square(f_err) * dt
        out = np.abs(f_err) > scenario.blowup_hz
        if np.any(out):
            fresh = np.atleast_1d(out) & ~diverged
            diverged |= np.atleast_1d(out)
            for idx in np.nonzero(fresh)[0]:
                logger.debug(
                    "Loop %d diverged at t=%.3f s.", idx, k * dt)
            if stop_on_divergence:
                n_samples = k + 1
                break
            state = replace(
                state, df=np.where(out, 0.0, state.df),
                gov=np.where(out, 0.0, state.gov),
                turbine=np.where(out, 0.0, state.turbine),
                pll_hz=np.where(out, 0.0, state.pll_hz))
            cstate = cstate.reset_where(out)
            command = np.where(out, 0.0, command)

        reading = measure_frequency(state, params, scenario.pll_tau)
        state = replace(state, pll_hz=reading)
        u, cstate = controller.step(-reading, cstate, dt)
        if controller.positional:
            command = u
        else:
            command = command + u * dt
        command = np.clip(command, acc_low, acc_high)

        if use_slc:
            code, absorbed = slc_quantize(
                slc0_kw - command * p_base, scenario.ladder)
            dp_load = (load_kw[k] + absorbed - slc0_kw) / p_base
            state = replace(state, slc_code=code)
            state = step_plant(state, 0.0, dp_load, params)
        else:
            state = step_plant(state, command, load_kw[k] / p_base, params)

    if diverged.any():
        logger.debug(
            "%d of %d loops diverged.", int(diverged.sum()), batch)
    if not record:
        return LoopResult(cost=cost, diverged=diverged, n_samples=n_samples)
    return LoopResult(
        cost=cost, diverged=diverged, n_samples=n_samples,
        t=np.arange(n_samples) * dt,
        **{name: arr[:n_samples] for name, arr in channels.items()})


def simulate(scenario, controller):
    """Runs and records a single closed loop.

    On divergence the returned trace stops at the divergent sample and its
    diverged flag is set. A loop that diverges before a second sample
    leaves no trace and raises DivergenceError.

    Arguments
    ---------
    scenario : hydrolfc.harness.Scenario
        The scenario to simulate.
    controller : object
        The controller driving the loop.

    Returns
    -------
    hydrolfc.metrics.SimTrace
        The recorded trace.
    """
    result = run_closed_loop(
        scenario, controller, record=True, stop_on_divergence=True)
    if result.diverged[0]:
        logger.warning(
            "The %s loop diverged at t=%.3f s.", controller.kind,
            (result.n_samples - 1) * scenario.plant.dt)
    if result.n_samples < 2:
        raise DivergenceError("The loop diverged before a second sample.")
    return result.trace(0, t_disturbance=scenario.t_disturbance)
