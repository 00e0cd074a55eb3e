"""The controllers under comparison: PD, adaptive incremental PID, fuzzy PD.

Controllers are value-semantic state machines: every step function takes
an explicit ControllerState and returns the control together with the next
state. All arithmetic is elementwise, so a state holding numpy arrays runs
a batch of independent loops at once.
"""

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from hydrolfc.errors import DomainError
from hydrolfc.fuzzy import infer


# ======= module-specific constants ======

SENSITIVITY_DEADBAND = 1e-9
ADAPTABLE_GAINS = ('kp', 'ki', 'kd', 'ge', 'gce', 'gu')


# ======= types ======

@dataclass(frozen=True)
class GainSet:
    """The tunable surface of all three controllers.

    Parameters
    ----------
    kp, ki, kd : float
        Proportional, integral and derivative gains.
    mu : float, default 0
        Gradient adaptation rate; 0 disables adaptation.
    ge, gce, gu : float
        Fuzzy input, input-rate and output scaling gains.
    boxes : dict, optional
        Maps a gain name to the (low, high) box adapted values are clamped
        to. Gains without a box are unbounded.
    output_limit : float, default inf
        Symmetric bound on positional outputs and on the integral state.
    """
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    mu: float = 0.0
    ge: float = 1.0
    gce: float = 1.0
    gu: float = 1.0
    boxes: dict = field(default_factory=dict)
    output_limit: float = math.inf

    def __post_init__(self):
        for name in ADAPTABLE_GAINS + ('mu',):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DomainError("Gain {} must be finite.".format(name))
        if self.mu < 0:
            raise DomainError("Adaptation rate mu must be non-negative.")
        if not self.output_limit > 0:
            raise DomainError("Output limit must be positive.")
        for name, (low, high) in self.boxes.items():
            if name not in ADAPTABLE_GAINS:
                raise DomainError("No gain named {}".format(name))
            if not low <= high:
                raise DomainError("Empty box for gain {}".format(name))

    def box(self, name):
        """Returns the (low, high) box of the named gain."""
        return self.boxes.get(name, (-math.inf, math.inf))


@dataclass(frozen=True)
class ControllerState:
    """Memory carried between controller steps.

    prev_error and prev2_error are e(k-1) and e(k-2); prev_output and
    prev2_output are u(k-1) and u(k-2); prev_measured is the plant output
    y(k-1) = -e(k-1) of a zero reference. sensitivity is the held sign
    estimate of dy/du and gains the adapted GainSet, if any.
    """
    prev_error: float = 0.0
    prev2_error: float = 0.0
    integral: float = 0.0
    prev_output: float = 0.0
    prev2_output: float = 0.0
    prev_measured: float = 0.0
    sensitivity: float = 1.0
    gains: GainSet = None

    @classmethod
    def zeros(cls, n=None, gains=None):
        """Returns a state at rest, optionally for a batch of n loops."""
        if n is None:
            return cls(gains=gains)
        return cls(
            prev_error=np.zeros(n), prev2_error=np.zeros(n),
            integral=np.zeros(n), prev_output=np.zeros(n),
            prev2_output=np.zeros(n), prev_measured=np.zeros(n),
            sensitivity=np.ones(n), gains=gains)

    def reset_where(self, mask):
        """Returns a state whose masked loops are back at rest."""
        updates = {}
        for fld in fields(self):
            if fld.name == 'gains':
                continue
            rest = 1.0 if fld.name == 'sensitivity' else 0.0
            updates[fld.name] = np.where(mask, rest, getattr(self, fld.name))
        return replace(self, **updates)


# ======= step laws ======

def pd_step(e, de, gains):
    """Returns the PD law u = kp*e + kd*de."""
    return gains.kp * e + gains.kd * de


def pid_increments(e, state, dt):
    """Returns the increments (e_p, e_i, e_d) of the incremental PID law.

    e_p = e(k) - e(k-1), e_i = e(k)*dt and
    e_d = (e(k) - 2*e(k-1) + e(k-2)) / dt.
    """
    if not dt > 0:
        raise DomainError("Step dt must be positive.")
    e_p = e - state.prev_error
    e_i = e * dt
    e_d = (e - 2 * state.prev_error + state.prev2_error) / dt
    return e_p, e_i, e_d


def pid_incremental_step(e, state, gains, dt):
    """Advances the incremental PID law by one step.

    u(k) = u(k-1) + kp*e_p + ki*e_i + kd*e_d, bounded by the output limit.
    The integral state is bounded by the same limit and only the part of
    e_i it actually absorbed reaches the output, so a saturated integral
    stops winding up.

    Arguments
    ---------
    e : float or numpy.ndarray
        The current error.
    state : ControllerState
        The controller memory.
    gains : GainSet
        The gains to apply this step.
    dt : float
        The sampling step, in s.

    Returns
    -------
    u : float or numpy.ndarray
        The positional control.
    state : ControllerState
        The next controller state.
    """
    e_p, e_i, e_d = pid_increments(e, state, dt)
    limit = gains.output_limit
    integral = np.clip(state.integral + e_i, -limit, limit)
    u = (state.prev_output + gains.kp * e_p
         + gains.ki * (integral - state.integral) + gains.kd * e_d)
    u = np.clip(u, -limit, limit)
    if np.ndim(u) == 0:
        u, integral = float(u), float(integral)
    return u, replace(
        state, prev2_error=state.prev_error, prev_error=e,
        integral=integral, prev2_output=state.prev_output, prev_output=u,
        prev_measured=-e)


def adapt_gains(e, dy_du, gains, increments, names=('kp', 'ki', 'kd')):
    """Applies one gradient step to the named gains.

    For every gain k paired with its increment x, k += mu * e * dy_du * x,
    then k is clamped to its box.

    Arguments
    ---------
    e : float
        The current error.
    dy_du : float
        The plant sensitivity estimate.
    gains : GainSet
        The gains to adapt.
    increments : sequence of float
        One increment per name, e.g. (e_p, e_i, e_d).
    names : sequence of str, default ('kp', 'ki', 'kd')
        The gains to adapt.

    Returns
    -------
    GainSet
        The adapted gains; the same object when mu is 0.
    """
    if gains.mu == 0:
        return gains
    if len(increments) != len(names):
        raise DomainError("One increment is needed per adapted gain.")
    updates = {}
    for name, inc in zip(names, increments):
        low, high = gains.box(name)
        val = getattr(gains, name) + gains.mu * e * dy_du * inc
        updates[name] = float(np.clip(val, low, high))
    return replace(gains, **updates)


def sensitivity_sign(state, e):
    """Estimates sign(dy/du) from the last step, holding it in the dead-band.

    The change in plant output y(k) - y(k-1) answers the change in control
    u(k-1) - u(k-2).
    """
    d_out = -e - state.prev_measured
    d_in = state.prev_output - state.prev2_output
    est = np.sign(d_out) * np.sign(d_in)
    held = (np.abs(d_in) <= SENSITIVITY_DEADBAND) | (est == 0)
    return np.where(held, state.sensitivity, est)


def fuzzy_surface(e, ec, system, gains):
    """Returns the raw fuzzy output for scaled, universe-clamped inputs."""
    return infer(
        system.e.clamp(gains.ge * e), system.ec.clamp(gains.gce * ec), system)


def fuzzy_pd_step(e, state, system, gains, dt):
    """Advances the fuzzy PD law by one step.

    ec = (e - e(k-1)) / dt and u = gu * infer(ge*e, gce*ec), with both
    scaled inputs clamped to their universes.

    Arguments
    ---------
    e : float or numpy.ndarray
        The current error.
    state : ControllerState
        The controller memory.
    system : hydrolfc.fuzzy.FuzzySystem
        The membership families and rules.
    gains : GainSet
        The fuzzy scaling gains ge, gce and gu.
    dt : float
        The sampling step, in s.

    Returns
    -------
    u : float or numpy.ndarray
        The control.
    state : ControllerState
        The next controller state.
    """
    if not dt > 0:
        raise DomainError("Step dt must be positive.")
    ec = (e - state.prev_error) / dt
    u = gains.gu * fuzzy_surface(e, ec, system, gains)
    return u, replace(
        state, prev2_error=state.prev_error, prev_error=e,
        prev2_output=state.prev_output, prev_output=u, prev_measured=-e)


# ======= controllers ======

class PdController:
    """Plain PD control; its output is a rate summed by the actuator."""

    kind = 'pd'
    positional = False

    def __init__(self, gains):
        self.gains = gains

    def initial_state(self, n=None):
        return ControllerState.zeros(n)

    def step(self, e, state, dt):
        if not dt > 0:
            raise DomainError("Step dt must be positive.")
        de = (e - state.prev_error) / dt
        u = pd_step(e, de, self.gains)
        return u, replace(
            state, prev2_error=state.prev_error, prev_error=e,
            prev2_output=state.prev_output, prev_output=u, prev_measured=-e)


class AdaptivePidController:
    """Incremental PID whose kp, ki and kd follow the gradient law.

    Its output is positional: the increment law already sums the control.
    """

    kind = 'pid-adaptive'
    positional = True

    def __init__(self, gains):
        self.gains = gains

    def initial_state(self, n=None):
        return ControllerState.zeros(n, gains=self.gains)

    def step(self, e, state, dt):
        gains = state.gains if state.gains is not None else self.gains
        dy_du = sensitivity_sign(state, e)
        increments = pid_increments(e, state, dt)
        u, nxt = pid_incremental_step(e, state, gains, dt)
        if np.ndim(dy_du) == 0:
            adapted = adapt_gains(float(e), float(dy_du), gains, increments)
        else:
            # gains are shared, so a batch adapts on its mean gradient
            adapted = adapt_gains(
                1.0, 1.0, gains,
                [float(np.mean(e * dy_du * inc)) for inc in increments])
        return u, replace(nxt, sensitivity=dy_du, gains=adapted)


class FuzzyPdController:
    """Self-tuning fuzzy PD; its output is a rate summed by the actuator.

    With gains.mu > 0 the output gain gu follows the gradient law, whose
    gradient du/dgu is the raw fuzzy output.
    """

    kind = 'fuzzy-pd'
    positional = False

    def __init__(self, system, gains):
        self.system = system
        self.gains = gains

    def initial_state(self, n=None):
        return ControllerState.zeros(n, gains=self.gains)

    def step(self, e, state, dt):
        gains = state.gains if state.gains is not None else self.gains
        if gains.mu == 0:
            return fuzzy_pd_step(e, state, self.system, gains, dt)
        dy_du = sensitivity_sign(state, e)
        ec = (e - state.prev_error) / dt
        raw = fuzzy_surface(e, ec, self.system, gains)
        u, nxt = fuzzy_pd_step(e, state, self.system, gains, dt)
        if np.ndim(raw) == 0:
            adapted = adapt_gains(
                float(e), float(dy_du), gains, (raw,), names=('gu',))
        else:
            adapted = adapt_gains(
                1.0, 1.0, gains, (float(np.mean(e * dy_du * raw)),),
                names=('gu',))
        return u, replace(nxt, sensitivity=dy_du, gains=adapted)
