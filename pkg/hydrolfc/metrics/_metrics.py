"""Transient performance measures of a load-frequency control run."""

import math
import warnings
from dataclasses import dataclass, asdict

import numpy as np
import pandas as pd
from prettytable import PrettyTable

from hydrolfc.errors import DomainError


# ======= module-specific constants ======

METRIC_NAMES = (
    'overshoot', 'undershoot', 'settling_time', 'sse', 'iae', 'ise', 'itae')
INTEGRAL_METRICS = ('iae', 'ise', 'itae')
TRACE_COLUMNS = ('t', 'f_err_hz', 'p_gen_kw', 'p_load_kw', 'p_slc_kw')
UNIFORM_STEP_RTOL = 1e-6


# ======= types ======

@dataclass(frozen=True, eq=False)
class SimTrace:
    """Uniformly sampled time series of one closed-loop run.

    Parameters
    ----------
    t : numpy.ndarray
        Sample times, in s.
    f_err : numpy.ndarray
        Frequency error (measured minus nominal), in Hz.
    p_gen, p_load, p_slc : numpy.ndarray
        Generator, consumer-load and absorbed dump-load power, in kW.
    t_disturbance : float, optional
        Instant of the first disturbance. Defaults to the first sample.
    diverged : bool, default False
        True if the run stopped on leaving the frequency bound.
    """
    t: np.ndarray
    f_err: np.ndarray
    p_gen: np.ndarray = None
    p_load: np.ndarray = None
    p_slc: np.ndarray = None
    t_disturbance: float = None
    diverged: bool = False

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        n = len(t)
        if n < 2:
            raise DomainError("A trace needs at least two samples.")
        for name in ('f_err', 'p_gen', 'p_load', 'p_slc'):
            val = getattr(self, name)
            val = np.zeros(n) if val is None else np.asarray(val, float)
            if val.shape != t.shape:
                raise DomainError(
                    "Channel {} has {} samples, expected {}".format(
                        name, len(val), n))
            object.__setattr__(self, name, val)
        steps = np.diff(t)
        if not np.all(steps > 0) or not np.allclose(
                steps, steps[0], rtol=UNIFORM_STEP_RTOL, atol=0):
            raise DomainError("Trace times must be uniform and increasing.")
        object.__setattr__(self, 't', t)
        if self.t_disturbance is None:
            object.__setattr__(self, 't_disturbance', float(t[0]))

    @property
    def dt(self):
        return (self.t[-1] - self.t[0]) / (len(self.t) - 1)

    @property
    def duration(self):
        """The time covered by the samples under the rectangle rule."""
        return len(self.t) * self.dt

    def to_frame(self):
        """Returns the trace as a pandas DataFrame with the CSV columns."""
        return pd.DataFrame({
            't': self.t, 'f_err_hz': self.f_err, 'p_gen_kw': self.p_gen,
            'p_load_kw': self.p_load, 'p_slc_kw': self.p_slc,
        }, columns=list(TRACE_COLUMNS))

    @classmethod
    def from_frame(cls, frame, t_disturbance=None):
        """Builds a trace from a DataFrame with the CSV columns."""
        missing = [col for col in TRACE_COLUMNS[:2] if col not in frame]
        if missing:
            raise DomainError("Trace is missing columns {}".format(missing))

        def _col(name):
            return frame[name].to_numpy() if name in frame else None

        return cls(
            t=_col('t'), f_err=_col('f_err_hz'), p_gen=_col('p_gen_kw'),
            p_load=_col('p_load_kw'), p_slc=_col('p_slc_kw'),
            t_disturbance=t_disturbance)


@dataclass(frozen=True)
class MetricReport:
    """The seven transient measures of a trace.

    overshoot and undershoot are peak excursions in Hz, settling_time is in
    s after the disturbance, sse is in Hz, iae in Hz*s, ise in Hz^2*s and
    itae in Hz*s^2. settled is False when the error is still outside the
    band at the last sample.
    """
    overshoot: float
    undershoot: float
    settling_time: float
    sse: float
    iae: float
    ise: float
    itae: float
    settled: bool = True

    def to_dict(self):
        return asdict(self)


# ======= operations ======

def _integrate(values, dt, rule):
    if rule == 'rectangle':
        return float(np.sum(values) * dt)
    if rule == 'trapezoid':
        return float((np.sum(values) - (values[0] + values[-1]) / 2) * dt)
    raise DomainError("Unknown integration rule {}".format(rule))


def compute_report(trace, settle_band=0.05, tail_fraction=0.1,
                   rule='rectangle'):
    """Computes the transient measures of a trace.

    Arguments
    ---------
    trace : SimTrace
        The run to measure.
    settle_band : float, default 0.05
        Half-width of the settling band, in Hz.
    tail_fraction : float, default 0.1
        Fraction of the trace, taken from its end, over which the
        steady-state error is averaged. Must be in (0, 0.5].
    rule : str, default 'rectangle'
        Integration rule: 'rectangle' or 'trapezoid'.

    Returns
    -------
    MetricReport
        The seven measures. Settling time is measured from the disturbance
        instant to the first sample after the error last leaves the band.
    """
    if not settle_band > 0:
        raise DomainError("Settling band must be positive.")
    if not 0 < tail_fraction <= 0.5:
        raise DomainError("Tail fraction must be in (0, 0.5].")
    err = trace.f_err
    t = trace.t
    dt = trace.dt
    t0 = trace.t_disturbance
    abs_err = np.abs(err)
    since = np.maximum(t - t0, 0.0)

    outside = np.nonzero(abs_err > settle_band)[0]
    settled = True
    if len(outside) == 0:
        settling_time = 0.0
    elif outside[-1] == len(err) - 1:
        settled = False
        settling_time = float(t[-1] - t0)
        warnings.warn(
            "Error still outside the {} Hz band at the end of the trace."
            .format(settle_band))
    else:
        settling_time = max(float(t[outside[-1] + 1] - t0), 0.0)

    n_tail = max(1, int(math.ceil(tail_fraction * len(err))))
    return MetricReport(
        overshoot=max(float(np.max(err)), 0.0),
        undershoot=max(-float(np.min(err)), 0.0),
        settling_time=settling_time,
        sse=float(np.mean(abs_err[-n_tail:])),
        iae=_integrate(abs_err, dt, rule),
        ise=_integrate(err ** 2, dt, rule),
        itae=_integrate(since * abs_err, dt, rule),
        settled=settled,
    )


@dataclass(frozen=True, eq=False)
class ComparisonTable:
    """Per-metric values and ranks of several named reports.

    values and ranks are DataFrames indexed by metric name with one column
    per report; rank 1 is best (lowest) and ties share the lower rank.
    dominant names the report ranked strictly first on every integral
    measure, if any.
    """
    values: pd.DataFrame
    ranks: pd.DataFrame
    dominant: str = None
    failures: dict = None

    def to_frame(self):
        """Returns values and ranks side by side, ready for CSV output."""
        ranks = self.ranks.add_suffix('_rank')
        frame = pd.concat([self.values, ranks], axis=1)
        frame.index.name = 'metric'
        return frame

    def pretty(self):
        """Returns an aligned plain-text rendition of the table."""
        names = list(self.values.columns)
        table = PrettyTable(['Performance measure'] + names)
        for metric in self.values.index:
            row = [metric]
            for name in names:
                val = self.values.loc[metric, name]
                if pd.isna(val):
                    row.append('FAILED')
                else:
                    row.append('{:.4f} ({:d})'.format(
                        val, int(self.ranks.loc[metric, name])))
            table.add_row(row)
        if self.dominant is not None:
            table.add_row(['dominant'] + [
                '*' if name == self.dominant else '' for name in names])
        return table


def compare_reports(reports):
    """Ranks named reports metric by metric.

    Arguments
    ---------
    reports : mapping or sequence of (str, MetricReport or None) pairs
        The reports to compare, in column order. A None report marks a
        failed run; its column holds NaN and it is never ranked.

    Returns
    -------
    ComparisonTable
        The values, ranks and dominating report.
    """
    pairs = list(reports.items()) if hasattr(reports, 'items') else list(
        reports)
    if len(pairs) < 2:
        raise DomainError("At least two reports are needed for a comparison.")
    columns = {}
    failures = {}
    for name, report in pairs:
        if report is None:
            failures[name] = 'failed'
            columns[name] = [np.nan] * len(METRIC_NAMES)
        else:
            columns[name] = [getattr(report, m) for m in METRIC_NAMES]
    values = pd.DataFrame(columns, index=list(METRIC_NAMES))
    ranks = values.rank(axis=1, method='min')
    dominant = None
    for name in values.columns:
        if name in failures:
            continue
        firsts = ranks.loc[list(INTEGRAL_METRICS), name] == 1
        if not firsts.all():
            continue
        tied = (ranks.loc[list(INTEGRAL_METRICS)] == 1).sum(axis=1)
        if (tied == 1).all():
            dominant = name
    return ComparisonTable(
        values=values, ranks=ranks, dominant=dominant, failures=failures)


def aggregate_reports(reports):
    """Returns per-metric min, mean and max over a sequence of reports."""
    frame = pd.DataFrame(
        [[getattr(r, m) for m in METRIC_NAMES] for r in reports],
        columns=list(METRIC_NAMES))
    return frame.agg(['min', 'mean', 'max']).T
