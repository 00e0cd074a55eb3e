"""Writers and readers of run artifact files."""

import os
import logging

import numpy as np
import pandas as pd

from hydrolfc.metrics import SimTrace
from hydrolfc.util import atomic_write_text, dumps_json, dump_records_to_csv
from ._plots import plot_frequency, plot_families, plot_surface


logger = logging.getLogger(__name__)


# ======= module-specific constants ======

FLOAT_FORMAT = '%.10g'
TRACE_FNAME = 'trace.csv'
REPORT_FNAME = 'report.json'
MANIFEST_FNAME = 'manifest.json'
GA_LOG_FNAME = 'ga_log.csv'
FREQUENCY_FNAME = 'frequency.svg'
FAMILIES_FNAME = 'families.svg'
SURFACE_FNAME = 'surface.svg'
COMPARISON_FNAME = 'comparison.csv'
COMPARISON_TXT_FNAME = 'comparison.txt'
GA_LOG_FIELDS = ('generation', 'best_j', 'mean_j', 'true_evals')


def write_trace(trace, file_path):
    """Writes a trace to CSV with the t, f_err_hz and power columns."""
    text = trace.to_frame().to_csv(
        index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    atomic_write_text(file_path, text)


def _first_load_change(frame):
    if 'p_load_kw' not in frame or len(frame) == 0:
        return None
    load = frame['p_load_kw'].to_numpy()
    changed = np.nonzero(load != load[0])[0]
    if len(changed) == 0:
        return None
    return float(frame['t'].to_numpy()[changed[0]])


def read_trace(file_path, t_disturbance=None):
    """Reads a trace CSV written by write_trace.

    Unless given, the disturbance instant is taken to be the first sample
    at which the consumer load differs from its initial value, which is
    where the run that wrote the file measured its report from.
    """
    frame = pd.read_csv(file_path)
    if t_disturbance is None and 't' in frame:
        t_disturbance = _first_load_change(frame)
    return SimTrace.from_frame(frame, t_disturbance=t_disturbance)


def write_json(obj, file_path):
    atomic_write_text(file_path, dumps_json(obj))


def write_ga_log(log, file_path):
    dump_records_to_csv(log, file_path, fieldnames=GA_LOG_FIELDS)


def write_run_artifacts(artifacts, out_dir, plots=True):
    """Writes every file of a run into a directory.

    Arguments
    ---------
    artifacts : RunArtifacts
        The run to persist.
    out_dir : str
        The target directory; created if missing.
    plots : bool, default True
        Whether to also draw the SVG figures.

    Returns
    -------
    dict
        Maps each artifact kind to the path it was written to.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        'trace': os.path.join(out_dir, TRACE_FNAME),
        'report': os.path.join(out_dir, REPORT_FNAME),
        'manifest': os.path.join(out_dir, MANIFEST_FNAME),
    }
    write_trace(artifacts.trace, paths['trace'])
    write_json(artifacts.report_dict(), paths['report'])
    write_json(artifacts.manifest, paths['manifest'])
    if artifacts.optimizer_log is not None:
        paths['ga_log'] = os.path.join(out_dir, GA_LOG_FNAME)
        write_ga_log(artifacts.optimizer_log, paths['ga_log'])
    if plots:
        paths['frequency'] = os.path.join(out_dir, FREQUENCY_FNAME)
        plot_frequency(
            {artifacts.controller: artifacts.trace}, paths['frequency'])
        if artifacts.system is not None:
            paths['families'] = os.path.join(out_dir, FAMILIES_FNAME)
            paths['surface'] = os.path.join(out_dir, SURFACE_FNAME)
            plot_families(artifacts.system, paths['families'])
            plot_surface(artifacts.system, paths['surface'])
    logger.info("Run artifacts written to %s.", out_dir)
    return paths


def write_comparison_artifacts(comparison, out_dir, plots=True):
    """Writes a comparison table, its overlay plot and every run's files.

    Each run goes to a sub-directory named after its column.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        'comparison': os.path.join(out_dir, COMPARISON_FNAME),
        'comparison_txt': os.path.join(out_dir, COMPARISON_TXT_FNAME),
        'manifest': os.path.join(out_dir, MANIFEST_FNAME),
    }
    frame = comparison.table.to_frame()
    atomic_write_text(paths['comparison'], frame.to_csv(
        float_format=FLOAT_FORMAT, lineterminator='\n'))
    atomic_write_text(
        paths['comparison_txt'], comparison.table.pretty().get_string() + '\n')
    write_json(comparison.manifest, paths['manifest'])
    for name, run in comparison.runs.items():
        write_run_artifacts(
            run, os.path.join(out_dir, name.replace('#', '_')), plots=plots)
    if plots:
        paths['frequency'] = os.path.join(out_dir, FREQUENCY_FNAME)
        plot_frequency(
            {name: run.trace for name, run in comparison.runs.items()},
            paths['frequency'], title='Frequency response')
    return paths
