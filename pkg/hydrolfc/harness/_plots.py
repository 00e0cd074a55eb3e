"""SVG figures of runs and fuzzy systems."""

import io

import numpy as np
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from hydrolfc.fuzzy import TERMS, infer  # noqa: E402
from hydrolfc.util import atomic_write_text  # noqa: E402


# ======= module-specific constants ======

SVG_RC = {'svg.hashsalt': 'hydrolfc', 'svg.fonttype': 'path'}
SURFACE_POINTS = 41


def _save_svg(fig, file_path):
    buf = io.StringIO()
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(buf, format='svg', metadata={'Date': None})
    plt.close(fig)
    atomic_write_text(file_path, buf.getvalue())


def plot_frequency(traces, file_path, title=None):
    """Draws the frequency error of several named traces on one axis.

    Arguments
    ---------
    traces : mapping of str to hydrolfc.metrics.SimTrace
        The runs to overlay, in legend order.
    file_path : str
        The SVG file to write.
    title : str, optional
        The figure title.
    """
    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(8, 4.5))
        for name, trace in traces.items():
            ax.plot(trace.t, trace.f_err, label=name, linewidth=1.2)
        ax.axhline(0.0, color='grey', linewidth=0.6)
        ax.set_xlabel('t [s]')
        ax.set_ylabel('frequency error [Hz]')
        if title:
            ax.set_title(title)
        ax.legend(loc='best')
        ax.grid(True, linewidth=0.3)
        _save_svg(fig, file_path)


def plot_families(system, file_path):
    """Draws the e, ec and u membership families of a fuzzy system."""
    with matplotlib.rc_context(SVG_RC):
        fig, axes = plt.subplots(3, 1, figsize=(7, 8))
        for ax, name in zip(axes, ('e', 'ec', 'u')):
            centers = getattr(system, name).centers
            grid = np.linspace(centers[0], centers[-1], 401)
            degrees = getattr(system, name).degrees(grid)
            for idx, term in enumerate(TERMS):
                ax.plot(grid, degrees[:, idx], label=term, linewidth=1.0)
            ax.set_ylabel(name)
            ax.set_ylim(-0.05, 1.05)
        axes[0].legend(loc='upper center', ncol=len(TERMS), fontsize='small')
        fig.tight_layout()
        _save_svg(fig, file_path)


def plot_surface(system, file_path, points=SURFACE_POINTS):
    """Draws the fuzzy control surface over the e and ec universes."""
    e_grid = np.linspace(system.e.low, system.e.high, points)
    ec_grid = np.linspace(system.ec.low, system.ec.high, points)
    e_mesh, ec_mesh = np.meshgrid(e_grid, ec_grid)
    out = infer(e_mesh, ec_mesh, system)
    with matplotlib.rc_context(SVG_RC):
        fig = plt.figure(figsize=(7, 5.5))
        ax = fig.add_subplot(projection='3d')
        ax.plot_surface(e_mesh, ec_mesh, out, cmap='viridis', linewidth=0)
        ax.set_xlabel('e')
        ax.set_ylabel('ec')
        ax.set_zlabel('u')
        _save_svg(fig, file_path)
