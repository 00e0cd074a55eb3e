"""Package-level runtime settings, read with birch."""

from birch import Birch

CFG = Birch('hydrolfc')

DEFAULT_WORKERS = 1
DEFAULT_OUT_DIR = 'hydrolfc_out'
DEFAULT_LOG_LEVEL = 'WARNING'


def cfg_workers():
    """Returns the configured number of fitness worker threads."""
    val = CFG.get('WORKERS', None)
    if val is None:
        return DEFAULT_WORKERS
    return max(1, int(val))


def cfg_out_dir():
    """Returns the configured default artifact directory."""
    val = CFG.get('OUT_DIR', None)
    if val is None:
        return DEFAULT_OUT_DIR
    return str(val)


def cfg_log_level():
    """Returns the configured logging level name."""
    val = CFG.get('LOG_LEVEL', None)
    if val is None:
        return DEFAULT_LOG_LEVEL
    return str(val).upper()
