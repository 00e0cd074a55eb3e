"""Version information for the hydrolfc package."""

__version__ = '0.3.0'


def get_versions():
    """Returns a dict with version information, for manifest echoes."""
    return {'version': __version__, 'full-revisionid': None, 'dirty': False,
            'error': None}
