"""Load-frequency control of an islanded small hydropower plant."""
# flake8: noqa  # prevents 'imported but unused' erros
# pylint: disable=C0413,C0411

from ._version import get_versions
__version__ = get_versions()['version']
del get_versions

# === module imports
import hydrolfc.errors
import hydrolfc.plant
import hydrolfc.fuzzy
import hydrolfc.control
import hydrolfc.metrics
import hydrolfc.sim
import hydrolfc.optim
import hydrolfc.harness
import hydrolfc.util


for name in [
        'name', 'hydrolfc'
]:
    try:
        globals().pop(name)
    except KeyError:
        pass
try:
    del name  # pylint: disable=W0631
except NameError:
    pass
