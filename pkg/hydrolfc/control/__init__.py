from ._control import (  # noqa: F401
    GainSet,
    ControllerState,
    pd_step,
    pid_increments,
    pid_incremental_step,
    adapt_gains,
    sensitivity_sign,
    fuzzy_surface,
    fuzzy_pd_step,
    PdController,
    AdaptivePidController,
    FuzzyPdController,
)
try:
    del _control  # noqa: F821
except NameError:
    pass
