from ._loop import (  # noqa: F401
    ACTUATORS,
    LoopResult,
    quadratic_cost,
    run_closed_loop,
    simulate,
)
try:
    del _loop  # noqa: F821
except NameError:
    pass
