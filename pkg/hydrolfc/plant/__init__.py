from ._plant import (  # noqa: F401
    GRAVITY,
    NOMINAL_FREQUENCY_HZ,
    TurbineRating,
    PlantParams,
    PlantState,
    SlcLadder,
    turbine_power,
    slc_quantize,
    mechanical_power,
    step_plant,
    measure_frequency,
)
try:
    del _plant  # noqa: F821
except NameError:
    pass
