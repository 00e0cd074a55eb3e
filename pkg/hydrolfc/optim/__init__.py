from ._config import (  # noqa: F401
    GaConfig,
    SurrogateConfig,
    check_screen_ratio,
)
from ._chromosome import (  # noqa: F401
    N_GENES,
    Chromosome,
    FitnessRecord,
)
from ._surrogate import (  # noqa: F401
    activate,
    SurrogateNet,
    surrogate_train,
    surrogate_predict,
    predict_batch,
)
from ._fitness import (  # noqa: F401
    ScenarioObjective,
    FunctionObjective,
    as_objective,
    evaluate_fitness,
    fitness,
    efficiency,
)
from ._ga import (  # noqa: F401
    GenerationLog,
    GaResult,
    ga_run,
    ga_dsnn_run,
)
try:
    del _config  # noqa: F821
    del _chromosome  # noqa: F821
    del _surrogate  # noqa: F821
    del _fitness  # noqa: F821
    del _ga  # noqa: F821
except NameError:
    pass
