from ._scenario import (  # noqa: F401
    CONTROLLER_KINDS,
    GA_KINDS,
    DEFAULTS,
    default_config,
    LoadEvent,
    Scenario,
    load_scenario,
    build_controller,
)
from ._runs import (  # noqa: F401
    make_manifest,
    RunArtifacts,
    ComparisonArtifacts,
    optimize,
    run_scenario,
    run_comparison,
)
from ._plots import (  # noqa: F401
    plot_frequency,
    plot_families,
    plot_surface,
)
from ._io import (  # noqa: F401
    write_trace,
    read_trace,
    write_json,
    write_ga_log,
    write_run_artifacts,
    write_comparison_artifacts,
)
try:
    del _scenario  # noqa: F821
    del _runs  # noqa: F821
    del _plots  # noqa: F821
    del _io  # noqa: F821
except NameError:
    pass
