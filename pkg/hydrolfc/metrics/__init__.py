from ._metrics import (  # noqa: F401
    METRIC_NAMES,
    INTEGRAL_METRICS,
    TRACE_COLUMNS,
    SimTrace,
    MetricReport,
    ComparisonTable,
    compute_report,
    compare_reports,
    aggregate_reports,
)
try:
    del _metrics  # noqa: F821
except NameError:
    pass
