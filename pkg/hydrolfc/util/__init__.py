from ._util import (  # noqa: F401
    parse_value_for_json,
    dumps_json,
    deep_merge,
    unknown_key_paths,
    atomic_write_text,
    dump_records_to_csv,
)
try:
    del _util  # noqa: F821
except NameError:
    pass
