"""Utility functions for the hydrolfc package."""

import os  # for path handling
import io
import csv
import json
import copy  # for deepcopy-ing dicts
import numbers  # to check for number types
import tempfile

import numpy as np
from strct.dicts import flatten_dict


# ======= value conversion ======

def parse_value_for_json(value):
    """Parse the given value, which might also be a structure like a dict or a
    list, into a format that can be dumped to JSON.

    This method handles numpy arrays and scalars, dataclass-like objects
    exposing to_dict and generic iterables. Non-finite floats are written as
    strings, so the result is strict JSON.
    """
    if hasattr(value, 'to_dict'):
        return parse_value_for_json(value.to_dict())
    if isinstance(value, np.ndarray):
        return parse_value_for_json(value.tolist())
    if isinstance(value, dict):
        return {
            str(parse_value_for_json(k)): parse_value_for_json(v)
            for k, v in value.items()}
    if value is None or isinstance(value, (str, bool, np.bool_)):
        return bool(value) if isinstance(value, np.bool_) else value
    if hasattr(value, '__iter__'):
        return [parse_value_for_json(element) for element in value]
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        value = float(value)
        if not np.isfinite(value):
            return str(value)
        return value
    return str(value)


def dumps_json(obj):
    """Returns a byte-stable JSON rendition of the given object."""
    return json.dumps(
        parse_value_for_json(obj), sort_keys=True, indent=2) + '\n'


def deep_merge(base, override):
    """Returns a deep copy of base with override merged into it, recursively.
    """
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def unknown_key_paths(tree, reference, open_paths=()):
    """Returns the dot-separated key paths of tree absent from reference.

    Arguments
    ---------
    tree : dict
        A nested dict, e.g. a user configuration.
    reference : dict
        A nested dict holding every allowed key path.
    open_paths : sequence of str, optional
        Key paths under which any sub-key is allowed.

    Returns
    -------
    list of str
        The sorted unknown key paths.
    """
    known = flatten_dict(
        dict_obj=reference, separator='.', flatten_lists=False)
    given = flatten_dict(dict_obj=tree, separator='.', flatten_lists=False)
    prefixes = set()
    for path in known:
        parts = path.split('.')
        prefixes.update('.'.join(parts[:i]) for i in range(1, len(parts)))

    def _allowed(path):
        if path in known or path in prefixes:
            return True
        return any(path.startswith(p + '.') for p in open_paths)

    return sorted(path for path in given if not _allowed(path))


# ======= file output ======

def atomic_write_text(file_path, text):
    """Writes text to the given path through a temporary file and a rename,
    so readers never see a partially written file.
    """
    dir_path = os.path.dirname(os.path.abspath(file_path))
    os.makedirs(dir_path, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(
        dir=dir_path, prefix='.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', newline='') as file_obj:
            file_obj.write(text)
        os.replace(temp_path, file_path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise


def dump_records_to_csv(records, file_path, fieldnames=None,
                        missing_val=None):
    """Writes dict records into a csv file.

    Records are dumped in the given order.

    Arguments
    ---------
    records : sequence of dict
        The records to write. Objects exposing to_dict are converted first.
    file_path : str
        The full path of the file into which records are dumped.
    fieldnames : sequence, optional
        The list of field names used as headers of the resulting csv file. If
        not given, the field names of the first record, in order, are used.
    missing_val : str, optional
        The value used to fill missing fields in records. Defaults to "NA".
    """
    if missing_val is None:
        missing_val = "NA"
    rows = [
        rec.to_dict() if hasattr(rec, 'to_dict') else rec for rec in records]
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames, restval=missing_val,
                            extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(parse_value_for_json(row))
    atomic_write_text(file_path, buf.getvalue())
