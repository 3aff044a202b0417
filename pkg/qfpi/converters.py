"""
CSV serialization of sweep records.

Floats are written with ``repr`` (shortest round-tripping form), booleans as
``1``/``0`` and missing values as empty fields, so that a given sweep always
produces byte-identical files.
"""

import csv
import dataclasses
import io

from qfpi.errors import InvalidParameterError
from qfpi.sweep import SweepRecord

FIELDS = tuple(f.name for f in dataclasses.fields(SweepRecord))

_BOOL_FIELDS = {"converged_12", "converged_21"}
_INT_FIELDS = {"iterations"}

def format_number(x):
    """
    >>> format_number(0.1), format_number(True), format_number(None)
    ('0.1', '1', '')
    """
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def record_to_row(rec):
    return [format_number(getattr(rec, name)) for name in FIELDS]


def row_to_record(row):
    """
    Inverse of :py:func:`.record_to_row`; ``row`` is a mapping from field
    names to strings.
    """
    values = {}
    try:
        for name in FIELDS:
            text = row[name]
            if name in _BOOL_FIELDS:
                values[name] = text == "1"
            elif name in _INT_FIELDS:
                values[name] = int(text) if text else 0
            else:
                values[name] = float(text) if text else None
    except (KeyError, ValueError) as e:
        raise InvalidParameterError(f"malformed record: {e}") from e
    return SweepRecord(**values)


def write_records(records, fp, header=True):
    w = csv.writer(fp, lineterminator="\n")
    if header:
        w.writerow(FIELDS)
    for rec in records:
        w.writerow(record_to_row(rec))


def records_to_csv(records, header=True):
    fp = io.StringIO()
    write_records(records, fp, header=header)
    return fp.getvalue()


def read_records(fp):
    return [row_to_record(row) for row in csv.DictReader(fp)]
