"""Headerless numeric CSV reading and writing."""

import csv
import os

import numpy as np

from .exceptions import DataError

# 17 significant digits round-trip any float64 exactly
FLOAT_FORMAT = "%.17g"


def read_matrix(path, name=None):
    """Read a headerless, comma-separated numeric matrix.

    Every row must have the same number of columns. Parse failures name
    the offending line (1-based).
    """
    name = name or os.fspath(path)
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                values = [float(c) for c in row]
            except ValueError as exc:
                raise DataError(f"{name}: line {lineno}: {exc}") from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataError(
                    f"{name}: line {lineno}: expected {width} columns, "
                    f"got {len(values)}"
                )
            if not all(np.isfinite(values)):
                raise DataError(f"{name}: line {lineno}: non-finite value")
            rows.append(values)
    if not rows:
        raise DataError(f"{name}: no data rows")
    return np.array(rows, dtype=float)


def write_matrix(path, array):
    array = np.asarray(array, dtype=float)
    if array.ndim == 1:
        array = array[:, None]
    np.savetxt(path, array, delimiter=",", fmt=FLOAT_FORMAT)
