"""File formats for the command-line surface.

Matrices are headerless comma-separated text, one row per line, with 17
significant digits so float64 values round-trip exactly.  Metrics serialize
to JSON with snake-case keys plus ``*_defined`` flags for empty denominators.
"""

import json

import numpy as np


class CsvFormatError(ValueError):
    """Malformed matrix file, with 1-based row/column diagnostics."""

    def __init__(self, path, row, column, detail):
        self.path = path
        self.row = row
        self.column = column
        super().__init__(f"{path}: row {row}, column {column}: {detail}")


def save_matrix(path, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    np.savetxt(path, M, delimiter=",", fmt="%.17g")


def load_matrix(path):
    """Parse a matrix file, raising :class:`CsvFormatError` with the offending
    row/column when the content is not a rectangular block of numbers."""
    rows = []
    width = None
    with open(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise CsvFormatError(
                    path, lineno, len(fields), f"expected {width} columns"
                )
            parsed = []
            for colno, field in enumerate(fields, start=1):
                try:
                    value = float(field)
                except ValueError:
                    raise CsvFormatError(
                        path, lineno, colno, f"not a number: {field!r}"
                    ) from None
                if not np.isfinite(value):
                    raise CsvFormatError(path, lineno, colno, f"non-finite: {field!r}")
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise CsvFormatError(path, 1, 1, "file contains no data")
    return np.asarray(rows, dtype=float)


def metrics_json(metrics):
    """Render a :class:`~notears.evaluation.GraphMetrics` as a JSON line."""
    return json.dumps(metrics.as_dict())
