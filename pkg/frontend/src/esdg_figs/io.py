"""CSV loading for solver outputs.

The solver writes three kinds of files: ``diagnostics.csv`` (one row per
step), ``snapshot*.csv`` (one row per grid node) and ``convergence.csv``
(one row per refinement level).  All are plain comma-separated tables
with a header row; this module is the only place they are parsed.
"""

from __future__ import annotations

import csv
import os

import numpy as np

__all__ = ["Table", "load_table", "find_input"]


class Table:
    """A named-column table of floats."""

    def __init__(self, columns, data):
        self.columns = list(columns)
        self.data = np.asarray(data, dtype=float)

    def __getitem__(self, name):
        try:
            j = self.columns.index(name)
        except ValueError:
            raise KeyError(
                f"column {name!r} not found; available: {', '.join(self.columns)}"
            ) from None
        return self.data[:, j]

    def __contains__(self, name):
        return name in self.columns

    @property
    def n_rows(self):
        return self.data.shape[0]


def load_table(path) -> Table:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for row in reader:
            # convergence tables leave rate cells empty on the first level
            rows.append([float(v) if v.strip() else np.nan for v in row])
    data = np.asarray(rows, dtype=float) if rows else np.empty((0, len(header)))
    return Table(header, data)


def find_input(directory, kind) -> str:
    """Locate the conventional input file for a figure kind."""
    names = {
        "profile": ["snapshot_final.csv"],
        "field": ["snapshot_final.csv"],
        "timeseries": ["diagnostics.csv"],
        "convergence": ["convergence.csv"],
    }[kind]
    for name in names:
        path = os.path.join(directory, name)
        if os.path.exists(path):
            return path
    raise FileNotFoundError(
        f"no {' or '.join(names)} in {directory!r} for figure kind {kind!r}"
    )
