"""Trace sets: tabular joint assignments to secret and observable variables.

A trace set is the ingestion boundary of the analyzer: one record per
protocol execution, one categorical value per declared variable. Values are
opaque tokens (stored as strings); their meaning is never interpreted.

CSV format: UTF-8, header line first, secret columns prefixed ``s:`` and
observable columns prefixed ``o:`` (e.g. ``s:payer,o:a0,o:a1,o:a2``), one
record per line.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class TraceSet:
    """Immutable column-oriented table of protocol executions."""

    secret_vars: tuple
    observable_vars: tuple
    columns: Mapping[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "secret_vars", tuple(self.secret_vars))
        object.__setattr__(self, "observable_vars", tuple(self.observable_vars))
        if not self.secret_vars or not self.observable_vars:
            raise ValueError("secret and observable variable lists must be non-empty")
        if set(self.secret_vars) & set(self.observable_vars):
            raise ValueError("secret and observable variables must be disjoint")
        declared = self.secret_vars + self.observable_vars
        if len(set(declared)) != len(declared):
            raise ValueError("duplicate variable names")
        cols = {}
        length = None
        for name in declared:
            if name not in self.columns:
                raise ValueError(f"missing column for variable {name!r}")
            arr = np.asarray(self.columns[name])
            if arr.ndim != 1:
                raise ValueError(f"column {name!r} is not one-dimensional")
            if length is None:
                length = arr.shape[0]
            elif arr.shape[0] != length:
                raise ValueError("columns have differing lengths")
            arr = arr.astype(str) if arr.dtype.kind != "U" else arr
            arr.flags.writeable = False
            cols[name] = arr
        object.__setattr__(self, "columns", cols)

    @property
    def variables(self) -> tuple:
        return self.secret_vars + self.observable_vars

    @property
    def n_records(self) -> int:
        return int(self.columns[self.secret_vars[0]].shape[0])

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    @classmethod
    def from_records(
        cls,
        secret_vars: Sequence[str],
        observable_vars: Sequence[str],
        records: Iterable[Mapping[str, object]],
    ) -> "TraceSet":
        """Build from an iterable of {variable: value} mappings."""
        records = list(records)
        names = tuple(secret_vars) + tuple(observable_vars)
        cols = {
            name: np.array([str(rec[name]) for rec in records], dtype=str)
            for name in names
        }
        return cls(tuple(secret_vars), tuple(observable_vars), cols)


def write_traces(traces: TraceSet, path) -> None:
    """Write the CSV trace format (s:/o: prefixed header)."""
    header = [f"s:{v}" for v in traces.secret_vars] + [
        f"o:{v}" for v in traces.observable_vars
    ]
    cols = [traces.columns[v] for v in traces.variables]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow(row)


def read_traces(path) -> TraceSet:
    """Read the CSV trace format back into a TraceSet."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty trace file") from None
        secret_vars = []
        observable_vars = []
        for cell in header:
            if cell.startswith("s:"):
                secret_vars.append(cell[2:])
            elif cell.startswith("o:"):
                observable_vars.append(cell[2:])
            else:
                raise ValueError(
                    f"{path}: header column {cell!r} lacks an s:/o: prefix"
                )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: wrong number of cells")
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no records")
    data = np.array(rows, dtype=str)
    names = secret_vars + observable_vars
    cols = {name: data[:, i].copy() for i, name in enumerate(names)}
    return TraceSet(tuple(secret_vars), tuple(observable_vars), cols)
