"""Tabular datasets and delimited-file input/output.

Categorical columns are stored as integer codes into their declared domain;
numeric columns as float64.  CSV round-trips byte-identically: the writer
emits canonical value text and the reader parses exactly that.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    EmptyFileError,
    MixedTypeError,
    SchemaMismatchError,
)

CATEGORICAL = "categorical"
NUMERIC = "numeric"


@dataclass(frozen=True)
class ColumnType:
    """Declared type of one dataset column."""

    kind: str
    domain: tuple = ()

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, NUMERIC):
            raise ValueError(f"unknown column kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if not self.domain:
                raise ValueError("categorical column needs a non-empty domain")
            if len(set(map(str, self.domain))) != len(self.domain):
                raise ValueError("domain values must be distinct")
            object.__setattr__(self, "domain", tuple(self.domain))
        elif self.domain:
            raise ValueError("numeric column takes no domain")


def categorical(*domain) -> ColumnType:
    return ColumnType(CATEGORICAL, tuple(domain))


NUMERIC_TYPE = ColumnType(NUMERIC)


class Dataset:
    """Rectangular table with typed columns.

    ``codes(name)`` returns the int64 code array of a categorical column,
    ``numeric(name)`` the float64 array of a numeric one, ``values(name)``
    the decoded python values of either.
    """

    def __init__(self, columns, coltypes, arrays, validate=True):
        self.columns = tuple(columns)
        self.coltypes = dict(coltypes)
        self._arrays = {}
        if set(self.columns) != set(self.coltypes):
            raise SchemaMismatchError("column names and column types disagree")
        if len(set(self.columns)) != len(self.columns):
            raise SchemaMismatchError("duplicate column name")
        lengths = set()
        for name in self.columns:
            ct = self.coltypes[name]
            arr = np.asarray(arrays[name])
            if ct.kind == CATEGORICAL:
                arr = arr.astype(np.int64)
                if validate and arr.size and (arr.min() < 0 or arr.max() >= len(ct.domain)):
                    raise DomainError(f"column {name}: code outside domain")
            else:
                arr = arr.astype(np.float64)
            arr.setflags(write=False)
            self._arrays[name] = arr
            lengths.add(len(arr))
        if len(lengths) > 1:
            raise SchemaMismatchError("columns have unequal lengths")
        self.n = lengths.pop() if lengths else 0

    def codes(self, name) -> np.ndarray:
        ct = self._type(name)
        if ct.kind != CATEGORICAL:
            raise MixedTypeError(f"column {name} is numeric, not categorical")
        return self._arrays[name]

    def numeric(self, name) -> np.ndarray:
        ct = self._type(name)
        if ct.kind != NUMERIC:
            raise MixedTypeError(f"column {name} is categorical, not numeric")
        return self._arrays[name]

    def values(self, name) -> list:
        ct = self._type(name)
        if ct.kind == CATEGORICAL:
            return [ct.domain[c] for c in self._arrays[name]]
        return list(self._arrays[name])

    def take(self, indices) -> "Dataset":
        """Row subset / resample by integer index array."""
        picked = {n: self._arrays[n][indices] for n in self.columns}
        return Dataset(self.columns, self.coltypes, picked, validate=False)

    def _type(self, name) -> ColumnType:
        if name not in self.coltypes:
            raise SchemaMismatchError(f"no column named {name}")
        return self.coltypes[name]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.columns == other.columns
            and self.coltypes == other.coltypes
            and all(np.array_equal(self._arrays[n], other._arrays[n]) for n in self.columns)
        )

    def __repr__(self):
        return f"Dataset(n={self.n}, columns={self.columns})"


def from_values(columns, coltypes, value_columns) -> Dataset:
    """Build a dataset from decoded per-column value lists, validating domains."""
    arrays = {}
    for name in columns:
        ct = coltypes[name]
        vals = value_columns[name]
        if ct.kind == CATEGORICAL:
            lookup = _domain_lookup(ct)
            codes = np.empty(len(vals), dtype=np.int64)
            for i, cell in enumerate(vals):
                code = lookup.get(cell if isinstance(cell, str) else str(cell))
                if code is None:
                    raise DomainError(
                        f"row {i + 1}, column {name}: value {cell!r} outside domain"
                    )
                codes[i] = code
            arrays[name] = codes
        else:
            arrays[name] = np.asarray([float(v) for v in vals], dtype=np.float64)
    return Dataset(columns, coltypes, arrays, validate=False)


def _domain_lookup(ct: ColumnType) -> dict:
    return {_cell_text(v): i for i, v in enumerate(ct.domain)}


def _cell_text(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def load_csv(path, schema) -> Dataset:
    """Read an RFC-4180-style CSV whose header must match ``schema`` by name.

    schema: column name -> ColumnType.  Rows are validated cell by cell;
    offending cells are reported with their 1-based data row number.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    return loads_csv(text, schema, origin=str(path))


def loads_csv(text, schema, origin="<string>") -> Dataset:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise EmptyFileError(f"{origin}: no header row")
    header = rows[0]
    body = rows[1:]
    if len(set(header)) != len(header):
        raise SchemaMismatchError(f"{origin}: duplicate column in header")
    missing = sorted(set(schema) - set(header))
    extra = sorted(set(header) - set(schema))
    if missing or extra:
        parts = []
        if missing:
            parts.append("missing columns: " + ", ".join(missing))
        if extra:
            parts.append("unexpected columns: " + ", ".join(extra))
        raise SchemaMismatchError(f"{origin}: " + "; ".join(parts))
    if not body:
        raise EmptyFileError(f"{origin}: header only, no data rows")

    width = len(header)
    columns = {name: [] for name in header}
    for i, row in enumerate(body, start=1):
        if len(row) != width:
            raise SchemaMismatchError(f"{origin}: row {i} has {len(row)} cells, expected {width}")
        for name, cell in zip(header, row):
            columns[name].append(cell)

    arrays = {}
    for name in header:
        ct = schema[name]
        cells = columns[name]
        if ct.kind == CATEGORICAL:
            lookup = _domain_lookup(ct)
            codes = np.empty(len(cells), dtype=np.int64)
            for i, cell in enumerate(cells):
                code = lookup.get(cell)
                if code is None:
                    raise DomainError(
                        f"{origin}: row {i + 1}, column {name}: "
                        f"value {cell!r} outside domain"
                    )
                codes[i] = code
            arrays[name] = codes
        else:
            floats = np.empty(len(cells), dtype=np.float64)
            for i, cell in enumerate(cells):
                try:
                    floats[i] = float(cell)
                except ValueError:
                    raise DomainError(
                        f"{origin}: row {i + 1}, column {name}: "
                        f"{cell!r} is not numeric"
                    ) from None
            arrays[name] = floats
    return Dataset(tuple(header), schema, arrays, validate=False)


def dumps_csv(ds: Dataset) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(ds.columns)
    decoded = []
    for name in ds.columns:
        ct = ds.coltypes[name]
        if ct.kind == CATEGORICAL:
            texts = [_cell_text(v) for v in ct.domain]
            decoded.append([texts[c] for c in ds.codes(name)])
        else:
            decoded.append([repr(float(v)) for v in ds.numeric(name)])
    for row in zip(*decoded):
        writer.writerow(row)
    return out.getvalue()


def save_csv(ds: Dataset, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_csv(ds))
