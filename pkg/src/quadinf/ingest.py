"""CSV ingestion: parse, impute, centre, repair rank."""

from __future__ import annotations

import csv
import math

import numpy as np

from .errors import ConfigError, ParseError
from .linalg import RANK_TOL, Dataset, make_dataset

MISSING_TOKENS = frozenset({"", "NA"})


def _resolve_response(header, response):
    if isinstance(response, int) or (isinstance(response, str) and response.lstrip("-").isdigit()
                                     and response not in header):
        k = int(response)
        if not -len(header) <= k < len(header):
            raise ConfigError(f"response column index {k} out of range")
        return k % len(header)
    if response not in header:
        raise ConfigError(f"response column {response!r} not found in header")
    return header.index(response)


def read_table(path, missing=MISSING_TOKENS):
    """Header plus a float matrix with NaN at missing cells."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("file is empty", row=1) from None
        if len(set(header)) != len(header):
            raise ParseError("duplicate column names in header", row=1)
        rows = []
        for line, rec in enumerate(reader, start=2):
            if not rec or (len(rec) == 1 and not rec[0].strip()):
                continue
            if len(rec) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(rec)}", row=line)
            vals = []
            for name, cell in zip(header, rec):
                cell = cell.strip()
                if cell in missing:
                    vals.append(math.nan)
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"non-numeric value {cell!r}", row=line,
                                     column=name) from None
                if not math.isfinite(v):
                    raise ParseError(f"non-finite value {cell!r}", row=line, column=name)
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise ParseError("no data rows", row=2)
    return header, np.array(rows, dtype=float)


def impute_means(data, header):
    """Fill NaNs by column means of observed values; returns (data, counts)."""
    data = data.copy()
    counts = []
    for j, name in enumerate(header):
        miss = np.isnan(data[:, j])
        k = int(miss.sum())
        if k == 0:
            continue
        if k == data.shape[0]:
            raise ParseError("column has no observed values", column=name)
        data[miss, j] = np.mean(data[~miss, j])
        counts.append((name, k))
    return data, counts


def ingest_csv(path, response_column=0, center: bool = True, missing=MISSING_TOKENS,
               repair: bool = True, tol: float = RANK_TOL) -> Dataset:
    """Load ``path`` into a :class:`Dataset`.

    Missing cells (tokens in ``missing``) are replaced by the mean of the
    observed values in their column, then the data are optionally centred
    and linearly dependent predictors dropped (earliest columns kept).
    ``dropped_columns`` indexes the predictor columns in file order with
    the response removed.
    """
    header, data = read_table(path, missing)
    k = _resolve_response(header, response_column)
    data, counts = impute_means(data, header)
    names = [h for j, h in enumerate(header) if j != k]
    if not names:
        raise ConfigError("no predictor columns besides the response")
    x = np.delete(data, k, axis=1)
    return make_dataset(data[:, k], x, center=center, repair=repair, tol=tol,
                        column_names=names, imputed=counts)
