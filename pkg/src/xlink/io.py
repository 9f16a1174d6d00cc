"""CSV emission and parsing for sweep tables.

Layout: ``# key: value`` metadata lines (sorted by key), a header row, then one
row per axis value. Floats are written with ``repr`` so they parse back
bit-exactly; an infinite SIR is an empty cell.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .experiments import SweepTable


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return ""
    if math.isnan(x):
        raise ValueError("NaN cannot be written to a sweep table")
    return repr(x)


def format_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    for key in sorted(table.metadata):
        value = str(table.metadata[key]).replace("\n", " ")
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    names = list(table.columns)
    writer.writerow([table.axis] + names)
    cols = [table.columns[n] for n in names]
    for i, v in enumerate(table.values):
        writer.writerow([_cell(v)] + [_cell(c[i]) for c in cols])
    return buf.getvalue()


def write_csv(table: SweepTable, path) -> Path:
    path = Path(path)
    if path.parent != Path("."):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(table))
    return path


def _parse_cell(text: str, name: str):
    if text == "":
        return math.inf
    if name.startswith("no_interference:") or name == "num_satellites":
        return int(text)
    return float(text)


def parse_csv(text: str) -> SweepTable:
    meta = {}
    body = []
    for line in text.splitlines(keepends=True):
        if line.startswith("#") and not body:
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
        else:
            body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise ValueError("missing header row")
    header, rows = rows[0], rows[1:]
    axis, names = header[0], header[1:]
    values = [_parse_cell(r[0], axis) for r in rows]
    columns = {}
    for k, name in enumerate(names, start=1):
        cells = [_parse_cell(r[k], name) for r in rows]
        dtype = int if name.startswith("no_interference:") else float
        columns[name] = np.array(cells, dtype=dtype)
    return SweepTable(axis=axis, values=values, columns=columns, metadata=meta)


def read_csv(path) -> SweepTable:
    return parse_csv(Path(path).read_text(encoding="utf-8"))
