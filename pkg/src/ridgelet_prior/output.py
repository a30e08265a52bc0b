"""CSV artifacts with a metadata header.

Files start with ``# key: value`` lines, followed by a header row and data
rows. Floats are written with 17 significant digits so that they round-trip
exactly; nothing time-dependent is recorded, so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np
import scipy

__all__ = ["emit_plot_data", "read_plot_data", "run_metadata"]


def run_metadata(config_hash: str, seed: int) -> dict:
    from . import __version__

    return {
        "config_hash": config_hash,
        "seed": int(seed),
        "ridgelet_prior": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return format(v, ".17g") if math.isfinite(v) else str(v)
    return str(value)


def emit_plot_data(records, schema, path, metadata: dict | None = None) -> Path:
    """Write ``records`` (mappings or sequences) under the column order ``schema``.

    Raises
    ------
    OSError
        If the file cannot be written.
    KeyError
        If a mapping record lacks a schema column.
    """
    schema = list(schema)
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(schema)
    for rec in records:
        row = [rec[c] for c in schema] if isinstance(rec, dict) else list(rec)
        if len(row) != len(schema):
            raise ValueError(f"record has {len(row)} fields, schema has {len(schema)}")
        writer.writerow([_cell(v) for v in row])
    path = Path(path)
    try:
        path.write_text(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write plot data to {path}: {exc}") from exc
    return path


def _value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_plot_data(path):
    """Inverse of :func:`emit_plot_data`: ``(metadata, schema, records)``."""
    meta, lines = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# ") and not lines:
            key, _, value = line[2:].partition(": ")
            meta[key] = value
        else:
            lines.append(line)
    reader = csv.reader(lines)
    schema = next(reader)
    records = [dict(zip(schema, (_value(c) for c in row))) for row in reader]
    return meta, schema, records
