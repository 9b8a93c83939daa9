"""CSV tables and JSON summaries written by the command-line front end.

Floats are written with ``repr`` so :func:`read_table` recovers them
exactly.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def write_table(path, columns, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    return path


def read_table(path):
    """Rows as dicts; numeric cells come back as int or float."""
    with Path(path).open(newline="") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_summary(path, data: dict):
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


def read_summary(path) -> dict:
    return json.loads(Path(path).read_text())
