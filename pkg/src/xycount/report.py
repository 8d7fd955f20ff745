"""Delimited output writers: CSV and JSON with an echoed config block.

Every file starts with the effective configuration that produced it, so any
row can be re-derived by a direct library call.  Rendering is deterministic:
floats use repr (shortest round-trip decimal), metadata keys are sorted, and
nothing time- or host-dependent is written.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

CSV = "csv"
JSON = "json"
FORMATS = (CSV, JSON)


def render_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, metadata: dict, columns, rows) -> None:
    lines = [f"# {key} = {render_cell(value)}" for key, value in sorted(metadata.items())]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(render_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _sanitize(obj):
    """json.dump would emit the non-standard NaN token; use null instead."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def write_json(path: Path, metadata: dict, records) -> None:
    payload = {"config": _sanitize(metadata), "records": _sanitize(records)}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_rows(path: Path, fmt: str, metadata: dict, columns, rows) -> None:
    """One table, either as CSV or as a JSON list of per-row objects."""
    if fmt == CSV:
        write_csv(path, metadata, columns, rows)
    elif fmt == JSON:
        records = [dict(zip(columns, row)) for row in rows]
        write_json(path, metadata, records)
    else:
        raise ValueError(f"unknown format {fmt!r}")
