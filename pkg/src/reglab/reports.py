"""Rendering of result rows (table, CSV, JSON) and the NDJSON run log."""
from __future__ import annotations

import csv
import io
import json
import math
import numbers
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from .models import encode_extended


def _plain(value: Any) -> Any:
    """JSON-safe form: ±inf as strings, fractions as 'p/q', nested containers recursed."""
    if hasattr(value, "to_json"):
        return _plain(value.to_json())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, float) and math.isinf(value):
        return encode_extended(value)
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def plain_rows(rows: Iterable[Mapping[str, Any]]) -> List[Dict[str, Any]]:
    return [_plain(dict(row)) for row in rows]


def _columns(rows: Sequence[Mapping[str, Any]]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return str(value)


def render_table(rows: Sequence[Mapping[str, Any]]) -> str:
    rows = plain_rows(rows)
    if not rows:
        return "(no rows)"
    columns = _columns(rows)
    cells = [[_cell(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[k]) for r in cells)) for k, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells)
    return "\n".join(lines)


def render_csv(rows: Sequence[Mapping[str, Any]]) -> str:
    rows = plain_rows(rows)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=_columns(rows), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(_plain(payload), indent=2, ensure_ascii=False)


def render(rows: Sequence[Mapping[str, Any]], fmt: str, summary: Optional[Mapping[str, Any]] = None) -> str:
    if fmt == "json":
        payload: Dict[str, Any] = {"rows": plain_rows(rows)}
        if summary:
            payload["summary"] = _plain(summary)
        return render_json(payload)
    if fmt == "csv":
        return render_csv(rows)
    text = render_table(rows)
    if summary:
        text += "\n\n" + "\n".join(f"{k}: {_cell(_plain(v))}" for k, v in summary.items())
    return text


class RunLogWriter:
    """Append one JSON object per computed row."""

    def __init__(self, path: Path) -> None:
        self.path = path

    def write(self, record: Mapping[str, Any]) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            json.dump(_plain(dict(record)), fh, ensure_ascii=False)
            fh.write("\n")
