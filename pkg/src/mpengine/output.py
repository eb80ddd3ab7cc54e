"""CSV / JSON emitters with stable, platform-independent formatting.

CSV files carry ``# key=value`` provenance lines, then one header row, then
data rows; floats are written with 12 significant digits in normalized
scientific notation, LF line endings, UTF-8.
"""

from __future__ import annotations

import io
import json
import math
from typing import Iterable, Sequence


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x == 0.0:
            x = 0.0  # drop the sign of -0.0
        return format(x, ".11e")
    return str(v)


def render_csv(columns: Sequence[str], rows: Iterable[Sequence], meta: dict | None = None) -> str:
    buf = io.StringIO(newline="")
    for key, value in (meta or {}).items():
        buf.write(f"# {key}={value}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row length does not match header")
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def parse_csv(text: str):
    """Inverse of :func:`render_csv`: returns ``(meta, columns, rows)``."""
    meta, columns, rows = {}, None, []
    for line in text.split("\n"):
        if not line:
            continue
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append([_parse_cell(c) for c in line.split(",")])
    return meta, columns, rows


def _parse_cell(cell: str):
    if cell in ("true", "false"):
        return cell == "true"
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "tolist"):
        return _jsonable(v.tolist())
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def render_json(obj: dict) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"
