"""Rendering of command reports as tab-delimited text or JSON, from one dict.

A report is a dict whose values are scalars (int, str, bool, None), nested
dicts, or tables (lists of dicts with scalar values and identical keys).
Text output lists ``key<TAB>value`` lines for scalars, with nested keys
joined by dots, followed by one ``[key]`` section per table. ``parse_text``
inverts ``to_text``, so both formats carry the same data.
"""

from __future__ import annotations

import json
import re
from typing import Dict, List, Tuple

Report = Dict[str, object]

_INT = re.compile(r"-?\d+\Z")


def _scalar(v: object) -> str:
    if v is None:
        return "unknown"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        if "\t" in v or "\n" in v:
            raise ValueError(f"report strings cannot hold tabs or newlines: {v!r}")
        return v
    raise TypeError(f"unsupported report value {v!r}")


def _unscalar(s: str) -> object:
    if s == "unknown":
        return None
    if s in ("true", "false"):
        return s == "true"
    if _INT.match(s):
        return int(s)
    return s


def _walk(report: Report, prefix: str, scalars: List[Tuple[str, object]], tables: List[Tuple[str, list]]) -> None:
    for key, v in report.items():
        if "." in key or "\t" in key:
            raise ValueError(f"report keys cannot hold dots or tabs: {key!r}")
        path = f"{prefix}{key}"
        if isinstance(v, dict):
            if not v:
                raise ValueError(f"empty dict at {path} has no text form")
            _walk(v, path + ".", scalars, tables)
        elif isinstance(v, list):
            tables.append((path, v))
        else:
            scalars.append((path, v))


def to_text(report: Report) -> str:
    scalars: List[Tuple[str, object]] = []
    tables: List[Tuple[str, list]] = []
    _walk(report, "", scalars, tables)
    lines = [f"{k}\t{_scalar(v)}" for k, v in scalars]
    for path, rows in tables:
        lines.append("")
        lines.append(f"[{path}]")
        if rows:
            cols = list(rows[0])
            lines.append("\t".join(cols))
            for r in rows:
                if set(r) != set(cols):
                    raise ValueError(f"table {path} has rows with different columns")
                lines.append("\t".join(_scalar(r[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _insert(out: Report, path: str, value: object) -> None:
    *parents, leaf = path.split(".")
    cur = out
    for p in parents:
        cur = cur.setdefault(p, {})
    cur[leaf] = value


def parse_text(text: str) -> Report:
    """Inverse of ``to_text``."""
    out: Report = {}
    table = None
    header = None
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            table, header = [], None
            _insert(out, line[1:-1], table)
        elif table is not None:
            cells = line.split("\t")
            if header is None:
                header = cells
            else:
                table.append({c: _unscalar(x) for c, x in zip(header, cells)})
        else:
            key, _, value = line.partition("\t")
            _insert(out, key, _unscalar(value))
    return out


def to_json(report: Report) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown format {fmt!r}")
