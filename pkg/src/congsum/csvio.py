"""CSV emission: mandatory header, 17 significant digits, complex as (re, im)."""

from __future__ import annotations

import csv
import io
from typing import Iterable, TextIO


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _flatten(row: dict) -> dict:
    out = {}
    for key, val in row.items():
        if isinstance(val, complex):
            out[f"{key}_re"] = val.real
            out[f"{key}_im"] = val.imag
        elif hasattr(val, "dtype") and val.dtype.kind == "c":
            out[f"{key}_re"] = float(val.real)
            out[f"{key}_im"] = float(val.imag)
        elif hasattr(val, "item"):
            out[key] = val.item()
        else:
            out[key] = val
    return out


def write_rows(rows: Iterable[dict], stream: TextIO) -> None:
    flat = [_flatten(r) for r in rows]
    header: list[str] = []
    for r in flat:
        header.extend(k for k in r if k not in header)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for r in flat:
        writer.writerow([_format(r.get(k)) for k in header])


def rows_to_text(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    write_rows(rows, buf)
    return buf.getvalue()
