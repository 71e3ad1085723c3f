"""Plot-data CSV and JSON writers with fixed six-significant-digit numbers."""

from __future__ import annotations

import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    return f"{x:.6g}"


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float) or hasattr(obj, "__float__"):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.6g}") + 0.0
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)
