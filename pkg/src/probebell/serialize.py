"""Deterministic text output: fixed float format, LF endings, stable key order.

Byte-identical reruns are part of the output contract, so nothing here may
depend on locale, environment, or insertion-time randomness.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

__all__ = ["fmt", "dump_json", "write_json", "write_csv"]


def fmt(x) -> str:
    """Canonical cell format: 12 significant digits for floats."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _emit(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v) or math.isinf(v):
            return "null"  # out-of-band values have no JSON number
        return format(v, ".12g")
    if isinstance(x, str):
        out = x.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    if isinstance(x, dict):
        items = ", ".join(f'{_emit(str(k))}: {_emit(v)}' for k, v in x.items())
        return "{" + items + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_emit(v) for v in x) + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dump_json(obj) -> str:
    return _emit(obj) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dump_json(obj), encoding="ascii", newline="\n")


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")
