"""Serialization helpers for reports.

JSON floats are written with 17 significant digits so every double
round-trips exactly; text output rounds to 7.
"""

from __future__ import annotations

import json
import math
from enum import Enum

import numpy as np

SCHEMA_VERSION = 1


def _float17(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _plain(obj):
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with 17-significant-digit floats and deterministic key order as given."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float17(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(_plain(v), (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def fmt7(x) -> str:
    x = _plain(x)
    if isinstance(x, float):
        return format(x, ".7g")
    return str(x)


def text_lines(d: dict, prefix: str = "") -> list[str]:
    """Flatten a report dict into ``key: value`` lines."""
    lines = []
    for k, v in d.items():
        v = _plain(v)
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            lines += text_lines(v, key + ".")
        elif isinstance(v, (list, tuple)) and v and isinstance(_plain(v[0]), (list, tuple)):
            lines.append(f"{key}:")
            lines += ["  " + " ".join(fmt7(x) for x in row) for row in v]
        elif isinstance(v, (list, tuple)):
            lines.append(f"{key}: " + " ".join(fmt7(x) for x in v))
        else:
            lines.append(f"{key}: {fmt7(v)}")
    return lines
