"""Deterministic JSON/CSV emission for reports and configs.

All reals are written in decimal with 17 significant digits (lossless for
IEEE-754 doubles) so that identical runs produce byte-identical artifacts;
non-finite values are rendered as the strings "inf", "-inf", "nan".
Files are written atomically (temp file + rename).
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

__all__ = ["format_real", "dumps_json", "loads_json", "write_text_atomic"]


def format_real(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _encode(obj):
    if isinstance(obj, dict):
        items = sorted(obj.items())
        inner = ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in items)
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return format_real(x)
        return json.dumps(format_real(x))  # "inf"/"-inf"/"nan" as strings
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit reals."""
    return _encode(obj) + "\n"


def loads_json(text: str):
    return json.loads(text)


def write_text_atomic(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
