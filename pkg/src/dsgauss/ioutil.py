"""Deterministic report serialization.

Floats are written with 17 significant digits so a double round-trips
losslessly; key order follows dict insertion order.  Identical inputs
therefore produce byte-identical output.  Files are written atomically
(temp file in the target directory, then rename).
"""

from __future__ import annotations

import math
import os
import tempfile


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return format(x, ".1f")
    return format(x, ".17g")


def dumps_json(obj, indent: int = 2) -> str:
    """Serialize to JSON with 17-significant-digit floats."""

    def render(node, depth):
        pad = " " * (indent * depth)
        pad_in = " " * (indent * (depth + 1))
        if node is None:
            return "null"
        if isinstance(node, bool):
            return "true" if node else "false"
        if isinstance(node, int):
            return str(node)
        if isinstance(node, float):
            return _fmt_float(node)
        if isinstance(node, str):
            import json as _json

            return _json.dumps(node)
        if isinstance(node, dict):
            if not node:
                return "{}"
            items = [
                f"{pad_in}{render(str(k), 0)}: {render(v, depth + 1)}" for k, v in node.items()
            ]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(node, (list, tuple)):
            if not node:
                return "[]"
            items = [f"{pad_in}{render(v, depth + 1)}" for v in node]
            return "[\n" + ",\n".join(items) + "\n" + pad + "]"
        raise TypeError(f"cannot serialize {type(node).__name__}")

    return render(obj, 0) + "\n"


def dumps_csv(header: list[str], rows: list[list]) -> str:
    """Serialize rows to CSV with 17-significant-digit floats and \\n endings."""

    def cell(x):
        if x is None:
            return ""
        if isinstance(x, bool):
            return "true" if x else "false"
        if isinstance(x, float):
            if math.isnan(x):
                return "nan"
            return _fmt_float(x) if not math.isinf(x) else ("inf" if x > 0 else "-inf")
        s = str(x)
        if any(ch in s for ch in ",\"\n"):
            s = '"' + s.replace('"', '""') + '"'
        return s

    lines = [",".join(header)]
    lines += [",".join(cell(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def atomic_write(path: str, text: str):
    """Write text to ``path`` via a temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
