"""Deterministic CSV/JSON emission: fixed column orders, 12-significant-digit floats."""

import json
import os

__all__ = ["format_value", "write_csv", "write_json", "render_table"]


def format_value(x):
    """Shortest representation capped at 12 significant digits; reproducible diffs."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    if hasattr(x, "item"):
        x = x.item()
        return format_value(x)
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _normalize(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):
        return _normalize(obj.item())
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _normalize(obj.tolist())
    return obj


def write_csv(path, columns, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def write_json(path, obj):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_normalize(obj), fh, indent=2, sort_keys=False)
        fh.write("\n")


def render_table(columns, rows):
    """Simple aligned text table for stdout."""
    cells = [[format_value(v) for v in row] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) if cells else len(c)
              for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    for r in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)
