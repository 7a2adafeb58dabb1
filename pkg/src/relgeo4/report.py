"""Report serialization: JSON with 17 significant digits, aligned text, CSV."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA = "relgeo4/1"


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj, indent=2):
    """Serialize ``obj`` deterministically; floats use 17 significant digits."""
    out = io.StringIO()
    _write(obj, out, indent, 0)
    out.write("\n")
    return out.getvalue()


def _write(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for k, (key, val) in enumerate(obj.items()):
            out.write(pad + json.dumps(str(key)) + ": ")
            _write(val, out, indent, level + 1)
            out.write(",\n" if k < len(obj) - 1 else "\n")
        out.write(end + "}")
    elif isinstance(obj, (list, tuple)) or (isinstance(obj, np.ndarray) and obj.ndim):
        obj = list(obj)
        if not obj:
            out.write("[]")
            return
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            out.write("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.write("[\n")
        for k, val in enumerate(obj):
            out.write(pad)
            _write(val, out, indent, level + 1)
            out.write(",\n" if k < len(obj) - 1 else "\n")
        out.write(end + "]")
    else:
        out.write(_scalar(obj))


def _scalar(v):
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)) or (isinstance(v, np.ndarray) and v.ndim == 0):
        return _num(v)
    return json.dumps(str(v))


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "yes" if v else "no"
    if isinstance(v, (float, np.floating)):
        return "nan" if not math.isfinite(v) else f"{float(v):.10g}"
    if v is None:
        return "-"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def _table(rows, columns):
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells)
    return lines


def _flatten(d, prefix=""):
    for k, v in d.items():
        if isinstance(v, dict):
            yield from _flatten(v, f"{prefix}{k}.")
        else:
            yield f"{prefix}{k}", v


def to_text(report):
    """Human-readable aligned-column rendering."""
    lines = [f"relgeo4 {report.get('command', '')}"]
    surface = report.get("surface")
    if surface:
        lines.append(f"surface: {surface['name']}  normalization: {surface['normalization']['mode']}")
    if report.get("grid"):
        lines.append(f"grid: {'x'.join(str(n) for n in report['grid'])}  points: {len(report.get('points', []))}")
    summary, tables = [], []
    for k, v in _flatten(report.get("summary", {})):
        if isinstance(v, list) and v and all(isinstance(r, dict) for r in v):
            tables.append((k, v))
        else:
            summary.append((k, v))
    if summary:
        lines.append("")
        width = max(len(k) for k, _ in summary)
        lines.extend(f"{k.ljust(width)}  {_fmt(v)}" for k, v in summary)
    for k, rows in tables:
        lines.extend(["", f"{k}:"])
        lines.extend(_table(rows, list(rows[0])))
    checks = report.get("checks")
    if checks:
        lines.append("")
        lines.extend(_table(checks, ["name", "value", "tolerance", "passed"]))
    cands = report.get("candidates")
    if cands:
        lines.append("")
        cols = ["proposition", "label", "mu", "predicted_field", "predicted_value", "certificate_residual", "status"]
        lines.extend(_table(cands, cols))
    return "\n".join(lines) + "\n"


def points_csv(points):
    """Per-point table as CSV text; nested lists are spread over numbered columns."""
    if not points:
        return ""
    flat = []
    for p in points:
        row = {}
        for k, v in _flatten(p):
            if isinstance(v, (list, tuple)):
                for i, x in enumerate(v, start=1):
                    row[f"{k}{i}"] = x
            else:
                row[k] = v
        flat.append(row)
    fields = list(flat[0])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in flat:
        w.writerow([_scalar(row.get(f)) if not isinstance(row.get(f), str) else row.get(f) for f in fields])
    return buf.getvalue()
