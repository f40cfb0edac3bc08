"""CSV/JSON writers with round-trip float formatting (17 significant digits)."""

from __future__ import annotations

import csv
import json
import math


def format_float(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(x) for x in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    x = float(obj)
    if not math.isfinite(x):
        return str(x)
    # Round-trips through float() exactly.
    return float(format_float(x))


def write_json(path, data) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")
