"""Canonical JSON writing.

Artifacts are compared byte for byte across runs, so serialization must
be a pure function of the value: keys sorted, fixed separators, floats
rendered by repr (the shortest string that round-trips the exact
double).  NaN and infinity are rejected rather than silently written.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any


def _check_finite(obj: Any) -> None:
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite float {obj!r} cannot be serialized canonically")
    if isinstance(obj, dict):
        for v in obj.values():
            _check_finite(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _check_finite(v)


def canonical_dumps(obj: Any) -> str:
    _check_finite(obj)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def canonical_dump(obj: Any, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_dumps(obj))
        fh.write("\n")


def jsonl_append(path: str | Path, record: dict) -> None:
    with open(path, "a") as fh:
        fh.write(canonical_dumps(record))
        fh.write("\n")


def jsonl_read(path: str | Path) -> list[dict]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
