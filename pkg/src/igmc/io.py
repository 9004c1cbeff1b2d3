"""Byte-stable serialization for experiment artifacts."""

from __future__ import annotations

import hashlib
import json
import math
from typing import Iterable, Sequence


def fmt(x) -> str:
    """17 significant digits for floats; ints and strings verbatim; None as empty."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def csv_bytes(header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> bytes:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return fmt(obj)
    return obj


def json_bytes(obj) -> bytes:
    return (json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n").encode("utf-8")


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def read_csv_rows(text: str) -> tuple[list[str], list[list[str]]]:
    """Header and rows of an artifact CSV, skipping ``#`` comment lines."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]
