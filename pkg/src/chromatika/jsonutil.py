"""Deterministic JSON emission.

All JSON the package writes (CLI outputs, reports, service responses) goes
through ``dumps`` so that floats are rendered with 12 significant digits and
identical inputs always produce identical bytes.
"""

import json
from typing import Any

SIG_DIGITS = 12


def round_floats(obj: Any, digits: int = SIG_DIGITS) -> Any:
    """Recursively round every float to ``digits`` significant digits."""
    if isinstance(obj, float):
        return float(format(obj, f".{digits}g"))
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj


def dumps(obj: Any, indent: int | None = None) -> str:
    return json.dumps(round_floats(obj), indent=indent, allow_nan=False)


def dump_path(obj: Any, path, indent: int | None = 2) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj, indent=indent))
        fh.write("\n")
