"""Plain-text output helpers: CSV emission and deterministic JSON."""

from __future__ import annotations

import json
import os
from typing import Any, Iterable, Sequence

__all__ = ["fmt", "write_csv", "dump_json", "load_json", "resolve_out_dir"]

OUT_DIR_ENV = "ANNEAL_LAB_OUT"


def fmt(value: Any) -> str:
    """Render a value for CSV output. Floats get 12 significant digits."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.11e}"
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write rows to ``path`` as comma-separated text with a header line."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def dump_json(path: str, obj: Any) -> None:
    """Serialize ``obj`` deterministically: sorted keys, two-space indent."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def resolve_out_dir(explicit: str | None) -> str:
    """Pick the output directory: flag, then environment, then cwd."""
    if explicit:
        return explicit
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return env
    return os.getcwd()
