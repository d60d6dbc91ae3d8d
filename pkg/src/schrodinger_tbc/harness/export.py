"""Deterministic CSV/JSON output."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .. import __version__


class ExportError(OSError):
    pass


def fmt(v: float) -> str:
    return f"{float(v):.17g}"


def time_label(t: float) -> str:
    """Shortest text that reads back as ``t``, for file names."""
    text = repr(float(t))
    return text[:-2] if text.endswith(".0") else text


def _write(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def series_csv(times, values, column: str = "error") -> str:
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise ValueError("times and values must have equal length")
    lines = [f"t,{column}"]
    lines += [f"{fmt(t)},{fmt(v)}" for t, v in zip(times, values)]
    return "\n".join(lines) + "\n"


def write_series_csv(path, times, values, column: str = "error") -> Path:
    return _write(path, series_csv(times, values, column))


def grid_csv(grid) -> str:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2:
        raise ValueError("grid must be two-dimensional")
    return "\n".join(",".join(fmt(v) for v in row) for row in grid) + "\n"


def write_grid_csv(path, grid) -> Path:
    return _write(path, grid_csv(grid))


def write_table_csv(path, header, rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    return _write(path, "\n".join(lines) + "\n")


def run_id(config: dict) -> str:
    """Content hash of the configuration, in the style of a git object id."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha1(b"run %d\0" % len(blob) + blob).hexdigest()


def write_sidecar(path, config: dict, label: str, summary: dict | None = None) -> Path:
    doc = {
        "run_id": run_id(config),
        "scheme": label,
        "config": config,
        "summary": summary or {},
        "version": __version__,
    }
    return _write(path, json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


__all__ = [
    "ExportError",
    "fmt",
    "grid_csv",
    "run_id",
    "time_label",
    "series_csv",
    "write_grid_csv",
    "write_series_csv",
    "write_sidecar",
    "write_table_csv",
]
