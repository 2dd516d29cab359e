"""Deterministic CSV and JSON output with atomic replacement.

Numbers are written with 17 significant digits so identical runs produce
byte-identical files; every data file gets a JSON metadata sidecar
(``<name>.meta.json``) carrying the configuration echo, package versions and
wall time.  Files are written to a temporary name and renamed on success.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from typing import Any, Dict, Iterable, Sequence

import numpy as np
import scipy

__all__ = ["format_number", "write_csv", "write_json", "sidecar"]


def format_number(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, payload: Dict[str, Any]):
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def sidecar(path: str, command: str, config_echo: Dict[str, Any], wall_time: float):
    from . import __version__

    write_json(
        path + ".meta.json",
        {
            "command": command,
            "config": config_echo,
            "versions": {
                "oceanray": __version__,
                "python": sys.version.split()[0],
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "wall_time_seconds": wall_time,
        },
    )
