"""Profile CSV / JSON report serialisation with atomic writes."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

PROFILE_HEADER = ("r", "rho", "U")


def fmt(x: float) -> str:
    # 17 significant digits round-trip any binary64 value
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def rows_to_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return fmt(v)


def write_profile(path, r, rho, U) -> Path:
    return atomic_write_text(path, rows_to_csv(PROFILE_HEADER, zip(r, rho, U)))


def read_profile(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(h.strip() for h in header) != PROFILE_HEADER:
            raise ValueError(f"{path}: expected header r,rho,U, got {','.join(header)}")
        data = np.array([[float(x) for x in row] for row in reader if row], dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError(f"{path}: malformed profile")
    return data[:, 0], data[:, 1], data[:, 2]


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def write_json(path, obj) -> Path:
    return atomic_write_text(path, dumps_json(obj))
