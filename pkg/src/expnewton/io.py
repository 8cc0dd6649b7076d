"""CSV/JSON serialization with atomic writes.

CSV numbers use 17 significant digits (``%.17g`` is locale independent), so
a profile written and read back reproduces every sample exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .radial import RadialProfile

PROFILE_HEADER = ("r", "u", "du")
ORBIT_HEADER = ("tau", "x", "theta", "y")
RESISTANCE_HEADER = ("lambda", "E", "err")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def profile_csv(profile: RadialProfile) -> str:
    return to_csv(PROFILE_HEADER, zip(profile.r, profile.u, profile.p))


def orbit_csv(orbit) -> str:
    return to_csv(ORBIT_HEADER, zip(orbit.tau, orbit.x, orbit.theta, orbit.y))


def read_profile_csv(path) -> RadialProfile:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != PROFILE_HEADER:
            raise ValueError(f"expected header {','.join(PROFILE_HEADER)}, got {','.join(header)}")
        data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError("profile needs at least two samples")
    return RadialProfile(data[:, 0], data[:, 1], data[:, 2], "file")


def jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    return obj


def summary_json(command: str, inputs: dict, results, diagnostics: dict) -> str:
    doc = {"command": command, "inputs": inputs, "results": results, "diagnostics": diagnostics}
    return json.dumps(jsonable(doc), indent=2, allow_nan=False) + "\n"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
