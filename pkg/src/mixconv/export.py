"""CSV and JSON writers with round-trip float formatting (17 significant digits)."""

from __future__ import annotations

import enum
import io
import json
import math

import numpy as np

from .crocco import CroccoProfile
from .monitors import monitor_series
from .ode import Trajectory


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _csv(header, columns) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in zip(*columns):
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def trajectory_csv(traj: Trajectory, monitors: bool = False) -> str:
    header = ["t", "f", "fp", "fpp"]
    cols = [traj.t, traj.f, traj.fp, traj.fpp]
    if monitors:
        for name in ("H", "L", "K"):
            header.append(name)
            cols.append(monitor_series(traj, name).values)
    return _csv(header, cols)


def crocco_csv(profile: CroccoProfile) -> str:
    return _csv(["y", "v", "vp"], [profile.y, profile.v, profile.vp])


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, enum.Enum):
        return _encode(obj.value, indent, level)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int | None = None) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    return _encode(obj, indent, 0)
