import re
from typing import Iterable, List, Optional

import numpy as np

from engine.errors import DomainError

GRID_RE = re.compile(
    r"^\s*(?P<lo>[-+0-9.eE]+)\s*:\s*(?P<hi>[-+0-9.eE]+)\s*:\s*(?P<count>\d+)\s*(?P<spacing>log|lin)?\s*$"
)


def parse_grid(text: str) -> np.ndarray:
    """``min:max:count(log|lin)`` -> array of radii; spacing defaults to log."""
    m = GRID_RE.match(text or "")
    if not m:
        raise ValueError(f"grid must look like min:max:count[log|lin], got {text!r}")
    lo, hi, count = float(m["lo"]), float(m["hi"]), int(m["count"])
    spacing = m["spacing"] or "log"
    if count < 1:
        raise ValueError("grid count must be >= 1")
    if not lo <= hi:
        raise ValueError(f"grid needs min <= max, got {lo} > {hi}")
    if spacing == "log":
        if not lo > 0:
            raise ValueError("log grid needs min > 0")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def parse_float_list(selection, default: Iterable[float] = ()) -> List[float]:
    # Accept list or CSV string; blank -> default
    if isinstance(selection, (list, tuple)):
        return [float(x) for x in selection] if selection else list(default)
    s = (selection or "").strip()
    if not s:
        return list(default)
    return [float(p) for p in s.replace(" ", "").split(",") if p]


def parse_int_list(selection, default: Iterable[int] = ()) -> List[int]:
    return [int(round(v)) for v in parse_float_list(selection, default)]


def parse_cone(selection, n_rays: Optional[int] = None) -> Optional[List[int]]:
    """Ray indices for a cone; blank or "all" -> None (every ray)."""
    if selection is None:
        return None
    if isinstance(selection, (list, tuple)):
        indices = [int(x) for x in selection]
    else:
        s = str(selection).strip().lower()
        if not s or s == "all":
            return None
        indices = [int(n) for n in re.findall(r"[-+]?\d+", s)]
    for i in indices:
        if i < 0 or (n_rays is not None and i >= n_rays):
            bound = f" (measure has {n_rays} rays)" if n_rays is not None else ""
            raise DomainError(f"cone index {i} is out of range{bound}")
    return indices or None


__all__ = [
    "parse_grid",
    "parse_float_list",
    "parse_int_list",
    "parse_cone",
]
