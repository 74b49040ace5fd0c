"""Small sampled-series containers shared by the analysis modules.

All grids are uniform; values carry a label and a metadata dict whose
``units`` entry defaults to "dimensionless" (the whole simulation runs in
units of the first resonator frequency).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def require_uniform(t: np.ndarray, what: str = "grid") -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise ValueError(f"{what} must be 1-D with at least two points")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(abs(t[-1] - t[0]), 1.0):
        raise ValueError(f"{what} must be uniform")
    return t


@dataclass
class TimeSeries:
    t: np.ndarray
    values: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = require_uniform(self.t, "time grid")
        self.values = np.asarray(self.values)
        if self.values.shape[0] != len(self.t):
            raise ValueError("values and time grid have different lengths")
        self.meta.setdefault("units", "dimensionless")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])
