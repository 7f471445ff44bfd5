"""Space-time sampling grids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Rectangular (x, t) grid.

    ``period`` marks an x-periodic grid; then ``x_max - x_min`` must be an
    integer multiple of it and the right endpoint is excluded from samples.
    """

    x_min: float
    x_max: float
    nx: int
    t_min: float
    t_max: float
    nt: int
    period: Optional[float] = None

    def __post_init__(self):
        if self.nx < 2 or self.nt < 2:
            raise ValueError("grid needs nx, nt >= 2")
        if not self.x_max > self.x_min:
            raise ValueError("grid needs x_max > x_min")
        if not self.t_max > self.t_min:
            raise ValueError("grid needs t_max > t_min")
        if self.period is not None:
            span = (self.x_max - self.x_min) / self.period
            if abs(span - round(span)) > 1e-12 * max(1.0, span) or round(span) < 1:
                raise ValueError(
                    f"periodic grid span {self.x_max - self.x_min!r} is not a "
                    f"multiple of the period {self.period!r}")

    @classmethod
    def periodic(cls, period: float, nx: int, t_min: float, t_max: float, nt: int,
                 n_periods: int = 1, x_min: float = 0.0) -> "SpaceTimeGrid":
        return cls(x_min, x_min + n_periods * period, nx, t_min, t_max, nt, period)

    @property
    def boundary(self) -> str:
        return "periodic" if self.period is not None else "line"

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx, endpoint=self.period is None)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.nt)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, T)`` arrays of shape ``(nt, nx)``."""
        x, t = np.meshgrid(self.x, self.t)
        return x, t

    def refined(self, factor: int = 2) -> "SpaceTimeGrid":
        nx = self.nx * factor if self.period is not None else (self.nx - 1) * factor + 1
        return SpaceTimeGrid(self.x_min, self.x_max, nx, self.t_min, self.t_max,
                             (self.nt - 1) * factor + 1, self.period)

    def as_dict(self) -> dict:
        return {
            "x_min": self.x_min, "x_max": self.x_max, "nx": self.nx,
            "t_min": self.t_min, "t_max": self.t_max, "nt": self.nt,
            "boundary": self.boundary,
            "period": self.period,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpaceTimeGrid":
        return cls(d["x_min"], d["x_max"], int(d["nx"]), d["t_min"], d["t_max"],
                   int(d["nt"]), d.get("period"))

