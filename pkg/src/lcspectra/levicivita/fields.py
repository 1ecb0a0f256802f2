"""Polar product grids and complex fields on the x- and u-planes."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np


class Chart(str, enum.Enum):
    X = "x"
    U = "u"


@dataclass(frozen=True)
class PolarGrid:
    """n_r radii spaced uniformly on [r_min, r_max] (both included) times
    n_theta angles 2 pi j / n_theta.  ``r_min = 0`` puts a ring of samples on
    the origin."""

    chart: Chart
    n_r: int
    n_theta: int
    r_max: float
    r_min: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "chart", Chart(self.chart))
        if self.n_r < 2:
            raise ValueError(f"n_r must be >= 2, got {self.n_r}")
        if self.n_theta < 4 or self.n_theta % 2:
            raise ValueError(f"n_theta must be even and >= 4, got {self.n_theta}")
        if not 0 <= self.r_min < self.r_max:
            raise ValueError(f"need 0 <= r_min < r_max, got [{self.r_min}, {self.r_max}]")

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n_r - 1)

    @property
    def dtheta(self) -> float:
        return 2 * np.pi / self.n_theta

    @property
    def radii(self) -> np.ndarray:
        return self.r_min + self.dr * np.arange(self.n_r)

    @property
    def thetas(self) -> np.ndarray:
        return self.dtheta * np.arange(self.n_theta)

    @property
    def has_origin(self) -> bool:
        return self.r_min == 0

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(r, theta) broadcast to shape (n_r, n_theta)."""
        return np.meshgrid(self.radii, self.thetas, indexing="ij")

    def cartesian(self) -> tuple[np.ndarray, np.ndarray]:
        r, t = self.mesh()
        return r * np.cos(t), r * np.sin(t)

    def header(self) -> dict:
        return {"chart": self.chart.value, "n_r": self.n_r, "n_theta": self.n_theta,
                "r_max": self.r_max, "r_min": self.r_min}


@dataclass(frozen=True, eq=False)
class Field2D:
    """Complex samples indexed (radial, angular)."""

    grid: PolarGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_r, self.grid.n_theta):
            raise ValueError(f"values shape {v.shape} does not match grid "
                             f"({self.grid.n_r}, {self.grid.n_theta})")
        if not np.all(np.isfinite(v)):
            raise ValueError("field has non-finite samples")
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, func: Callable, grid: PolarGrid) -> "Field2D":
        """Evaluate ``func(c1, c2)`` at the grid's Cartesian points."""
        c1, c2 = grid.cartesian()
        return cls(grid, np.broadcast_to(func(c1, c2), c1.shape))

    def __mul__(self, other) -> "Field2D":
        return Field2D(self.grid, self.values * other)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Spinor2D:
    upper: Field2D
    lower: Field2D

    def __post_init__(self):
        if self.upper.grid != self.lower.grid:
            raise ValueError("spinor components must share one grid")

    @property
    def grid(self) -> PolarGrid:
        return self.upper.grid


def jacobian_weight(grid: PolarGrid) -> np.ndarray:
    """Area factor 4 u^2 of dx = 4 u^2 du, shape (n_r, 1)."""
    return 4.0 * grid.radii[:, None] ** 2


def radial_weights(grid: PolarGrid) -> np.ndarray:
    """Trapezoid weights for the integral of f r dr, shape (n_r, 1)."""
    w = np.full(grid.n_r, grid.dr)
    w[0] = w[-1] = 0.5 * grid.dr
    return (w * grid.radii)[:, None]


def integrate(values: np.ndarray, grid: PolarGrid) -> float:
    """Area integral of real samples: trapezoid in r, periodic rectangle in theta."""
    return float(np.sum(values * radial_weights(grid)) * grid.dtheta)


def norm(field: Field2D, jacobian: bool = False) -> float:
    """L2 norm; with ``jacobian`` the u-plane samples are weighted by 4 u^2.

    The full u-plane covers the x-plane twice, so for a pulled-back field the
    weighted norm is sqrt(2) times the x-plane norm (equal on a half-plane).
    """
    dens = np.abs(field.values) ** 2
    if jacobian:
        dens = dens * jacobian_weight(field.grid)
    return float(np.sqrt(integrate(dens, field.grid)))


# -- serialization: one JSON header line, then "re,im" rows, r index major ----

def write_field(field: Field2D, stream: TextIO) -> None:
    stream.write(json.dumps(field.grid.header(), sort_keys=True) + "\n")
    for z in field.values.ravel(order="C"):
        stream.write(f"{z.real:.17g},{z.imag:.17g}\n")


def read_field(stream: TextIO) -> Field2D:
    header = json.loads(stream.readline())
    grid = PolarGrid(Chart(header["chart"]), int(header["n_r"]), int(header["n_theta"]),
                     float(header["r_max"]), float(header.get("r_min", 0.0)))
    data = np.loadtxt(stream, delimiter=",", ndmin=2)
    values = (data[:, 0] + 1j * data[:, 1]).reshape(grid.n_r, grid.n_theta)
    return Field2D(grid, values)


def save_field(field: Field2D, path) -> None:
    with open(path, "w") as fh:
        write_field(field, fh)


def load_field(path) -> Field2D:
    with open(path) as fh:
        return read_field(fh)
