"""Operator-identity residuals on polar grids, and angular-index measurement.

Residual norms are area-weighted L2 norms over the interior rings: the
innermost ring (origin or nearest to it) and the outer boundary ring are
excluded, so one-sided stencils never enter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ZeroField
from .fields import Field2D, PolarGrid, Spinor2D
from .transform import lc_forward


def _interior_norm(values: np.ndarray, grid: PolarGrid) -> float:
    r = grid.radii[1:-1, None]
    return float(np.sqrt(np.sum(np.abs(values[1:-1]) ** 2 * r) * grid.dr * grid.dtheta))


def polar_laplacian(f: Field2D) -> np.ndarray:
    """Five-point Laplacian; rows 0 and n_r - 1 are left as NaN."""
    g = f.grid
    v = f.values
    r = g.radii[:, None]
    dr, dt = g.dr, g.dtheta
    out = np.full(v.shape, np.nan, dtype=complex)
    rp = (r[1:-1] + 0.5 * dr)
    rm = (r[1:-1] - 0.5 * dr)
    radial = (rp * (v[2:] - v[1:-1]) - rm * (v[1:-1] - v[:-2])) / (r[1:-1] * dr * dr)
    angular = (np.roll(v, -1, axis=1) - 2 * v + np.roll(v, 1, axis=1))[1:-1] / (r[1:-1] ** 2 * dt * dt)
    out[1:-1] = radial + angular
    return out


def _d_r(v: np.ndarray, g: PolarGrid) -> np.ndarray:
    out = np.full(v.shape, np.nan, dtype=complex)
    out[1:-1] = (v[2:] - v[:-2]) / (2 * g.dr)
    return out


def _d_theta(v: np.ndarray, g: PolarGrid) -> np.ndarray:
    return (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2 * g.dtheta)


def p_minus(f: Field2D) -> np.ndarray:
    """(p1 - i p2) f = -i e^{-i theta} (d_r - (i/r) d_theta) f by central differences."""
    g = f.grid
    r, t = g.mesh()
    with np.errstate(divide="ignore", invalid="ignore"):
        return -1j * np.exp(-1j * t) * (_d_r(f.values, g) - 1j / r * _d_theta(f.values, g))


def p_plus(f: Field2D) -> np.ndarray:
    """(p1 + i p2) f = -i e^{i theta} (d_r + (i/r) d_theta) f by central differences."""
    g = f.grid
    r, t = g.mesh()
    with np.errstate(divide="ignore", invalid="ignore"):
        return -1j * np.exp(1j * t) * (_d_r(f.values, g) + 1j / r * _d_theta(f.values, g))


def _nonzero(*fields: Field2D) -> None:
    if all(not np.any(f.values) for f in fields):
        raise ZeroField("residual of the zero field is undefined")


def _stiffness(m, omega) -> float:
    return (m * omega * omega).real


def kg_operator_residual(g: Field2D, m: float, omega, epsilon: float) -> float:
    """|| -Lap g + (1/2) m omega^2 u^2 (m + eps) g - (eps^2 - m^2) g || / ||g||."""
    _nonzero(g)
    u2 = g.grid.radii[:, None] ** 2
    res = (-polar_laplacian(g)
           + (0.5 * _stiffness(m, omega) * (m + epsilon)) * u2 * g.values
           - (epsilon * epsilon - m * m) * g.values)
    return _interior_norm(res, g.grid) / _interior_norm(g.values, g.grid)


def nr_operator_residual(g: Field2D, m: float, omega: float, epsilon: float) -> float:
    """|| -Lap g / (2m) + (1/2) m omega^2 u^2 g - eps g || / (eps ||g||)."""
    _nonzero(g)
    u2 = g.grid.radii[:, None] ** 2
    res = (-polar_laplacian(g) / (2 * m) + 0.5 * _stiffness(m, omega) * u2 * g.values
           - epsilon * g.values)
    return _interior_norm(res, g.grid) / (abs(epsilon) * _interior_norm(g.values, g.grid))


@dataclass(frozen=True)
class SpinorResidual:
    joint: float
    upper_row: float
    lower_row: float


def dirac_residual_rows(phi: Spinor2D, m: float, omega, epsilon: float) -> SpinorResidual:
    """Rows of (H - eps) Phi for H = [[m + m omega^2 u^2 / 2, p1 - i p2],
    [p1 + i p2, -m]], each relative to ||Phi||."""
    _nonzero(phi.upper, phi.lower)
    g = phi.grid
    u2 = g.radii[:, None] ** 2
    a, b = phi.upper.values, phi.lower.values
    row1 = (m + 0.5 * _stiffness(m, omega) * u2 - epsilon) * a + p_minus(phi.lower)
    row2 = p_plus(phi.upper) - (m + epsilon) * b
    scale = np.hypot(_interior_norm(a, g), _interior_norm(b, g))
    r1 = _interior_norm(row1, g) / scale
    r2 = _interior_norm(row2, g) / scale
    return SpinorResidual(float(np.hypot(r1, r2)), float(r1), float(r2))


def dirac_operator_residual(phi: Spinor2D, m: float, omega, epsilon: float) -> float:
    """Joint relative residual ||(H - eps) Phi|| / ||Phi||."""
    return dirac_residual_rows(phi, m, omega, epsilon).joint


def default_momentum_points(n_r: int = 12, n_theta: int = 24,
                            inner: float = 0.6, outer: float = 2.0) -> np.ndarray:
    """u-plane sample points on an annulus that avoids the origin, shape (N, 2)."""
    r = np.linspace(inner, outer, n_r)
    t = 2 * np.pi * (np.arange(n_theta) + 0.25) / n_theta
    rr, tt = np.meshgrid(r, t, indexing="ij")
    return np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])


def momentum_identity_residual(f: Callable, h: float, points: np.ndarray | None = None) -> float:
    """Relative residual of (p1u - i p2u)(f o LC) = 2 tau [(p1x - i p2x) f] o LC.

    Both sides use central differences of step ``h`` (in u on the left, in x
    on the right); the norm runs over ``points`` (u-plane, shape (N, 2)).
    """
    pts = default_momentum_points() if points is None else np.asarray(points, dtype=float)
    u1, u2 = pts[:, 0], pts[:, 1]

    def pulled(a, b):
        return f(*lc_forward(a, b))

    lhs = -1j * ((pulled(u1 + h, u2) - pulled(u1 - h, u2))
                 - 1j * (pulled(u1, u2 + h) - pulled(u1, u2 - h))) / (2 * h)
    x1, x2 = lc_forward(u1, u2)
    dfx = -1j * ((f(x1 + h, x2) - f(x1 - h, x2)) - 1j * (f(x1, x2 + h) - f(x1, x2 - h))) / (2 * h)
    rhs = 2.0 * (u1 + 1j * u2) * dfx
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def angular_index(f: Field2D, rtol: float = 1e-9) -> tuple[int, float]:
    """Dominant angular harmonic l of ``f`` and the fraction of power it carries.

    Power per harmonic is summed over radii.  Ties (within ``rtol``) go to
    the smallest non-negative l, then the smallest |l|.
    """
    if not np.any(f.values):
        raise ZeroField("angular index of the zero field is undefined")
    n = f.grid.n_theta
    coeffs = np.fft.fft(f.values, axis=1) / n
    power = np.sum(np.abs(coeffs) ** 2, axis=0)
    ls = np.rint(np.fft.fftfreq(n) * n).astype(int)
    total = float(np.sum(power))
    top = float(np.max(power))
    tied = [int(l) for l, p in zip(ls, power) if p >= top * (1 - rtol)]
    best = min(tied, key=lambda l: (l < 0, abs(l)))
    return best, top / total
