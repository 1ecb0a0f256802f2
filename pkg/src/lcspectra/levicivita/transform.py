"""The Levi-Civita map x1 + i x2 = (u1 + i u2)^2 and wavefunction pullbacks.

Pullbacks accept either a sampled x-plane field (bilinear interpolation in
(r, theta)) or a callable ``f(x1, x2)``, which is evaluated exactly at the
image points and so adds no interpolation error.
"""
from __future__ import annotations

from typing import Callable, Union

import numpy as np

from ..errors import DomainNotCovered, OriginOnGrid
from .fields import Chart, Field2D, PolarGrid, Spinor2D

XSource = Union[Field2D, Callable]


def lc_forward(u1, u2):
    """x1 = u1^2 - u2^2, x2 = 2 u1 u2."""
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    return u1 * u1 - u2 * u2, 2.0 * u1 * u2


def lc_inverse(x1, x2):
    """Principal preimage: tau = sqrt(x1 + i x2) with Re tau > 0, or
    Re tau = 0 and Im tau >= 0.  (-u1, -u2) is the other preimage."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float) + 0.0  # drop signed zeros before the branch cut
    tau = np.sqrt(x1 + 1j * x2)
    return tau.real, tau.imag


def _check_u_target(target: PolarGrid) -> None:
    if target.chart is not Chart.U:
        raise ValueError("pullback target must be a u-plane grid")


def _interp_bilinear(f: Field2D, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    g = f.grid
    fr = (r - g.r_min) / g.dr
    i0 = np.clip(np.floor(fr).astype(int), 0, g.n_r - 2)
    wr = fr - i0
    ft = np.mod(theta, 2 * np.pi) / g.dtheta
    j0 = np.floor(ft).astype(int) % g.n_theta
    wt = ft - np.floor(ft)
    j1 = (j0 + 1) % g.n_theta
    v = f.values
    return ((1 - wr) * ((1 - wt) * v[i0, j0] + wt * v[i0, j1])
            + wr * ((1 - wt) * v[i0 + 1, j0] + wt * v[i0 + 1, j1]))


def _evaluate_on_image(f: XSource, target: PolarGrid) -> np.ndarray:
    _check_u_target(target)
    u, t = target.mesh()
    if isinstance(f, Field2D):
        if f.grid.chart is not Chart.X:
            raise ValueError("pullback source must be an x-plane field")
        tol = 1e-12 * f.grid.r_max
        if target.r_max ** 2 > f.grid.r_max + tol or target.r_min ** 2 < f.grid.r_min - tol:
            raise DomainNotCovered(
                f"u-grid radii [{target.r_min}, {target.r_max}] map to "
                f"[{target.r_min ** 2}, {target.r_max ** 2}], outside source "
                f"[{f.grid.r_min}, {f.grid.r_max}]")
        return _interp_bilinear(f, u * u, 2.0 * t)
    x1, x2 = lc_forward(u * np.cos(t), u * np.sin(t))
    return np.broadcast_to(np.asarray(f(x1, x2), dtype=complex), u.shape)


def pullback_scalar(f: XSource, target: PolarGrid) -> Field2D:
    """g(u) = f(lc_forward(u)) on the u-plane grid ``target``."""
    return Field2D(target, _evaluate_on_image(f, target))


def _tau(target: PolarGrid):
    u, t = target.mesh()
    return u * np.exp(1j * t), u * u


def pullback_spinor(psi: Spinor2D | tuple, target: PolarGrid) -> Spinor2D:
    """Phi = (tau / (2 u^2) Psi1, Psi2) composed with the map, tau = u1 + i u2.

    ``psi`` is an x-plane Spinor2D or a pair of callables.  Needs a grid
    without origin ring, where tau / u^2 is singular.
    """
    if target.has_origin:
        raise OriginOnGrid("spinor pullback needs r_min > 0 on the u-grid")
    upper, lower = _components(psi)
    tau, u2 = _tau(target)
    phi1 = tau / (2.0 * u2) * _evaluate_on_image(upper, target)
    phi2 = _evaluate_on_image(lower, target)
    return Spinor2D(Field2D(target, phi1), Field2D(target, phi2))


def pullback_spinor_regular(psi: Spinor2D | tuple, target: PolarGrid) -> Spinor2D:
    """Phi = (Psi1, 2 conj(tau) Psi2) composed with the map.

    This pairing satisfies the transformed oscillator equation identically:
    (p1u + i p2u) = 2 conj(tau) (p1x + i p2x) as differential operators, so the
    lower row carries over without the extra i Psi1 / conj(tau)^2 that the
    tau / (2 u^2) weighting of the upper component produces.  Upper angular
    index l -> 2l, lower l' -> 2l' - 1.  Regular at the origin.
    """
    upper, lower = _components(psi)
    tau, _ = _tau(target)
    phi1 = _evaluate_on_image(upper, target)
    phi2 = 2.0 * np.conj(tau) * _evaluate_on_image(lower, target)
    return Spinor2D(Field2D(target, phi1), Field2D(target, phi2))


def _components(psi):
    if isinstance(psi, Spinor2D):
        return psi.upper, psi.lower
    upper, lower = psi
    return upper, lower
