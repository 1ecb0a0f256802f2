"""Radial reduction and finite-volume solution of the 2D bound-state problems.

Every system is brought to the common sector-l form

    -(1/r)(r R')' + (l^2/r^2) R + W(r; E) R = lam R

with (W, lam) depending on the equation:

=============  ==========================  =============
equation       W(r; E)                     lam
=============  ==========================  =============
Schroedinger   2 mu V(r)                   2 mu E
KG, Dirac      (M + E) V(r)                E^2 - M^2
=============  ==========================  =============

For the Dirac equation the lower component is eliminated, leaving the upper
component on exactly the KG radial problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    DegenerateEnergy,
    MaxIterExceeded,
    NegativeDiscriminant,
)
from ..model import Coulomb, EquationKind, Oscillator, PotentialSpec, QuantumNumbers, SystemSpec
from .tridiagonal import solve_linear_spectrum

MIN_CELLS = 16


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell-centred radial grid on [0, r_max]."""

    n_cells: int
    r_max: float

    def __post_init__(self):
        if self.n_cells < MIN_CELLS:
            raise ValueError(f"n_cells must be >= {MIN_CELLS}, got {self.n_cells}")
        if not self.r_max > 0:
            raise ValueError(f"r_max must be positive, got {self.r_max}")

    @property
    def h(self) -> float:
        return self.r_max / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(1, self.n_cells + 1) - 0.5) * self.h

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.h

    def refined(self) -> "GridSpec":
        return GridSpec(2 * self.n_cells, self.r_max)


@dataclass(frozen=True)
class RadialProblem:
    """Sector-l radial eigenproblem with a possibly energy-dependent coupling."""

    l: int
    equation: EquationKind
    potential: PotentialSpec
    mass: float

    @property
    def energy_dependent(self) -> bool:
        return self.equation.relativistic

    @property
    def target(self) -> str:
        return "E^2 - M^2" if self.energy_dependent else "2 mu E"

    def coupling(self, r: np.ndarray, energy: float | None = None) -> np.ndarray:
        """W(r; E) at the radii ``r``; ``energy`` is ignored when not needed."""
        pot = self.potential
        if self.energy_dependent:
            if energy is None:
                raise ValueError("relativistic coupling needs an energy")
            strength = self.mass + energy
        else:
            strength = 2.0 * self.mass
        if isinstance(pot, Coulomb):
            return -strength * pot.kappa / r
        return strength * 0.5 * self.mass * pot.omega ** 2 * r * r

    def energy_from_eigenvalue(self, lam: float) -> float:
        """Schroedinger only: E = lam / (2 mu)."""
        return lam / (2.0 * self.mass)


def radial_reduce(spec: SystemSpec, l: int) -> RadialProblem:
    return RadialProblem(int(l), spec.equation, spec.potential, spec.mass)


def discretize(problem: RadialProblem, grid: GridSpec, energy: float | None = None):
    """Symmetric tridiagonal ``(diag, off)`` for the problem at fixed coupling.

    Cell-centred finite volumes with face weights r_{j} = j h; the r = 0 face
    carries zero flux, the outer face R = 0 through a ghost cell.  The
    generalised problem K R = lam diag(r) R is symmetrised with diag(sqrt r).
    """
    h = grid.h
    r = grid.centers
    faces = grid.faces
    left, right = faces[:-1], faces[1:]
    l2 = float(problem.l * problem.l)
    k_diag = (left + right) / h ** 2 + r * (l2 / (r * r) + problem.coupling(r, energy))
    k_diag[-1] += right[-1] / h ** 2
    k_off = -right[:-1] / h ** 2
    inv_sqrt = 1.0 / np.sqrt(r)
    return k_diag * inv_sqrt * inv_sqrt, k_off * inv_sqrt[:-1] * inv_sqrt[1:]


def _radial_from_symmetric(y: np.ndarray, grid: GridSpec) -> np.ndarray:
    # sum R^2 r h = 1 when ||y|| = 1
    return y / np.sqrt(grid.centers * grid.h)


@dataclass(frozen=True)
class RadialSolution:
    energy: float
    eigenvector: np.ndarray
    iterations: int
    converged: bool
    grid: GridSpec
    l: int = 0
    eigenvalue: float = math.nan
    history: tuple = field(default=(), repr=False)

    @property
    def r(self) -> np.ndarray:
        return self.grid.centers


def solve_linear_state(spec: SystemSpec, qn: QuantumNumbers, grid: GridSpec,
                       seed: int = 0) -> RadialSolution:
    """Schroedinger level (k, l): the (k+1)-th eigenvalue of sector l."""
    problem = radial_reduce(spec, qn.l)
    if problem.energy_dependent:
        raise ValueError("energy-dependent problem: use solve_selfconsistent")
    values, vectors = solve_linear_spectrum(discretize(problem, grid), 1, seed=seed, start=qn.k)
    lam = float(values[0])
    return RadialSolution(problem.energy_from_eigenvalue(lam),
                          _radial_from_symmetric(vectors[:, 0], grid),
                          1, True, grid, qn.l, lam, (problem.energy_from_eigenvalue(lam),))


def initial_energy(spec: SystemSpec, qn: QuantumNumbers) -> float:
    if isinstance(spec.potential, Coulomb):
        return spec.mass
    return spec.mass + (qn.oscillator_shell() + 1) * spec.potential.omega


def solve_selfconsistent(spec: SystemSpec, qn: QuantumNumbers, grid: GridSpec,
                         tol: float = 1e-12, max_iter: int = 200, relax: float = 0.5,
                         update: str = "ratio", seed: int = 0,
                         energy0: float | None = None) -> RadialSolution:
    """Relativistic level (k, l) by damped fixed-point iteration on E.

    Each sweep assembles W(r; E_t), takes the (k+1)-th eigenvalue lam_t of
    sector l and forms a raw update on the positive-energy branch:

    * ``update="ratio"`` (default): E_raw = M + lam_t / (M + E_t)
    * ``update="sqrt"``:            E_raw = sqrt(M^2 + lam_t)

    Both have the fixed points of E^2 - M^2 = lam(E).  For Coulomb the ratio
    map is affine in E with slope -kappa^2/s^2, so at relax = 0.5 it
    contracts whenever kappa^2 < 3 s^2; the square-root map is steep near
    E = 0 and raises NegativeDiscriminant when M^2 + lam_t < 0.
    Then E_{t+1} = (1 - relax) E_t + relax E_raw until
    |E_{t+1} - E_t| <= tol * M.
    """
    if update not in ("ratio", "sqrt"):
        raise ValueError(f"unknown update {update!r}")
    problem = radial_reduce(spec, qn.l)
    if not problem.energy_dependent:
        raise ValueError("linear problem: use solve_linear_state")
    M = spec.mass
    E = initial_energy(spec, qn) if energy0 is None else energy0
    history = [E]
    vector = None
    lam = math.nan
    for it in range(1, max_iter + 1):
        values, vectors = solve_linear_spectrum(discretize(problem, grid, E), 1,
                                                seed=seed, start=qn.k)
        lam = float(values[0])
        vector = vectors[:, 0]
        if update == "sqrt":
            disc = M * M + lam
            if disc < 0:
                raise NegativeDiscriminant(
                    f"M^2 + lam = {disc:.6g} < 0 at iteration {it} (E_t = {E:.12g})")
            raw = math.sqrt(disc)
        else:
            if M + E <= 0:
                raise DegenerateEnergy(f"M + E = {M + E:.6g} <= 0 at iteration {it}")
            raw = M + lam / (M + E)
        new = (1.0 - relax) * E + relax * raw
        history.append(new)
        done = abs(new - E) <= tol * M
        E = new
        if done:
            return RadialSolution(E, _radial_from_symmetric(vector, grid), it, True,
                                  grid, qn.l, lam, tuple(history))
    raise MaxIterExceeded(
        f"no convergence in {max_iter} iterations; last |dE| = {abs(history[-1] - history[-2]):.3e}")


def solve_state(spec: SystemSpec, qn: QuantumNumbers, grid: GridSpec, **opts) -> RadialSolution:
    if spec.equation.relativistic:
        return solve_selfconsistent(spec, qn, grid, **opts)
    return solve_linear_state(spec, qn, grid, seed=opts.get("seed", 0))


def richardson(E_h: float, E_h2: float) -> float:
    """Remove the h^2 error term from solves at steps h and h/2."""
    return (4.0 * E_h2 - E_h) / 3.0


@dataclass(frozen=True)
class ExtrapolatedLevel:
    energy: float
    coarse: RadialSolution
    fine: RadialSolution

    @property
    def error_estimate(self) -> float:
        """|extrapolated - fine|, the discretisation error left in the fine solve."""
        return abs(self.energy - self.fine.energy)

    @property
    def iterations(self) -> int:
        return max(self.coarse.iterations, self.fine.iterations)


def solve_extrapolated(spec: SystemSpec, qn: QuantumNumbers, grid: GridSpec, **opts) -> ExtrapolatedLevel:
    """Solve on ``grid`` and its refinement, then Richardson-extrapolate."""
    coarse = solve_state(spec, qn, grid, **opts)
    if spec.equation.relativistic:
        opts = dict(opts, energy0=coarse.energy)
    fine = solve_state(spec, qn, grid.refined(), **opts)
    return ExtrapolatedLevel(richardson(coarse.energy, fine.energy), coarse, fine)


def default_rmax(spec: SystemSpec, qn: QuantumNumbers, energy_estimate: float | None = None) -> float:
    """Outer wall far enough out that the bound state's tail is negligible.

    Coulomb: 40 / decay constant at the estimated energy.  Oscillator:
    max(10, sqrt(2 (n+1)) + 8) Gaussian widths of the actual radial operator.
    """
    from ..spectra import closed_level  # local: spectra does not import the solver

    E = closed_level(spec, qn) if energy_estimate is None else energy_estimate
    pot = spec.potential
    if isinstance(pot, Coulomb):
        if spec.equation.relativistic:
            decay = math.sqrt(max(spec.mass ** 2 - E * E, 1e-300))
        else:
            decay = math.sqrt(max(-2.0 * spec.mass * E, 1e-300))
        return 40.0 / decay
    assert isinstance(pot, Oscillator)
    if spec.equation.relativistic:
        width2 = math.sqrt(0.5 * (spec.mass + E) * spec.mass) * pot.omega
    else:
        width2 = spec.mass * pot.omega
    n = qn.oscillator_shell()
    return max(10.0, math.sqrt(2.0 * (n + 1)) + 8.0) / math.sqrt(width2)


def dirac_lower_component(upper: np.ndarray, l: int, M: float, E: float, grid: GridSpec) -> np.ndarray:
    """Radial part of Psi2 = (p1 + i p2) Psi1 / (M + E).

    For Psi1 = R(r) e^{i l theta}, (p1 + i p2) Psi1 = -i (R' - l R / r) e^{i(l+1) theta};
    R' by second-order central differences (one-sided at the ends).
    """
    if abs(M + E) <= 1e-14 * max(abs(M), 1.0):
        raise DegenerateEnergy(f"M + E = {M + E:.3e} is zero")
    r = grid.centers
    upper = np.asarray(upper)
    dR = np.gradient(upper, grid.h, edge_order=2)
    return -1j * (dR - l * upper / r) / (M + E)
