"""End-to-end checks that tie the solver, the maps and the transform together.

These are the computations behind the ``map-verify``, ``match`` and
``momentum-check`` subcommands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .eigensolver import (
    GridSpec,
    RadialSolution,
    default_rmax,
    dirac_lower_component,
    solve_extrapolated,
    solve_state,
)
from .levicivita import (
    Chart,
    Field2D,
    PolarGrid,
    Spinor2D,
    angular_index,
    dirac_residual_rows,
    kg_operator_residual,
    momentum_identity_residual,
    nr_operator_residual,
    pullback_scalar,
    pullback_spinor,
    pullback_spinor_regular,
)
from .model import (
    Coulomb,
    EquationKind,
    HydrogenParams,
    Method,
    OscillatorParams,
    QuantumNumbers,
    SpectrumEntry,
    SystemSpec,
    validate_system,
)
from .spectra import (
    MatchReport,
    MatchRule,
    closed_hydrogen_levels,
    closed_level,
    mapped_hydrogen_energy,
    match_levels,
    nr_map_hydrogen_to_oscillator,
    oscillator_images,
    rel_map_hydrogen_to_oscillator,
)

DEFAULT_MAP_GRIDS = (512, 1024, 2048)
DEFAULT_STATE_CELLS = 16384


# --------------------------------------------------------------------------
# hydrogen eigenstates as callables on the x-plane
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HydrogenState:
    spec: SystemSpec
    qn: QuantumNumbers
    solution: RadialSolution
    upper_radial: CubicSpline
    lower_radial: CubicSpline | None = None

    @property
    def energy(self) -> float:
        return self.solution.energy

    def upper(self, x1, x2):
        r = np.hypot(x1, x2)
        return self.upper_radial(r) * np.exp(1j * self.qn.l * np.arctan2(x2, x1))

    def lower(self, x1, x2):
        r = np.hypot(x1, x2)
        return self.lower_radial(r) * np.exp(1j * (self.qn.l + 1) * np.arctan2(x2, x1))


def hydrogen_state(spec: SystemSpec, qn: QuantumNumbers, cells: int = DEFAULT_STATE_CELLS,
                   r_max: float | None = None, seed: int = 0) -> HydrogenState:
    """Numerical Coulomb eigenstate with cubic-spline radial interpolants."""
    validate_system(spec)
    if not isinstance(spec.potential, Coulomb):
        raise ValueError("hydrogen_state needs a Coulomb potential")
    grid = GridSpec(cells, r_max or default_rmax(spec, qn))
    sol = solve_state(spec, qn, grid, seed=seed)
    r = grid.centers
    upper = CubicSpline(r, sol.eigenvector)
    lower = None
    if spec.equation is EquationKind.DIRAC:
        low = dirac_lower_component(sol.eigenvector, qn.l, spec.mass, sol.energy, grid)
        lower = CubicSpline(r, low)
    return HydrogenState(spec, qn, sol, upper, lower)


def oscillator_image(spec: SystemSpec, energy: float) -> OscillatorParams:
    """(m, omega, eps) of the oscillator a hydrogen level maps to.

    Relativistic levels use the formal map, so a negative image mass comes
    back with imaginary omega instead of an error.
    """
    kappa = spec.potential.kappa
    if spec.equation is EquationKind.SCHROEDINGER:
        return nr_map_hydrogen_to_oscillator(spec.mass, energy, kappa)
    return rel_map_hydrogen_to_oscillator(HydrogenParams(spec.mass, energy, kappa), formal=True)


# --------------------------------------------------------------------------
# map-verify
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MapVerifyRow:
    n_r: int
    n_theta: int
    u_max: float
    residual: float
    upper_row: float | None = None
    lower_row: float | None = None


@dataclass
class MapVerifyReport:
    spec: SystemSpec
    qn: QuantumNumbers
    energy: float
    closed_energy: float
    params: OscillatorParams
    solver_cells: int
    solver_rmax: float
    iterations: int
    spinor_map: str | None
    rows: list[MapVerifyRow] = field(default_factory=list)
    angular_before: list[tuple[int, float]] = field(default_factory=list)
    angular_after: list[tuple[int, float]] = field(default_factory=list)
    final_field: Field2D | Spinor2D | None = field(default=None, repr=False)

    @property
    def residuals(self) -> list[float]:
        return [r.residual for r in self.rows]

    @property
    def orders(self) -> list[float]:
        out = []
        for a, b in zip(self.rows, self.rows[1:]):
            out.append(math.log(a.residual / b.residual) / math.log(b.n_r / a.n_r))
        return out

    @property
    def decreasing(self) -> bool:
        res = self.residuals
        return all(b < a for a, b in zip(res, res[1:]))


def _theta_count(n_r: int) -> int:
    return max(16, 2 * (n_r // 8))


def map_verify(spec: SystemSpec, qn: QuantumNumbers, grids=DEFAULT_MAP_GRIDS,
               cells: int = DEFAULT_STATE_CELLS, spinor_map: str = "weighted",
               seed: int = 0) -> MapVerifyReport:
    """Solve the hydrogen state, pull it to the u-plane and evaluate the
    oscillator operator with the mapped (m, omega, eps) on each u-grid.

    ``spinor_map`` (Dirac only): ``"weighted"`` weights the upper component by
    tau / (2 u^2); ``"regular"`` uses (Psi1, 2 conj(tau) Psi2).
    """
    if spinor_map not in ("weighted", "regular"):
        raise ValueError(f"unknown spinor map {spinor_map!r}")
    state = hydrogen_state(spec, qn, cells, seed=seed)
    params = oscillator_image(spec, state.energy)
    grid = state.solution.grid
    u_max = math.sqrt(grid.r_max) * (1 - 1e-12)
    is_dirac = spec.equation is EquationKind.DIRAC
    report = MapVerifyReport(spec, qn, state.energy, closed_level(spec, qn), params,
                             grid.n_cells, grid.r_max, state.solution.iterations,
                             spinor_map if is_dirac else None)

    xgrid = PolarGrid(Chart.X, 256, 64, grid.r_max, r_min=grid.r_max / 256)
    report.angular_before.append(angular_index(Field2D.sample(state.upper, xgrid)))
    if is_dirac:
        report.angular_before.append(angular_index(Field2D.sample(state.lower, xgrid)))

    for n_r in grids:
        n_theta = _theta_count(n_r)
        if is_dirac:
            target = PolarGrid(Chart.U, n_r, n_theta, u_max, r_min=u_max / n_r)
            pull = pullback_spinor if spinor_map == "weighted" else pullback_spinor_regular
            phi = pull((state.upper, state.lower), target)
            rows = dirac_residual_rows(phi, params.m, params.omega, params.epsilon)
            report.rows.append(MapVerifyRow(n_r, n_theta, u_max, rows.joint,
                                            rows.upper_row, rows.lower_row))
            after = [angular_index(phi.upper), angular_index(phi.lower)]
            report.final_field = phi
        else:
            target = PolarGrid(Chart.U, n_r, n_theta, u_max)
            g = pullback_scalar(state.upper, target)
            if spec.equation is EquationKind.SCHROEDINGER:
                res = nr_operator_residual(g, params.m, params.omega, params.epsilon)
            else:
                res = kg_operator_residual(g, params.m, params.omega, params.epsilon)
            report.rows.append(MapVerifyRow(n_r, n_theta, u_max, res))
            after = [angular_index(g)]
            report.final_field = g
        report.angular_after = after
    return report


# --------------------------------------------------------------------------
# match
# --------------------------------------------------------------------------

def hydrogen_labels(depth: int) -> list[QuantumNumbers]:
    """(k, l >= 0) with k + l < depth, i.e. s = 2k + 2l + 1 in {1, 3, .., 2 depth - 1}."""
    return [QuantumNumbers(k, l) for n in range(depth) for l in range(n + 1) for k in [n - l]]


def numeric_hydrogen_levels(equation: EquationKind, mass: float, kappa: float,
                            labels, cells: int = 2048, seed: int = 0) -> list[SpectrumEntry]:
    spec = validate_system(SystemSpec(equation, Coulomb(kappa), mass))
    out = []
    for q in labels:
        grid = GridSpec(cells, default_rmax(spec, q))
        lvl = solve_extrapolated(spec, q, grid, seed=seed)
        info = {"cells": lvl.fine.grid.n_cells, "rmax": grid.r_max,
                "iterations": lvl.iterations, "richardson": True}
        out.append(SpectrumEntry(q, lvl.energy, Method.NUMERIC, lvl.error_estimate, None, info))
    return out


@dataclass
class RuleOutcome:
    rule: MatchRule
    closed: MatchReport
    numeric: MatchReport

    @property
    def supported(self) -> bool:
        """Every paired energy agrees with the numerical oracle."""
        return self.numeric.consistent and (bool(self.numeric.matched)
                                            or not self.numeric.unmatched_hydrogen)


@dataclass
class MatchOutcome:
    equation: EquationKind
    mass: float
    kappa: float
    depth: int
    oscillator: list[SpectrumEntry]
    hydrogen_closed: list[SpectrumEntry]
    hydrogen_numeric: list[SpectrumEntry]
    rules: list[RuleOutcome]

    @property
    def supported_rules(self) -> list[MatchRule]:
        return [r.rule for r in self.rules if r.supported]


def run_match(equation: EquationKind, mass: float, kappa: float, depth: int,
              rules=(MatchRule.EVEN_LO, MatchRule.ODD_N1N2), cells: int = 2048,
              seed: int = 0) -> MatchOutcome:
    """Oscillator shells 0..2 depth - 1 against hydrogen levels with k + l < depth,
    both closed form and numerical, under each matching rule."""
    validate_system(SystemSpec(equation, Coulomb(kappa), mass))
    labels = hydrogen_labels(depth)
    osc = oscillator_images(equation, mass, kappa, 2 * depth - 1) if depth > 0 else []
    closed = closed_hydrogen_levels(equation, mass, kappa, labels)
    numeric = numeric_hydrogen_levels(equation, mass, kappa, labels, cells, seed)
    mapped = mapped_hydrogen_energy(equation)
    outcomes = [RuleOutcome(rule, match_levels(osc, closed, rule, mapped),
                            match_levels(osc, numeric, rule, mapped)) for rule in rules]
    return MatchOutcome(equation, mass, kappa, depth, osc, closed, numeric, outcomes)


# --------------------------------------------------------------------------
# momentum-check
# --------------------------------------------------------------------------

def _x1(x1, x2):
    return x1 + 0j


def _x2(x1, x2):
    return x2 + 0j


def _gaussian(x1, x2):
    return np.exp(-((x1 - 2.0) ** 2 + x2 ** 2)) + 0j


MOMENTUM_FIELDS = {"x1": _x1, "x2": _x2, "gaussian": _gaussian}


@dataclass(frozen=True)
class MomentumCheck:
    name: str
    h: float
    residual: float
    residual_half: float

    @property
    def ratio(self) -> float:
        return self.residual / self.residual_half if self.residual_half > 0 else math.inf


def momentum_check(h: float = 0.02) -> list[MomentumCheck]:
    out = []
    for name, f in MOMENTUM_FIELDS.items():
        out.append(MomentumCheck(name, h, momentum_identity_residual(f, h),
                                 momentum_identity_residual(f, h / 2)))
    return out
