"""Domain types shared by the spectra, transform and solver modules.

Natural units throughout: hbar = c = 1.
"""
from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field
from typing import Any, Iterator, Union

from .errors import (
    CouplingTooStrong,
    NegativeOmega,
    NonPositiveKappa,
    NonPositiveMass,
)

# Relativistic Coulomb couplings at or above GUARD * mass are rejected.
COUPLING_GUARD = 10.0


class EquationKind(str, enum.Enum):
    SCHROEDINGER = "schroedinger"
    KLEIN_GORDON = "kg"
    DIRAC = "dirac"

    @property
    def relativistic(self) -> bool:
        return self is not EquationKind.SCHROEDINGER


@dataclass(frozen=True)
class Coulomb:
    """Attractive Coulomb potential V(r) = -kappa / r."""

    kappa: float

    name = "coulomb"

    @property
    def coupling(self) -> float:
        return self.kappa


@dataclass(frozen=True)
class Oscillator:
    """Isotropic oscillator of angular frequency omega."""

    omega: float

    name = "oscillator"

    @property
    def coupling(self) -> float:
        return self.omega


PotentialSpec = Union[Coulomb, Oscillator]


@dataclass(frozen=True)
class SystemSpec:
    """Equation, potential and mass: everything a solver call needs.

    ``mass`` is the reduced mass mu for the Schroedinger equation and the rest
    mass (M for hydrogen, m for the oscillator) for KG and Dirac.
    """

    equation: EquationKind
    potential: PotentialSpec
    mass: float

    @property
    def is_coulomb(self) -> bool:
        return isinstance(self.potential, Coulomb)


@dataclass(frozen=True, order=True)
class QuantumNumbers:
    """Polar labels: radial node count k and angular index l."""

    k: int
    l: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"radial index must be non-negative, got {self.k}")

    def oscillator_shell(self) -> int:
        """Total oscillator quanta n1 + n2 = 2k + |l|."""
        return 2 * self.k + abs(self.l)

    def coulomb_s(self) -> int:
        """Odd label s = 2k + 2|l| + 1 entering the 2D Coulomb spectra."""
        return 2 * self.k + 2 * abs(self.l) + 1


@dataclass(frozen=True, order=True)
class CartesianQN:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("Cartesian oscillator quanta must be non-negative")

    @property
    def shell(self) -> int:
        return self.n1 + self.n2


def polar_labels(shell: int, signed: bool = False) -> Iterator[QuantumNumbers]:
    """All (k, l) with 2k + |l| = shell; l >= 0 unless ``signed``."""
    for l in range(shell % 2, shell + 1, 2):
        k = (shell - l) // 2
        yield QuantumNumbers(k, l)
        if signed and l:
            yield QuantumNumbers(k, -l)


def same_oscillator_level(c: CartesianQN, q: QuantumNumbers) -> bool:
    return c.shell == q.oscillator_shell()


@dataclass(frozen=True)
class HydrogenParams:
    """Relativistic hydrogen triple (M, E, kappa)."""

    M: float
    E: float
    kappa: float

    @property
    def bound(self) -> bool:
        return -self.M < self.E < self.M


@dataclass(frozen=True)
class NRHydrogenParams:
    mu: float
    E: float
    kappa: float

    @property
    def bohr_radius(self) -> float:
        return 1.0 / (self.mu * self.kappa)

    @property
    def bound(self) -> bool:
        return self.E < 0


@dataclass(frozen=True)
class OscillatorParams:
    """Oscillator triple (m, omega, epsilon).

    ``omega`` is complex (purely imaginary) only for the formal image of a
    relativistic hydrogen level whose mapped mass is negative; every formula
    in the package depends on omega only through ``stiffness = m omega^2``,
    which stays real and positive in that case.
    """

    m: float
    omega: complex | float
    epsilon: float

    @property
    def stiffness(self) -> float:
        return (self.m * self.omega * self.omega).real

    @property
    def physical(self) -> bool:
        return self.m > 0 and not isinstance(self.omega, complex)

    @classmethod
    def from_stiffness(cls, m: float, stiffness: float, epsilon: float) -> "OscillatorParams":
        w2 = stiffness / m
        omega = w2 ** 0.5 if w2 >= 0 else cmath.sqrt(w2)
        return cls(m, omega, epsilon)


class Method(str, enum.Enum):
    CLOSED = "closed"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class SpectrumEntry:
    """One level. ``residual`` is 0 for closed forms, a diagnostic otherwise."""

    qn: QuantumNumbers | CartesianQN
    energy: float
    method: Method = Method.CLOSED
    residual: float = 0.0
    params: Any = None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.residual >= 0:
            raise ValueError("residual must be non-negative")


def validate_system(spec: SystemSpec) -> SystemSpec:
    """Check physical ranges and return ``spec`` unchanged.

    Raises NonPositiveMass, NonPositiveKappa, NegativeOmega or
    CouplingTooStrong.
    """
    if not spec.mass > 0:
        raise NonPositiveMass(f"mass must be positive, got {spec.mass}")
    pot = spec.potential
    if isinstance(pot, Coulomb):
        if not pot.kappa > 0:
            raise NonPositiveKappa(f"kappa must be positive, got {pot.kappa}")
        if spec.equation.relativistic and pot.kappa >= COUPLING_GUARD * spec.mass:
            raise CouplingTooStrong(
                f"kappa={pot.kappa} exceeds {COUPLING_GUARD:g} * mass")
    elif isinstance(pot, Oscillator):
        if not pot.omega >= 0:
            raise NegativeOmega(f"omega must be non-negative, got {pot.omega}")
    else:
        raise TypeError(f"unknown potential {pot!r}")
    return spec
