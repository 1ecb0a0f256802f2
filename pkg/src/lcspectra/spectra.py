"""Closed-form spectra, the hydrogen <-> oscillator parameter maps, and
parity-based level matching.

Two parameter maps are implemented:

* non-relativistic:  m = 4 mu,  omega = sqrt(-E / 2 mu),  epsilon = kappa
* KG / Dirac:        kappa = (eps - m)/4,  M + E = m + eps,  M - E = m omega^2 / 8

The relativistic oscillator spectrum is the physical real root of
(eps - m)^2 (eps + m) = 2 m omega^2 (n + 1)^2, shared by the KG and Dirac
oscillators.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    EpsilonBelowMass,
    ImaginaryFrequency,
    MassNonPositive,
    NegativeOmega,
    NonNegativeEnergy,
    NonPositiveKappa,
    NonPositiveMass,
    NonPositiveN,
    NonPositiveS,
    UnmatchedHydrogenLevel,
)
from .model import (
    CartesianQN,
    Coulomb,
    EquationKind,
    HydrogenParams,
    Method,
    NRHydrogenParams,
    OscillatorParams,
    QuantumNumbers,
    SpectrumEntry,
    polar_labels,
)

CLOSED_RTOL = 1e-8
NUMERIC_RTOL = 1e-5


class RootSelection(str, enum.Enum):
    PHYSICAL = "physical"
    ALL = "all"


class MatchRule(str, enum.Enum):
    EVEN_LO = "even-lo"
    ODD_N1N2 = "odd-n1n2"


# --------------------------------------------------------------------------
# non-relativistic
# --------------------------------------------------------------------------

def nr_bohr_energy(mu: float, kappa: float, n: float) -> float:
    """Bohr level -kappa / (2 a n^2) with a = 1/(mu kappa); n may be half-integer."""
    if not n > 0:
        raise NonPositiveN(f"principal number must be positive, got {n}")
    if not mu > 0:
        raise NonPositiveMass(f"mu must be positive, got {mu}")
    if kappa < 0:
        raise NonPositiveKappa(f"kappa must be non-negative, got {kappa}")
    # written without the Bohr radius so kappa = 0 is the regular limit
    return -mu * kappa * kappa / (2.0 * n * n)


def nr_oscillator_level(omega: float, qn: CartesianQN | QuantumNumbers | int) -> float:
    """(n1 + n2 + 1) omega for a Cartesian label, polar label or bare shell."""
    if omega < 0:
        raise NegativeOmega(f"omega must be non-negative, got {omega}")
    if isinstance(qn, CartesianQN):
        shell = qn.shell
    elif isinstance(qn, QuantumNumbers):
        shell = qn.oscillator_shell()
    else:
        shell = int(qn)
    return (shell + 1) * omega


def nr_map_hydrogen_to_oscillator(mu: float, E: float, kappa: float) -> OscillatorParams:
    if not mu > 0:
        raise NonPositiveMass(f"mu must be positive, got {mu}")
    if E >= 0:
        raise NonNegativeEnergy(f"E={E} has no bound-state oscillator image")
    return OscillatorParams(m=4.0 * mu, omega=math.sqrt(-E / (2.0 * mu)), epsilon=kappa)


def nr_map_oscillator_to_hydrogen(p: OscillatorParams) -> NRHydrogenParams:
    mu = p.m / 4.0
    return NRHydrogenParams(mu=mu, E=-2.0 * mu * p.omega ** 2, kappa=p.epsilon)


def nr_hydrogen_levels_via_oscillator(mu: float, kappa: float, max_level: int,
                                      rule: MatchRule = MatchRule.EVEN_LO) -> list[SpectrumEntry]:
    """Hydrogen levels obtained by pushing oscillator shells N <= max_level
    through the non-relativistic map.

    For shell N the condition kappa = epsilon = (N + 1) omega fixes omega, and
    the level is E = -2 mu omega^2.  Entries carry hydrogen labels.
    """
    out = []
    for shell in range(max_level + 1):
        omega = kappa / (shell + 1)
        params = OscillatorParams(4.0 * mu, omega, nr_oscillator_level(omega, shell))
        E = nr_map_oscillator_to_hydrogen(params).E
        for q in polar_labels(shell):
            partner = hydrogen_partner(q, rule)
            if partner is not None:
                out.append(SpectrumEntry(partner, E, Method.CLOSED, 0.0, params))
    return out


# --------------------------------------------------------------------------
# relativistic maps
# --------------------------------------------------------------------------

def rel_map_oscillator_to_hydrogen(p: OscillatorParams) -> HydrogenParams:
    if not p.epsilon > p.m:
        raise EpsilonBelowMass(f"epsilon={p.epsilon} <= m={p.m} gives kappa <= 0")
    half_sum = 0.5 * (p.m + p.epsilon)
    shift = p.stiffness / 16.0
    return HydrogenParams(M=half_sum + shift, E=half_sum - shift, kappa=0.25 * (p.epsilon - p.m))


def rel_map_hydrogen_to_oscillator(p: HydrogenParams, formal: bool = False) -> OscillatorParams:
    """Invert the KG/Dirac map.

    With ``formal=True`` a level whose image mass m = (M + E - 4 kappa)/2 is
    negative is still mapped; omega then comes back imaginary while
    m omega^2 = 8 (M - E) stays real. Only m == 0 is refused.
    """
    s = p.M + p.E
    m = 0.5 * (s - 4.0 * p.kappa)
    eps = 0.5 * (s + 4.0 * p.kappa)
    if p.M < p.E:
        raise ImaginaryFrequency(f"M={p.M} < E={p.E}")
    if formal:
        if m == 0:
            raise MassNonPositive("M + E == 4 kappa: oscillator mass vanishes")
        return OscillatorParams.from_stiffness(m, 8.0 * (p.M - p.E), eps)
    if not m > 0:
        raise MassNonPositive(f"M + E = {s} <= 4 kappa = {4 * p.kappa}")
    return OscillatorParams(m=m, omega=math.sqrt(8.0 * (p.M - p.E) / m), epsilon=eps)


# --------------------------------------------------------------------------
# relativistic oscillator cubic
# --------------------------------------------------------------------------

def _excitation_roots(m: float, c: float) -> list[float]:
    """Real roots d of d^2 (d + 2m) = c, descending, Newton-polished."""
    b = 2.0 * m
    p = -b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - c
    disc = 0.25 * q * q + p ** 3 / 27.0
    shift = b / 3.0
    # a double root leaves disc at roundoff level: take the trigonometric form
    if disc <= 8 * np.finfo(float).eps * (0.25 * q * q + abs(p) ** 3 / 27.0):
        amp = 2.0 * math.sqrt(-p / 3.0)
        arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
        phi = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [amp * math.cos(phi - 2.0 * math.pi * k / 3.0) - shift for k in range(3)]
    else:
        sq = math.sqrt(disc)
        roots = [float(np.cbrt(-0.5 * q + sq) + np.cbrt(-0.5 * q - sq)) - shift]
    roots.sort(reverse=True)
    if c == 0:
        return sorted([0.0, 0.0, -b], reverse=True)
    if m > 0:
        top = _polish_physical(roots[0], m, c)
    else:
        top = _polish(_polish(roots[0], m, c), m, c)
    if len(roots) == 3:
        low = _polish(roots[2], m, c)
        # middle root from the product of roots, d1 d2 d3 = c
        out = [top, c / (top * low), low]
        scale = max(1.0, abs(m) ** 3, c)
        # near-degenerate discriminants can admit a spurious pair
        return [out[0]] + [d for d in out[1:] if abs(d * d * (d + b) - c) <= 1e-9 * scale]
    return [top]


def _polish_physical(d: float, m: float, c: float) -> float:
    # Newton on d sqrt(d + 2m) = sqrt(c) for m > 0: increasing and convex
    # for d >= 0, so well conditioned where the cubic has a near-double root.
    d_ = np.longdouble(max(d, 0.0))
    m2 = np.longdouble(2 * m)
    target = np.sqrt(np.longdouble(c))
    for _ in range(30):
        root = np.sqrt(d_ + m2)
        step = (d_ * root - target) / (root + d_ / (2 * root))
        d_ -= step
        if abs(step) <= 4 * np.finfo(np.longdouble).eps * abs(d_):
            break
    return float(d_)


def _polish(d: float, m: float, c: float) -> float:
    d_ = np.longdouble(d)
    m_ = np.longdouble(m)
    slope = d_ * (3 * d_ + 4 * m_)
    f = d_ * d_ * (d_ + 2 * m_) - np.longdouble(c)
    if slope == 0:
        return d
    new = d_ - f / slope
    if abs(new * new * (new + 2 * m_) - np.longdouble(c)) < abs(f):
        return float(new)
    return d


def _cubic_rhs(m: float, stiffness: float, n: int) -> float:
    return 2.0 * stiffness * (n + 1) ** 2


def _check_oscillator(m: float, stiffness: float, n: int) -> None:
    if n < 0:
        raise NonPositiveN(f"oscillator shell must be non-negative, got {n}")
    if m == 0 or (m < 0 and stiffness <= 0):
        raise NonPositiveMass(f"oscillator mass must be positive, got {m}")
    if stiffness < 0:
        raise NegativeOmega("m omega^2 must be non-negative")


def physical_excitation(m: float, omega: complex | float, n: int) -> float:
    """eps - m on the physical branch, computed without cancellation."""
    stiffness = (m * omega * omega).real
    _check_oscillator(m, stiffness, n)
    return _excitation_roots(m, _cubic_rhs(m, stiffness, n))[0]


def rel_oscillator_levels(m: float, omega: complex | float, n: int,
                          sel: RootSelection = RootSelection.PHYSICAL) -> list[float]:
    """Real roots eps of (eps - m)^2 (eps + m) = 2 m omega^2 (n + 1)^2.

    PHYSICAL gives the single root eps >= m (eps = m when omega = 0).
    ALL gives every distinct real root, ascending; when omega = 0 this
    includes eps = -m, the root of the (eps + m) factor of the quartic form.
    A formal (m < 0, imaginary omega) oscillator is accepted as long as
    m omega^2 > 0.
    """
    stiffness = (m * omega * omega).real
    _check_oscillator(m, stiffness, n)
    roots = _excitation_roots(m, _cubic_rhs(m, stiffness, n))
    if sel is RootSelection.PHYSICAL:
        return [m + roots[0]]
    out: list[float] = []
    for d in sorted(roots):
        eps = m + d
        if not out or abs(eps - out[-1]) > 1e-12 * max(1.0, abs(eps)):
            out.append(eps)
    return out


def cubic_residual(eps: float, m: float, omega: complex | float, n: int) -> float:
    """(eps - m)^2 (eps + m) - 2 m omega^2 (n + 1)^2."""
    stiffness = (m * omega * omega).real
    return (eps - m) ** 2 * (eps + m) - _cubic_rhs(m, stiffness, n)


def cubic_residual_scale(m: float, omega: complex | float, n: int) -> float:
    stiffness = (m * omega * omega).real
    return max(1.0, abs(m) ** 3, abs(stiffness) * (n + 1) ** 2)


# --------------------------------------------------------------------------
# relativistic hydrogen
# --------------------------------------------------------------------------

def rel_hydrogen_energy(M: float, kappa: float, s: int, sign: int = +1) -> float:
    """(+-s^2 - kappa^2)/(s^2 + kappa^2) M.  The minus branch is identically -M."""
    if s < 1:
        raise NonPositiveS(f"s must be >= 1, got {s}")
    if not M > 0:
        raise NonPositiveMass(f"M must be positive, got {M}")
    if not kappa > 0:
        raise NonPositiveKappa(f"kappa must be positive, got {kappa}")
    s2 = float(s * s)
    k2 = kappa * kappa
    num = s2 - k2 if sign > 0 else -s2 - k2
    return num / (s2 + k2) * M


def _hydrogen_energy_via_cubic(M: float, kappa: float, n: int) -> float:
    """Solve for E such that the mapped oscillator's physical cubic root
    reproduces the mapped epsilon, i.e. eps - m = 4 kappa."""

    def mismatch(E):
        s = M + E
        m = 0.5 * (s - 4.0 * kappa)
        c = _cubic_rhs(m, 8.0 * (M - E), n)
        if m == 0:
            d = c ** (1.0 / 3.0)
        else:
            d = _excitation_roots(m, c)[0]
        return d - 4.0 * kappa

    lo, hi = -M * (1.0 - 1e-15), M
    return brentq(mismatch, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def rel_hydrogen_levels_via_oscillator(M: float, kappa: float, n_max: int,
                                       rule: MatchRule = MatchRule.EVEN_LO) -> list[SpectrumEntry]:
    """KG/Dirac hydrogen levels read off the oscillator cubic.

    For every admissible shell n <= n_max the hydrogen energy is found by
    root-finding on the condition that the oscillator image of (M, E, kappa)
    sits on its physical cubic root; the closed form with s = n + 1 is used
    only as a cross-check (``info['closed_form']``).
    """
    if not M > 0:
        raise NonPositiveMass(f"M must be positive, got {M}")
    if not kappa > 0:
        raise NonPositiveKappa(f"kappa must be positive, got {kappa}")
    out = []
    for n in range(n_max + 1):
        partners = [hydrogen_partner(q, rule) for q in polar_labels(n)]
        partners = [p for p in partners if p is not None]
        if not partners:
            continue
        E = _hydrogen_energy_via_cubic(M, kappa, n)
        closed = rel_hydrogen_energy(M, kappa, n + 1)
        params = rel_map_hydrogen_to_oscillator(HydrogenParams(M, E, kappa), formal=True)
        res = cubic_residual(params.epsilon, params.m, params.omega, n)
        info = {"closed_form": closed, "cubic_residual": res, "s": n + 1,
                "physical_oscillator": params.physical}
        for p in partners:
            out.append(SpectrumEntry(p, E, Method.CLOSED, 0.0, params, info))
    return out


# --------------------------------------------------------------------------
# matching
# --------------------------------------------------------------------------

def hydrogen_partner(q: QuantumNumbers, rule: MatchRule) -> QuantumNumbers | None:
    """Hydrogen label paired with oscillator label ``q`` under ``rule``.

    EVEN_LO halves the angular index.  ODD_N1N2 keeps odd shells and pairs by
    Bohr number n = (n1 + n2 + 1)/2 = k + |l_h| + 1.
    """
    sign = -1 if q.l < 0 else 1
    if rule is MatchRule.EVEN_LO:
        if q.l % 2:
            return None
        return QuantumNumbers(q.k, q.l // 2)
    if q.oscillator_shell() % 2 == 0:
        return None
    return QuantumNumbers(q.k, sign * ((abs(q.l) - 1) // 2))


@dataclass(frozen=True)
class MatchedPair:
    oscillator: SpectrumEntry
    hydrogen: SpectrumEntry
    mapped_energy: float | None = None
    discrepancy: float | None = None
    tolerance: float | None = None

    @property
    def agrees(self) -> bool:
        return self.discrepancy is None or self.discrepancy <= self.tolerance


@dataclass
class MatchReport:
    filter_rule: MatchRule
    matched: list[MatchedPair] = field(default_factory=list)
    rejected: list[SpectrumEntry] = field(default_factory=list)
    unpaired_oscillator: list[SpectrumEntry] = field(default_factory=list)
    unmatched_hydrogen: list[SpectrumEntry] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        """All pairs agree and every hydrogen level found a partner."""
        return all(p.agrees for p in self.matched) and not self.unmatched_hydrogen

    @property
    def max_discrepancy(self) -> float:
        d = [p.discrepancy for p in self.matched if p.discrepancy is not None]
        return max(d, default=0.0)


def match_levels(osc: Sequence[SpectrumEntry], hyd: Sequence[SpectrumEntry],
                 rule: MatchRule = MatchRule.EVEN_LO,
                 mapped_energy: Callable[[SpectrumEntry], float] | None = None,
                 rtol: float | None = None) -> MatchReport:
    """Pair oscillator levels (k, l_o) with hydrogen levels (k, l_h).

    ``mapped_energy`` turns an oscillator entry into the hydrogen energy it
    predicts; when given, every pair records its relative discrepancy and is
    judged against ``rtol`` (default 1e-8 for closed/closed pairs, 1e-5 if
    either side is numeric).  Under EVEN_LO a hydrogen level with no partner
    raises UnmatchedHydrogenLevel; under ODD_N1N2 it is only listed.
    """
    report = MatchReport(rule)
    if not osc:
        return report
    by_label = {e.qn: e for e in hyd}
    used = set()
    for o in osc:
        partner = hydrogen_partner(o.qn, rule)
        if partner is None:
            report.rejected.append(o)
            continue
        h = by_label.get(partner)
        if h is None:
            report.unpaired_oscillator.append(o)
            continue
        used.add(partner)
        if mapped_energy is None:
            report.matched.append(MatchedPair(o, h))
            continue
        tol = rtol
        if tol is None:
            both_closed = o.method is Method.CLOSED and h.method is Method.CLOSED
            tol = CLOSED_RTOL if both_closed else NUMERIC_RTOL
        E = mapped_energy(o)
        disc = abs(E - h.energy) / max(abs(h.energy), 1e-300)
        report.matched.append(MatchedPair(o, h, E, disc, tol))
    report.unmatched_hydrogen = [h for h in hyd if h.qn not in used]
    if rule is MatchRule.EVEN_LO and report.unmatched_hydrogen:
        missing = ", ".join(f"(k={h.qn.k}, l={h.qn.l})" for h in report.unmatched_hydrogen)
        raise UnmatchedHydrogenLevel(f"no even-l_o oscillator partner for {missing}")
    return report


# --------------------------------------------------------------------------
# oscillator images of a fixed hydrogen system
# --------------------------------------------------------------------------

def oscillator_images(equation: EquationKind, mass: float, kappa: float,
                      max_shell: int) -> list[SpectrumEntry]:
    """Oscillator levels (k, l_o >= 0), shells 0..max_shell, each carrying the
    oscillator parameters tied to the hydrogen system (mass, kappa).

    Non-relativistic: m = 4 mu, omega = kappa/(N+1), eps from the level formula.
    KG/Dirac: (m, omega) come from the hydrogen level found by
    ``rel_hydrogen_levels_via_oscillator`` at s = n + 1; eps is then the
    independently solved physical cubic root.
    """
    out = []
    for n in range(max_shell + 1):
        if equation is EquationKind.SCHROEDINGER:
            omega = kappa / (n + 1)
            eps = nr_oscillator_level(omega, n)
            params = OscillatorParams(4.0 * mass, omega, eps)
            res = 0.0
        else:
            E = _hydrogen_energy_via_cubic(mass, kappa, n)
            image = rel_map_hydrogen_to_oscillator(HydrogenParams(mass, E, kappa), formal=True)
            eps = image.m + physical_excitation(image.m, image.omega, n)
            params = OscillatorParams(image.m, image.omega, eps)
            res = abs(cubic_residual(eps, image.m, image.omega, n))
        for q in polar_labels(n):
            out.append(SpectrumEntry(q, eps, Method.CLOSED, res, params))
    return out


def mapped_hydrogen_energy(equation: EquationKind) -> Callable[[SpectrumEntry], float]:
    if equation is EquationKind.SCHROEDINGER:
        return lambda e: nr_map_oscillator_to_hydrogen(e.params).E
    return lambda e: rel_map_oscillator_to_hydrogen(e.params).E


def closed_hydrogen_levels(equation: EquationKind, mass: float, kappa: float,
                           labels: Iterable[QuantumNumbers]) -> list[SpectrumEntry]:
    out = []
    for q in labels:
        s = q.coulomb_s()
        if equation is EquationKind.SCHROEDINGER:
            E = nr_bohr_energy(mass, kappa, s / 2.0)
        else:
            E = rel_hydrogen_energy(mass, kappa, s)
        out.append(SpectrumEntry(q, E, Method.CLOSED))
    return out


def closed_oscillator_level(equation: EquationKind, mass: float, omega: float,
                            q: QuantumNumbers) -> float:
    n = q.oscillator_shell()
    if equation is EquationKind.SCHROEDINGER:
        return nr_oscillator_level(omega, n)
    return rel_oscillator_levels(mass, omega, n)[0]


def closed_level(spec, q: QuantumNumbers) -> float:
    """Closed-form level for any validated SystemSpec."""
    if isinstance(spec.potential, Coulomb):
        return closed_hydrogen_levels(spec.equation, spec.mass, spec.potential.kappa, [q])[0].energy
    return closed_oscillator_level(spec.equation, spec.mass, spec.potential.omega, q)

