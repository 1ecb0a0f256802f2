import pytest
from hypothesis import given, strategies as st

from lcspectra.errors import (
    CouplingTooStrong,
    NegativeOmega,
    NonPositiveKappa,
    NonPositiveMass,
    ValidationError,
)
from lcspectra.model import (
    CartesianQN,
    Coulomb,
    EquationKind,
    Method,
    OscillatorParams,
    Oscillator,
    QuantumNumbers,
    SpectrumEntry,
    SystemSpec,
    polar_labels,
    same_oscillator_level,
    validate_system,
)
from lcspectra.spectra import nr_oscillator_level

EQ = EquationKind


def test_equation_kinds_are_exhaustive():
    assert {e.value for e in EQ} == {"schroedinger", "kg", "dirac"}
    assert [e.relativistic for e in EQ] == [False, True, True]


@pytest.mark.parametrize("spec", [
    SystemSpec(EQ.SCHROEDINGER, Coulomb(1.0), 1.0),
    SystemSpec(EQ.DIRAC, Oscillator(0.0), 2.0),
    SystemSpec(EQ.KLEIN_GORDON, Coulomb(9.99), 1.0),
])
def test_valid_specs_pass_unchanged(spec):
    assert validate_system(spec) is spec
    assert validate_system(validate_system(spec)) == spec


@pytest.mark.parametrize("spec, err", [
    (SystemSpec(EQ.KLEIN_GORDON, Coulomb(-0.5), 1.0), NonPositiveKappa),
    (SystemSpec(EQ.SCHROEDINGER, Coulomb(0.0), 1.0), NonPositiveKappa),
    (SystemSpec(EQ.SCHROEDINGER, Coulomb(1.0), 0.0), NonPositiveMass),
    (SystemSpec(EQ.DIRAC, Coulomb(10.0), 1.0), CouplingTooStrong),
    (SystemSpec(EQ.KLEIN_GORDON, Oscillator(-1.0), 1.0), NegativeOmega),
])
def test_invalid_specs(spec, err):
    with pytest.raises(err):
        validate_system(spec)
    assert issubclass(err, ValidationError)


def test_coupling_guard_is_relativistic_only():
    validate_system(SystemSpec(EQ.SCHROEDINGER, Coulomb(50.0), 1.0))


def test_quantum_numbers():
    q = QuantumNumbers(1, -3)
    assert q.oscillator_shell() == 5
    assert q.coulomb_s() == 9
    with pytest.raises(ValueError):
        QuantumNumbers(-1, 0)
    with pytest.raises(ValueError):
        CartesianQN(0, -1)


@pytest.mark.parametrize("shell, expected", [
    (0, [(0, 0)]),
    (3, [(1, 1), (0, 3)]),
    (4, [(2, 0), (1, 2), (0, 4)]),
])
def test_polar_labels(shell, expected):
    assert [(q.k, q.l) for q in polar_labels(shell)] == expected
    signed = list(polar_labels(shell, signed=True))
    assert len(signed) == shell + 1  # 2D oscillator degeneracy


@given(st.integers(0, 30), st.integers(0, 30), st.floats(0, 10))
def test_cartesian_polar_relabeling(n1, n2, omega):
    c = CartesianQN(n1, n2)
    for q in polar_labels(c.shell, signed=True):
        assert same_oscillator_level(c, q)
        assert (q.l - c.shell) % 2 == 0
        assert nr_oscillator_level(omega, q) == nr_oscillator_level(omega, c)


def test_formal_oscillator_params():
    p = OscillatorParams.from_stiffness(-0.2, 3.2, 1.8)
    assert not p.physical
    assert p.omega == pytest.approx(4j)
    assert p.stiffness == pytest.approx(3.2)
    assert OscillatorParams.from_stiffness(1.0, 1.5, 2.0).physical


def test_spectrum_entry_residual_nonnegative():
    SpectrumEntry(QuantumNumbers(0, 0), -0.5)
    with pytest.raises(ValueError):
        SpectrumEntry(QuantumNumbers(0, 0), -0.5, Method.NUMERIC, -1e-9)
