import pytest

from lcspectra.model import Coulomb, EquationKind, Oscillator, SystemSpec

EQ = EquationKind


@pytest.fixture
def kg_hydrogen():
    return SystemSpec(EQ.KLEIN_GORDON, Coulomb(0.5), 1.0)


@pytest.fixture
def worked_chain_hydrogen():
    """KG hydrogen whose ground level maps to the oscillator m=1, omega^2=1.5, eps=2."""
    return SystemSpec(EQ.KLEIN_GORDON, Coulomb(0.25), 1.59375)


@pytest.fixture
def kg_oscillator():
    return SystemSpec(EQ.KLEIN_GORDON, Oscillator(1.5 ** 0.5), 1.0)


# -- acceptance verdict lines ------------------------------------------------------

_VERDICTS: dict[str, str] = {}


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion; returns ``ok``."""

    def record(key: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}"
        _VERDICTS[key] = line
        print(line)
        return ok
    return record


def _order(key: str):
    head = key.split()[0]
    return (int(head) if head.isdigit() else 99, key)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_VERDICTS, key=_order):
            terminalreporter.write_line(_VERDICTS[key])
