import pytest

from barrierlab.potentials import CompositePotential, ParabolicShape, PotentialSegment, SechShape

RESONANCE = 0.06115146


@pytest.fixture(scope="session")
def double_parabola():
    """Two touching parabolas, U0 = 0.125 hartree, alpha = 10 bohr, centres at -10 and +10."""
    return CompositePotential.from_barriers([ParabolicShape(10.0, 0.125, -10.0), ParabolicShape(10.0, 0.125, 10.0)])


@pytest.fixture(scope="session")
def mixed_pair():
    """Parabola followed by a compact shifted sech barrier with a free gap between them."""
    return CompositePotential.from_barriers([ParabolicShape(2.0, 0.5, -3.0), SechShape(1.0, 1.0, 0.5, 2.5)])


def landau(u0=1.0, alpha_inv=1.0, gamma=0.0):
    return CompositePotential.from_segments([PotentialSegment((0.0, 0.0), SechShape(alpha_inv, u0, 0.0, gamma))])


# one (number, title, passed, detail) entry per acceptance criterion, reported at the end of the run
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})")
