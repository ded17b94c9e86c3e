import pytest
from interferometer import amplitudes
from interferometer.interferometer_utils import Outcome, PathPair, PhaseSettings
from verification.invariant_suite import PHASE_GRID_SEED, phase_grid


@pytest.fixture(scope="session")
def grid() -> list[PhaseSettings]:
    """100 seeded random phase triples plus the {0, pi/2}^3 corners."""
    return phase_grid(PHASE_GRID_SEED, 100)


@pytest.fixture
def discrimination_phases() -> PhaseSettings:
    return PhaseSettings.discrimination_point()


@pytest.fixture
def tampered_pair_table(monkeypatch):
    """Flip the sign of one (L,LL) amplitude table entry for the duration of a test."""
    path = PathPair.from_label("L|LL")
    outcome = Outcome.from_label("+-")
    coefficients, factors = amplitudes._PAIR_TABLE[path]
    monkeypatch.setitem(amplitudes._PAIR_TABLE, path, (coefficients, {**factors, outcome: -factors[outcome]}))
