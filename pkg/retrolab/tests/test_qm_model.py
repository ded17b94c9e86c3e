import math

import numpy as np
import pytest
from interferometer.interferometer_utils import ATOL, OUTCOMES, PathPair, PhaseSettings, Subensemble
from models.model_utils import ProbabilityTable, correlation_of, max_abs_difference
from models.qm_model import (
    QuantumModel,
    qm_correlation,
    qm_joint,
    qm_joint_closed_L,
    qm_joint_singleton,
    qm_no_signaling_marginal,
    qm_singles,
)


def test_amplitude_route_matches_closed_form(grid):
    for phases in grid:
        deviation = max_abs_difference(qm_joint(Subensemble.LONG, phases), qm_joint_closed_L(phases))
        assert deviation < ATOL, f"Amplitude route and closed form differ by {deviation} at {phases}"


def test_known_tables():
    table = qm_joint(Subensemble.LONG, PhaseSettings())
    assert table.as_array() == pytest.approx(np.array([1, 1, 9, 1]) / 12, abs=ATOL)

    table = qm_joint(Subensemble.LONG, PhaseSettings.discrimination_point())
    assert table["++"] == pytest.approx(1 / 12, abs=ATOL)
    assert table["+-"] == pytest.approx(5 / 12, abs=ATOL)
    assert table["-+"] == pytest.approx(5 / 12, abs=ATOL)
    assert table["--"] == pytest.approx(1 / 12, abs=ATOL)


def test_normalization_and_correlation(grid):
    for phases in grid:
        for subensemble in (Subensemble.LONG, Subensemble.SHORT):
            table = qm_joint(subensemble, phases)
            assert table.is_normalized(), f"Subensemble {subensemble.value} is not normalized at {phases}"
        e = correlation_of(qm_joint(Subensemble.LONG, phases)).e
        assert abs(e - qm_correlation(phases).e) < ATOL
        assert abs(e) <= 2 / 3 + ATOL


def test_singles(grid):
    for phases in grid:
        for side in (1, 2):
            marginal = qm_joint(Subensemble.LONG, phases).singles(side)
            assert marginal == pytest.approx(qm_singles(side, Subensemble.LONG, phases), abs=ATOL)
        short = qm_joint(Subensemble.SHORT, phases).singles(1)
        assert short[0] == pytest.approx(0.5 + math.cos(phases.alpha + phases.beta) / 3, abs=ATOL)
        assert qm_singles(1, Subensemble.SHORT, phases) == pytest.approx(short, abs=ATOL)


def test_no_signaling(grid):
    # subensemble dependence of the D1 singles cancels over the full ensemble
    for phases in grid:
        assert qm_no_signaling_marginal(phases) == pytest.approx(0.5, abs=ATOL)


def test_sign_symmetry(grid):
    for phases in grid:
        table = qm_joint(Subensemble.LONG, phases)
        shifted = PhaseSettings(phases.alpha + math.pi, phases.beta, phases.gamma)
        flipped = qm_joint(Subensemble.LONG, shifted)
        for outcome in OUTCOMES:
            mirror = type(outcome)(~outcome.sigma, outcome.omega)
            assert table[outcome] == pytest.approx(flipped[mirror], abs=1e-10)


def test_singleton_tables():
    table = qm_joint_singleton(PathPair.from_label("L|ll"))
    assert table == ProbabilityTable.uniform(Subensemble.TWO_SHORT)
    with pytest.raises(ValueError):
        qm_joint_singleton(PathPair.from_label("L|LL"))
    with pytest.raises(ValueError):
        qm_joint(Subensemble.TWO_LONG, PhaseSettings())


def test_quantum_model(discrimination_phases):
    model = QuantumModel()
    assert model.name == "qm"
    assert model(discrimination_phases) == qm_joint(Subensemble.LONG, discrimination_phases)
    assert model.correlation(discrimination_phases).e == pytest.approx(2 / 3, abs=ATOL)
    assert model.joint(Subensemble.TWO_LONG, discrimination_phases).as_array() == pytest.approx([0.25] * 4)
    # ordering does not matter to quantum mechanics
    assert model.describe() == {"model": "qm"}
