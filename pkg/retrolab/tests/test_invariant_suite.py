import math

import pytest
from verification.invariant_suite import (
    PHASE_GRID_SEED,
    PROPERTIES,
    check_property,
    phase_grid,
    run_invariant_suite,
)


def test_phase_grid():
    grid = phase_grid(PHASE_GRID_SEED, 10)
    assert len(grid) == 18, "Ten random triples plus eight corners"
    assert grid == phase_grid(PHASE_GRID_SEED, 10), "The grid must be reproducible"
    assert all(0 <= phase < 2 * math.pi for phases in grid for phase in phases())


def test_suite_passes():
    report = run_invariant_suite()
    assert report.passed, f"Failing properties: {[result.name for result in report.failures]}"
    assert len(report.results) == len(PROPERTIES)
    data = report.to_dict()
    assert data["failures"] == []
    assert data["contradiction_at_zero_phases"]["consistent"] is False
    assert data["contradiction_at_zero_phases"]["discrepancy"] == pytest.approx(1 / 3)


@pytest.mark.usefixtures("tampered_pair_table")
def test_tampered_table_fails():
    report = run_invariant_suite(n=20)
    assert not report.passed
    failures = [result.name for result in report.failures]
    assert "qm.oracle_equivalence" in failures
    # the modulus is untouched by a sign flip
    assert "amplitude.pair_modulus" not in failures


def test_property_exception_is_a_failure():
    def broken(grid):
        raise ZeroDivisionError("boom")

    result = check_property("broken", broken, 1e-12, phase_grid(PHASE_GRID_SEED, 2))
    assert not result.passed
    assert result.max_deviation == math.inf
    assert "ZeroDivisionError" in result.detail
