import math

import pytest
from interferometer.amplitudes import (
    PAIR_MODULUS,
    PHOTON1_MODULUS,
    SEGMENT_MODULUS,
    amp_pair,
    amp_photon1,
    amp_segment,
    detection_delay,
    photon1_segments,
    subensemble_of,
)
from interferometer.interferometer_utils import (
    ATOL,
    OUTCOMES,
    PATH_PAIRS,
    SPEED_OF_LIGHT,
    Arm,
    PathPair,
    PhaseSettings,
    SegmentPair,
    Sign,
    Subensemble,
)
from interferometer.kinematics import Geometry, detection_times


def test_pair_amplitude_modulus(grid):
    for phases in grid:
        for subensemble in (Subensemble.LONG, Subensemble.SHORT):
            for path in subensemble.paths:
                for outcome in OUTCOMES:
                    modulus = abs(amp_pair(path, outcome, phases))
                    assert abs(modulus - PAIR_MODULUS) < ATOL, f"{path} {outcome.label} has modulus {modulus}"
    assert PAIR_MODULUS == pytest.approx(1 / (2 * math.sqrt(3)))


def test_pair_weight_per_path():
    phases = PhaseSettings(0.3, -1.2, 2.5)
    for path in Subensemble.LONG.paths:
        weight = sum(abs(amp_pair(path, outcome, phases))**2 for outcome in OUTCOMES)
        # each of the three paths carries a third of the subensemble
        assert weight == pytest.approx(1 / 3, abs=ATOL)


def test_singleton_paths_have_no_pair_amplitude():
    with pytest.raises(ValueError):
        amp_pair(PathPair.from_label("l|LL"), OUTCOMES[0], PhaseSettings())
    with pytest.raises(ValueError):
        amp_segment(SegmentPair.SHORT_SHORT, Sign.PLUS, PhaseSettings())


def test_segment_and_photon1_modulus(grid):
    for phases in grid:
        for segment in (SegmentPair.LONG_SHORT, SegmentPair.SHORT_LONG, SegmentPair.LONG_LONG):
            for omega in Sign:
                assert abs(abs(amp_segment(segment, omega, phases)) - SEGMENT_MODULUS) < ATOL
        for segment in photon1_segments(phases):
            assert abs(abs(segment.value) - PHOTON1_MODULUS) < ATOL
    assert len(photon1_segments(PhaseSettings())) == 4


def test_photon1_amplitude_independent_of_port():
    phases = PhaseSettings(1.0, 0.0, 0.0)
    assert amp_photon1(Arm.LONG, Sign.PLUS, phases) == amp_photon1(Arm.LONG, Sign.MINUS, phases)
    assert amp_photon1(Arm.SHORT, Sign.PLUS, phases) == pytest.approx(PHOTON1_MODULUS)


def test_amplitude_periodicity():
    phases = PhaseSettings(0.4, 1.1, -0.7)
    shifted = PhaseSettings(0.4 + 2 * math.pi, 1.1 - 4 * math.pi, -0.7 + 2 * math.pi)
    for path in Subensemble.LONG.paths + Subensemble.SHORT.paths:
        for outcome in OUTCOMES:
            difference = abs(amp_pair(path, outcome, phases) - amp_pair(path, outcome, shifted))
            assert difference < 1e-10, f"{path} is not 2 pi periodic"


def test_subensemble_partition():
    counts = {subensemble: 0 for subensemble in Subensemble}
    for path in PATH_PAIRS:
        counts[subensemble_of(path)] += 1
    assert list(counts.values()) == [1, 3, 3, 1]


def test_detection_delay_peaks():
    geometry = Geometry()
    L, l = geometry.long_arm, geometry.short_arm
    expected = {
        Subensemble.TWO_LONG: (L - l) / SPEED_OF_LIGHT,
        Subensemble.LONG: 0.0,
        Subensemble.SHORT: (l - L) / SPEED_OF_LIGHT,
        Subensemble.TWO_SHORT: (2 * l - 2 * L) / SPEED_OF_LIGHT,
    }
    for path in PATH_PAIRS:
        assert detection_delay(path, geometry) == pytest.approx(expected[path.subensemble], abs=1e-20)

    # delays agree with the detection times of the kinematics, up to the common subensemble L offset
    reference = PathPair.from_label("L|LL")
    t1, t2 = detection_times(geometry, reference)
    for path in PATH_PAIRS:
        p1, p2 = detection_times(geometry, path)
        assert (p2 - p1) - (t2 - t1) == pytest.approx(detection_delay(path, geometry), abs=1e-18)


def test_detection_delay_degenerate_arms():
    with pytest.raises(ValueError):
        detection_delay(PATH_PAIRS[0], Geometry(long_arm=0.1, short_arm=0.1))
