"""
Probability amplitude tables of the impact series interferometer.

Pair amplitudes for the subensembles L and l are normalized to the three path pairs of their own subensemble, so
every tabulated value has modulus 1 / (2 sqrt 3). Photon 2 segment amplitudes are normalized as if the experiment
ran with only the three subensemble L paths, modulus 1 / sqrt 6. Each entry is a fixed factor times a phase
e^{i (a alpha + b beta + c gamma)} stored as the integer triple (a, b, c).
"""

import cmath
import math

from interferometer.interferometer_utils import (
    SPEED_OF_LIGHT,
    Arm,
    ComplexAmplitude,
    Outcome,
    PathPair,
    PhaseSettings,
    Photon1SegmentAmplitude,
    SegmentPair,
    Sign,
    Subensemble,
)
from interferometer.kinematics import Geometry

PAIR_MODULUS = 1.0 / (2.0 * math.sqrt(3.0))
SEGMENT_MODULUS = 1.0 / math.sqrt(6.0)
PHOTON1_MODULUS = 1.0 / math.sqrt(2.0)

_PP, _PM, _MP, _MM = Outcome.all()

# path pair -> (phase coefficients on (alpha, beta, gamma), factor per outcome)
_PAIR_TABLE: dict[PathPair, tuple[tuple[int, int, int], dict[Outcome, complex]]] = {
    # subensemble L
    PathPair.from_label("l|Ll"): ((0, 1, 0), {_PP: -1, _PM: -1j, _MP: -1j, _MM: 1}),
    PathPair.from_label("l|lL"): ((0, 0, 1), {_PP: -1, _PM: 1j, _MP: -1j, _MM: -1}),
    PathPair.from_label("L|LL"): ((1, 1, 1), {_PP: 1, _PM: -1j, _MP: -1j, _MM: -1}),
    # subensemble l
    PathPair.from_label("l|ll"): ((0, 0, 0), {_PP: 1, _PM: 1j, _MP: 1j, _MM: -1}),
    PathPair.from_label("L|lL"): ((1, 0, 1), {_PP: 1, _PM: -1j, _MP: -1j, _MM: -1}),
    PathPair.from_label("L|Ll"): ((1, 1, 0), {_PP: 1, _PM: 1j, _MP: -1j, _MM: 1}),
}

_SEGMENT_TABLE: dict[SegmentPair, tuple[tuple[int, int, int], dict[Sign, complex]]] = {
    SegmentPair.LONG_SHORT: ((0, 1, 0), {Sign.PLUS: -1, Sign.MINUS: -1j}),
    SegmentPair.SHORT_LONG: ((0, 0, 1), {Sign.PLUS: -1, Sign.MINUS: 1j}),
    SegmentPair.LONG_LONG: ((0, 1, 1), {Sign.PLUS: -1, Sign.MINUS: 1j}),
}


def _phase_factor(coefficients: tuple[int, int, int], phases: PhaseSettings) -> complex:
    return cmath.exp(1j * sum(c * phase for c, phase in zip(coefficients, phases())))


def subensemble_of(path: PathPair) -> Subensemble:
    """Return the subensemble of a path pair."""
    return path.subensemble


def amp_pair(path: PathPair, outcome: Outcome, phases: PhaseSettings) -> ComplexAmplitude:
    """Return A_{sigma omega}(path) for a path pair of subensemble L or l."""
    if path not in _PAIR_TABLE:
        raise ValueError(f"no tabulated pair amplitude for {path} in subensemble {path.subensemble.value}")
    coefficients, factors = _PAIR_TABLE[path]
    return PAIR_MODULUS * factors[outcome] * _phase_factor(coefficients, phases)


def amp_segment(segment: SegmentPair, omega: Sign, phases: PhaseSettings) -> ComplexAmplitude:
    """Return the first order amplitude A_omega(segment) of photon 2 for the segments Ll, lL and LL."""
    if segment not in _SEGMENT_TABLE:
        raise ValueError(f"segment {segment.value} not tabulated for subensemble L")
    coefficients, factors = _SEGMENT_TABLE[segment]
    return SEGMENT_MODULUS * factors[omega] * _phase_factor(coefficients, phases)


def amp_photon1(arm: Arm, sigma: Sign, phases: PhaseSettings) -> ComplexAmplitude:
    """
    Return the first order amplitude A_sigma(arm) of photon 1.

    Only the modulus 1 / sqrt 2 enters any probability; the phase convention is e^{i alpha} on the long arm and 1 on
    the short arm, independent of sigma.
    """
    if arm == Arm.LONG:
        return PHOTON1_MODULUS * cmath.exp(1j * phases.alpha)
    return complex(PHOTON1_MODULUS)


def photon1_segments(phases: PhaseSettings) -> list[Photon1SegmentAmplitude]:
    """Return the four photon 1 segment amplitudes, arms (L, l) times ports (+, -)."""
    return [
        Photon1SegmentAmplitude(arm, sigma, amp_photon1(arm, sigma, phases))
        for arm in (Arm.LONG, Arm.SHORT)
        for sigma in Sign
    ]


def detection_delay(path: PathPair, geometry: Geometry) -> float:
    """
    Return the detection time difference t2 - t1 of a path pair relative to the subensemble L peak.

    Subensemble L sits at 0, subensemble l at (l - L) / c, (l,LL) at (L - l) / c and (L,ll) at (2l - 2L) / c.
    """
    if not geometry.long_arm > geometry.short_arm > 0:
        raise ValueError(
            "degenerate interferometer: need long_arm > short_arm > 0, "
            f"got L={geometry.long_arm}, l={geometry.short_arm}"
        )
    photon2_length = sum(geometry.arm_length(arm) for arm in path.photon2.arms)
    photon1_length = geometry.arm_length(path.photon1)
    return (photon2_length - photon1_length - geometry.long_arm) / SPEED_OF_LIGHT
