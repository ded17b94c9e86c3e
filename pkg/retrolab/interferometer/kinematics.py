"""
Lab-frame impact bookkeeping and relativistic before / non-before classification.

All positions live on one lab axis, side 1 at negative coordinates and side 2 at positive ones. Delay lines are
pure time offsets. An impact on BS_ik is *before* when, in the inertial frame of BS_ik, it precedes the impact of
the other photon on that photon's first beam splitter:

* BS11 is before iff T11 < T21 in the frame of BS11,
* BS2k is before iff T2k < T11 in the frame of BS2k.

Ties (|dt'| below TIE_TOLERANCE) count as non-before.
"""

import logging
import math
from dataclasses import asdict, dataclass, fields

from interferometer.interferometer_utils import (
    SPEED_OF_LIGHT,
    Arm,
    BeamSplitter,
    ImpactClass,
    ImpactLabel,
    ModelCase,
    PathPair,
    Subensemble,
)

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-18
"""Boosted time differences below this (s) are ties."""
FIBER_DELAY = 4.3e3 / SPEED_OF_LIGHT
"""Delay of a 4.3 km fiber treated as a pure time offset."""


@dataclass
class Geometry:
    """Lengths (m), delays (s), lab positions (m) and velocities (m/s) of the impact series setup."""
    long_arm: float = 0.4
    "Long arm length L."
    short_arm: float = 0.1
    "Short arm length l."
    source_to_bs11: float = 10.0
    "Optical path from the source to BS11."
    source_to_bs21: float = 10.0
    "Optical path from the source to BS21."
    bs21_to_bs22: float = 1.0
    "Optical path from BS21 to BS22, excluding the arm."
    bs11_to_detector: float = 1.0
    "Optical path from BS11 to the D1 detectors, excluding the arm."
    bs22_to_detector: float = 1.0
    "Optical path from BS22 to the D2 detectors, excluding the arm."
    delay_photon1: float = 0.0
    "Delay line on side 1."
    delay_photon2: float = 0.0
    "Delay line on side 2."
    x_bs11: float = -10.0
    "Lab coordinate of BS11."
    x_bs21: float = 10.0
    "Lab coordinate of BS21."
    x_bs22: float = 11.0
    "Lab coordinate of BS22."
    v_bs11: float = 0.0
    "Velocity of BS11 along the lab axis."
    v_bs21: float = 0.0
    "Velocity of BS21 along the lab axis."
    v_bs22: float = 0.0
    "Velocity of BS22 along the lab axis."

    def validate(self):
        """Raise ValueError if the geometry cannot describe the setup."""
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValueError(f"geometry.{f.name} must be finite, got {value}")
        if not self.long_arm > self.short_arm > 0:
            raise ValueError(
                f"degenerate interferometer: need long_arm > short_arm > 0, got L={self.long_arm}, l={self.short_arm}"
            )
        for name in ("source_to_bs11", "source_to_bs21", "bs21_to_bs22", "bs11_to_detector", "bs22_to_detector"):
            if getattr(self, name) < 0:
                raise ValueError(f"geometry.{name} must be >= 0, got {getattr(self, name)}")
        for bs in BeamSplitter:
            if abs(self.velocity(bs)) >= SPEED_OF_LIGHT:
                raise ValueError(f"non-physical frame velocity for {bs.value}: |v| = {abs(self.velocity(bs))} >= c")

    def arm_length(self, arm: Arm) -> float:
        return self.long_arm if arm == Arm.LONG else self.short_arm

    def position(self, beam_splitter: BeamSplitter) -> float:
        return {
            BeamSplitter.BS11: self.x_bs11,
            BeamSplitter.BS21: self.x_bs21,
            BeamSplitter.BS22: self.x_bs22,
        }[beam_splitter]

    def velocity(self, beam_splitter: BeamSplitter) -> float:
        return {
            BeamSplitter.BS11: self.v_bs11,
            BeamSplitter.BS21: self.v_bs21,
            BeamSplitter.BS22: self.v_bs22,
        }[beam_splitter]

    @property
    def is_at_rest(self) -> bool:
        return all(self.velocity(bs) == 0.0 for bs in BeamSplitter)

    @property
    def arm_difference(self) -> float:
        """L - l."""
        return self.long_arm - self.short_arm

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Geometry":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise KeyError(f"geometry.{sorted(unknown)[0]}")
        return cls(**{name: float(value) for name, value in data.items()})


@dataclass(frozen=True)
class ImpactEvent:
    """Arrival of a photon at a beam splitter, in lab coordinates."""
    beam_splitter: BeamSplitter
    t: float
    x: float


def time_ordering_1() -> Geometry:
    """Splitters at rest, photon 1 delayed by 4.3 km of fiber: BS21, BS22 and D2 lie before BS11."""
    return Geometry(delay_photon1=FIBER_DELAY)


def time_ordering_2() -> Geometry:
    """Splitters at rest, photon 2 delayed by 4.3 km of fiber: BS11 and D1 lie before BS21."""
    return Geometry(delay_photon2=FIBER_DELAY)


def all_before() -> Geometry:
    """Splitters 10 km either side of the source, moving apart at 100 km/s: every impact is before in its frame."""
    return Geometry(
        source_to_bs11=1.0e4,
        source_to_bs21=1.0e4,
        x_bs11=-1.0e4,
        x_bs21=1.0e4,
        x_bs22=1.0e4 + 1.0,
        v_bs11=-1.0e5,
        v_bs21=1.0e5,
        v_bs22=1.0e5,
    )


GEOMETRY_PRESETS = {
    "time_ordering_1": time_ordering_1,
    "time_ordering_2": time_ordering_2,
    "all_before": all_before,
}


def impact_times(geometry: Geometry, path: PathPair) -> list[ImpactEvent]:
    """
    Return the BS11, BS21 and BS22 impacts for a path pair, with emission at t = 0.

    Photon 1 reaches BS11 after source_to_bs11 plus its delay line; photon 2 reaches BS21 after source_to_bs21 plus
    its delay line and BS22 after its first arm and bs21_to_bs22 more.
    """
    geometry.validate()
    first_arm, _ = path.photon2.arms
    t_bs11 = geometry.source_to_bs11 / SPEED_OF_LIGHT + geometry.delay_photon1
    t_bs21 = geometry.source_to_bs21 / SPEED_OF_LIGHT + geometry.delay_photon2
    t_bs22 = t_bs21 + (geometry.arm_length(first_arm) + geometry.bs21_to_bs22) / SPEED_OF_LIGHT
    return [
        ImpactEvent(BeamSplitter.BS11, t_bs11, geometry.x_bs11),
        ImpactEvent(BeamSplitter.BS21, t_bs21, geometry.x_bs21),
        ImpactEvent(BeamSplitter.BS22, t_bs22, geometry.x_bs22),
    ]


def detection_times(geometry: Geometry, path: PathPair) -> tuple[float, float]:
    """Return the lab detection times (t1, t2) at D1 and D2 for a path pair."""
    bs11, _, bs22 = impact_times(geometry, path)
    _, second_arm = path.photon2.arms
    t1 = bs11.t + (geometry.arm_length(path.photon1) + geometry.bs11_to_detector) / SPEED_OF_LIGHT
    t2 = bs22.t + (geometry.arm_length(second_arm) + geometry.bs22_to_detector) / SPEED_OF_LIGHT
    return t1, t2


def lorentz_gamma(v: float) -> float:
    """Lorentz factor 1 / sqrt(1 - v^2 / c^2)."""
    if abs(v) >= SPEED_OF_LIGHT:
        raise ValueError(f"non-physical frame velocity: |v| = {abs(v)} >= c")
    return 1.0 / math.sqrt(1.0 - (v / SPEED_OF_LIGHT)**2)


def boost_time(event: ImpactEvent, v: float) -> float:
    """Time of the event in the inertial frame moving with velocity v along the lab axis, t' = gamma (t - v x / c^2)."""
    return lorentz_gamma(v) * (event.t - v * event.x / SPEED_OF_LIGHT**2)


def _impact_label(own: ImpactEvent, other: ImpactEvent, v: float) -> ImpactLabel:
    """Before iff the own impact precedes the other one in the frame moving with v."""
    dt = boost_time(other, v) - boost_time(own, v)
    return ImpactLabel.BEFORE if dt > TIE_TOLERANCE else ImpactLabel.NON_BEFORE


def classify_impacts(geometry: Geometry, path: PathPair) -> tuple[ImpactClass, ImpactClass, ImpactClass]:
    """Classify the (BS11, BS21, BS22) impacts of a path pair, each in the frame of its own splitter."""
    bs11, bs21, bs22 = impact_times(geometry, path)
    return (
        ImpactClass(_impact_label(bs11, bs21, geometry.v_bs11), BeamSplitter.BS11),
        ImpactClass(_impact_label(bs21, bs11, geometry.v_bs21), BeamSplitter.BS21),
        ImpactClass(_impact_label(bs22, bs11, geometry.v_bs22), BeamSplitter.BS22),
    )


def select_model_case(geometry: Geometry) -> ModelCase:
    """
    Select the causal model case for the subensemble L paths of a geometry.

    The three paths must share one classification. (b,b,b) selects the all-before rule and (b,a,b) the
    (b11, a21, b22) rule. With every splitter at rest the causal indistinguishability condition forbids second order
    interference at BS22 whatever the lab ordering, so any at-rest geometry also gets the (b11, a21, b22) rule. Other
    orderings of moving splitters have no probability rule.
    """
    classifications = {path: classify_impacts(geometry, path) for path in Subensemble.LONG.paths}
    observed = set(classifications.values())
    if len(observed) > 1:
        detail = ", ".join(f"{path}: {','.join(map(str, c))}" for path, c in classifications.items())
        raise ValueError(f"mixed ordering across the subensemble L paths: {detail}")
    (classes, ) = observed
    case = ModelCase(classes)
    b, a = ImpactLabel.BEFORE, ImpactLabel.NON_BEFORE
    if case.labels == (b, b, b):
        return case
    if case.labels == (b, b, a):
        raise NotImplementedError(
            f"unsupported case {case}: no probability rule for a non-before BS22 after two before impacts"
        )
    if case.labels != (b, a, b) and not geometry.is_at_rest:
        raise NotImplementedError(f"unsupported case {case}: moving splitters only support (b,b,b) and (b,a,b)")
    selected = ModelCase.causal_indistinguishability(observed=classes)
    logger.debug("Impacts classified as %s, using %s", case, selected)
    return selected
