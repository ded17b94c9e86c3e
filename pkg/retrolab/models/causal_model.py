"""
Multisimultaneity with the causal indistinguishability condition.

Outcome values are fixed when a photon reaches a beam splitter, and whether the other photon already arrived is
judged in that splitter's own inertial frame. Two cases have a probability rule:

* (b11, b21, b22): every impact is before. Photon 1 shows no interference at BS11, photon 2 segments Ll and lL
  interfere to first order at BS22 and LL does not interfere.
* (b11, a21, b22): the causal indistinguishability condition. A set of paths can interfere to a given order at
  BS2l only if all of them interfered in every preceding same-order interference at BS2k, k < l. (L,LL) and (l,lL)
  interfere to second order at BS11 and BS21, (l,Ll) and (l,lL) to first order at BS22, and no second order
  interference reaches BS22. All three paths contribute with equal weight.

Only the post-selected subensemble L is covered.
"""

import math
from dataclasses import dataclass, field

from interferometer.amplitudes import amp_segment, photon1_segments
from interferometer.interferometer_utils import (
    ATOL,
    Arm,
    BeamSplitter,
    ModelCase,
    ModelRule,
    PathPair,
    PhaseSettings,
    SegmentPair,
    Sign,
    Subensemble,
)
from models.base_model import BaseModel
from models.model_utils import (
    CorrelationCoefficient,
    ProbabilityTable,
    SinglesPair,
    correlation_of,
)
from models.qm_model import qm_singles

Location = tuple[BeamSplitter, ...]

SECOND_ORDER = 2
FIRST_ORDER = 1


@dataclass(frozen=True)
class InterferenceRule:
    """Whether a set of paths interferes to a given order at a location."""
    paths: frozenset[PathPair]
    location: Location
    order: int
    allowed: bool

    def __str__(self) -> str:
        paths = ", ".join(sorted(str(p) for p in self.paths))
        where = " & ".join(bs.value for bs in self.location)
        verb = "interfere" if self.allowed else "do not interfere"
        return f"{{{paths}}} {verb} to order {self.order} at {where}"


@dataclass
class InterferenceRuleSet:
    """Rules obtained by evaluating the causal indistinguishability condition over a universe of paths."""
    rules: list[InterferenceRule] = field(default_factory=list)
    universe: tuple[PathPair, ...] = tuple(Subensemble.LONG.paths)

    def query(self, paths: set[PathPair] | frozenset[PathPair], location: Location, order: int) -> bool:
        """Evaluate the condition for any set of paths, not only the listed rules."""
        return cic_allows(frozenset(paths), location, order, self.universe)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


def _indistinguishability_key(path: PathPair, location: Location, order: int) -> int:
    """
    Path length, in long-arm units, that has to match for paths to be indistinguishable at a location.

    First order at BS2k compares photon 2's arms up to BS2k, first order at BS11 photon 1's arm, and second order at
    (BS11, BS2k) compares the photon 2 arms up to BS2k minus the photon 1 arm.
    """
    photon2_arms = path.photon2.arms
    photon1_long = int(path.photon1 == Arm.LONG)
    side2 = [bs for bs in location if bs.side == 2]
    depth = side2[0].position if side2 else 0
    photon2_long = sum(arm == Arm.LONG for arm in photon2_arms[:depth])
    if order == FIRST_ORDER:
        return photon2_long if side2 else photon1_long
    return photon2_long - photon1_long


def _interference_class(path: PathPair, location: Location, order: int, universe: tuple[PathPair, ...]) -> frozenset:
    key = _indistinguishability_key(path, location, order)
    return frozenset(p for p in universe if _indistinguishability_key(p, location, order) == key)


def _preceding_locations(location: Location, order: int) -> list[Location]:
    """Second order locations at BS11 and BS2k, k < l, for a location involving BS2l. First order has none."""
    side2 = [bs for bs in location if bs.side == 2]
    if not side2 or order == FIRST_ORDER:
        return []
    preceding = [bs for bs in BeamSplitter if bs.side == 2 and bs.position < side2[0].position]
    return [(BeamSplitter.BS11, bs) for bs in preceding]


def cic_allows(paths: frozenset[PathPair], location: Location, order: int, universe: tuple[PathPair, ...]) -> bool:
    """
    Causal indistinguishability condition.

    The paths must form a complete class of at least two mutually indistinguishable paths at the location, and
    every preceding interference of the same order that involves one of them must involve all of them.
    """
    assert order in (FIRST_ORDER, SECOND_ORDER), f"Interference order must be 1 or 2, got {order}"
    if len(paths) < 2 or not paths <= set(universe):
        return False
    first = next(iter(paths))
    if paths != _interference_class(first, location, order, universe):
        return False
    for earlier in _preceding_locations(location, order):
        for path in paths:
            earlier_class = _interference_class(path, earlier, order, universe)
            if cic_allows(earlier_class, earlier, order, universe) and not paths <= earlier_class:
                return False
    return True


def cic_rules() -> InterferenceRuleSet:
    """The three rules for the subensemble L paths, each evaluated through the generic condition."""
    long_long, short_long_short, short_short_long = (PathPair.from_label(p) for p in ("L|LL", "l|Ll", "l|lL"))
    universe = tuple(Subensemble.LONG.paths)
    candidates = [
        (frozenset({long_long, short_short_long}), (BeamSplitter.BS11, BeamSplitter.BS21), SECOND_ORDER),
        (frozenset({short_long_short, short_short_long}), (BeamSplitter.BS22, ), FIRST_ORDER),
        (frozenset({long_long, short_long_short}), (BeamSplitter.BS11, BeamSplitter.BS22), SECOND_ORDER),
    ]
    rules = [
        InterferenceRule(paths, location, order, cic_allows(paths, location, order, universe))
        for paths, location, order in candidates
    ]
    return InterferenceRuleSet(rules, universe)


def causal_joint_bbb(phases: PhaseSettings) -> ProbabilityTable:
    """All-before joint probabilities, 1/4 + omega (1/6) cos(beta - gamma)."""
    c_bg = math.cos(phases.beta - phases.gamma)
    return ProbabilityTable.from_function(lambda s, w: 0.25 + w * c_bg / 6)


def causal_joint_bbb_from_amplitudes(phases: PhaseSettings) -> ProbabilityTable:
    """|A_s(L)|^2 |A_w(LL)|^2 + |A_s(l)|^2 |A_w(Ll) + A_w(lL)|^2 from the first order amplitudes."""
    photon1 = {(segment.arm, segment.sigma): abs(segment.value)**2 for segment in photon1_segments(phases)}

    def joint(s: int, w: int) -> float:
        sigma, omega = Sign(s), Sign(w)
        no_interference = photon1[Arm.LONG, sigma] * abs(amp_segment(SegmentPair.LONG_LONG, omega, phases))**2
        first_order = photon1[Arm.SHORT, sigma] * abs(
            amp_segment(SegmentPair.LONG_SHORT, omega, phases) + amp_segment(SegmentPair.SHORT_LONG, omega, phases)
        )**2
        return no_interference + first_order

    return ProbabilityTable.from_function(joint)


def causal_singles_bbb(side: int, phases: PhaseSettings) -> SinglesPair:
    """Side 2: 1/2 +- (1/3) cos(beta - gamma). Side 1: 1/2 for every phase."""
    assert side in (1, 2), f"Side must be 1 or 2, got {side}"
    if side == 1:
        return 0.5, 0.5
    shift = math.cos(phases.beta - phases.gamma) / 3
    return 0.5 + shift, 0.5 - shift


def causal_path_contributions(phases: PhaseSettings) -> dict[PathPair, ProbabilityTable]:
    """
    Per-path outcome distributions under the (b11, a21, b22) rules.

    The second order BS11-BS21 factor carries sigma and the first order BS22 factor carries omega.
    """
    c_ab = math.cos(phases.alpha + phases.beta)
    c_gb = math.cos(phases.gamma - phases.beta)
    return {
        PathPair.from_label("L|LL"): ProbabilityTable.from_function(lambda s, w: (1 - s * c_ab) / 4),
        PathPair.from_label("l|lL"): ProbabilityTable.from_function(lambda s, w: (1 - s * c_ab) * (1 + w * c_gb) / 4),
        PathPair.from_label("l|Ll"): ProbabilityTable.from_function(lambda s, w: (1 + w * c_gb) / 4),
    }


def causal_joint_from_paths(phases: PhaseSettings) -> ProbabilityTable:
    """Equal weight average of the three per-path contributions."""
    contributions = list(causal_path_contributions(phases).values())
    return ProbabilityTable.from_function(
        lambda s, w: sum(table[_label(s, w)] for table in contributions) / len(contributions)
    )


def causal_joint(phases: PhaseSettings) -> ProbabilityTable:
    """(1/12) [3 - 2 s cos(alpha+beta) + 2 w cos(gamma-beta) - s w cos(alpha+beta) cos(gamma-beta)]."""
    c_ab = math.cos(phases.alpha + phases.beta)
    c_gb = math.cos(phases.gamma - phases.beta)
    return ProbabilityTable.from_function(lambda s, w: (3 - 2 * s * c_ab + 2 * w * c_gb - s * w * c_ab * c_gb) / 12)


def causal_correlation(phases: PhaseSettings) -> CorrelationCoefficient:
    """E = (1/3) cos(alpha + beta) cos(gamma - beta)."""
    return CorrelationCoefficient(math.cos(phases.alpha + phases.beta) * math.cos(phases.gamma - phases.beta) / 3)


def causal_singles(side: int, phases: PhaseSettings) -> SinglesPair:
    """Side 1: 1/2 -+ (1/3) cos(alpha + beta). Side 2: 1/2 +- (1/3) cos(beta - gamma)."""
    assert side in (1, 2), f"Side must be 1 or 2, got {side}"
    if side == 1:
        shift = -math.cos(phases.alpha + phases.beta) / 3
    else:
        shift = math.cos(phases.beta - phases.gamma) / 3
    return 0.5 + shift, 0.5 - shift


@dataclass(frozen=True)
class ContradictionReport:
    """Side 1 singles if BS21 and BS22 were both non-before, against the quantum mechanical ones."""
    consistent: bool
    discrepancy: float
    qm_singles: SinglesPair
    all_before_singles: SinglesPair

    def to_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "discrepancy": self.discrepancy,
            "qm_singles_side1": list(self.qm_singles),
            "before_singles_side1": list(self.all_before_singles),
        }


def verify_nonbefore_contradiction(phases: PhaseSettings) -> ContradictionReport:
    """
    With BS21 and BS22 both non-before the sum-of-amplitudes rule gives the quantum mechanical joint table, whose
    side 1 marginal would then have to equal the before singles of BS11, 1/2. Report how far apart they are,
    (1/3) |cos(alpha + beta)|.
    """
    quantum = qm_singles(1, Subensemble.LONG, phases)
    before = causal_singles_bbb(1, phases)
    discrepancy = max(abs(q - b) for q, b in zip(quantum, before))
    return ContradictionReport(discrepancy < ATOL, discrepancy, quantum, before)


class CausalModel(BaseModel):
    """Multisimultaneity predictions for one model case, (b11, a21, b22) unless told otherwise."""
    name = "causal"

    def __init__(self, case: ModelCase | None = None):
        self.case = case or ModelCase.causal_indistinguishability()
        if self.case.rule == ModelRule.ALL_BEFORE:
            self.name = "bbb"

    def _check(self, subensemble: Subensemble):
        if subensemble != Subensemble.LONG:
            raise NotImplementedError(
                f"causal model predictions for subensemble {subensemble.value}: not specified by paper"
            )
        if not self.case.is_computable:
            raise NotImplementedError(f"unsupported case {self.case}")

    def joint(self, subensemble: Subensemble, phases: PhaseSettings) -> ProbabilityTable:
        self._check(subensemble)
        if self.case.rule == ModelRule.ALL_BEFORE:
            return causal_joint_bbb(phases)
        return causal_joint(phases)

    def correlation(self, phases: PhaseSettings) -> CorrelationCoefficient:
        self._check(Subensemble.LONG)
        if self.case.rule == ModelRule.ALL_BEFORE:
            return correlation_of(causal_joint_bbb(phases))
        return causal_correlation(phases)

    def singles(self, side: int, phases: PhaseSettings) -> SinglesPair:
        self._check(Subensemble.LONG)
        if self.case.rule == ModelRule.ALL_BEFORE:
            return causal_singles_bbb(side, phases)
        return causal_singles(side, phases)

    def describe(self) -> dict:
        return {"model": self.name, "case": self.case.to_dict()}


def _label(s: int, w: int) -> str:
    return Sign(s).symbol + Sign(w).symbol
