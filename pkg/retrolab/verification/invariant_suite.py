"""
Property suite over the analytic layers: amplitude tables, both models and the kinematics.

Every property maps a phase grid to the largest deviation it observes and passes when that stays within its
tolerance. Structural properties report a deviation of 0 or 1. An exception inside a property counts as a failure.
"""

import itertools
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np
from interferometer.amplitudes import (
    PAIR_MODULUS,
    SEGMENT_MODULUS,
    amp_pair,
    amp_photon1,
    amp_segment,
    detection_delay,
)
from interferometer.interferometer_utils import (
    ATOL,
    OUTCOMES,
    PATH_PAIRS,
    SPEED_OF_LIGHT,
    TWO_PI,
    Arm,
    BeamSplitter,
    ImpactLabel,
    ModelRule,
    Outcome,
    PathPair,
    PhaseSettings,
    SegmentPair,
    Sign,
    Subensemble,
)
from interferometer.kinematics import (
    GEOMETRY_PRESETS,
    Geometry,
    ImpactEvent,
    boost_time,
    classify_impacts,
    impact_times,
    lorentz_gamma,
    select_model_case,
)
from models.causal_model import (
    FIRST_ORDER,
    SECOND_ORDER,
    CausalModel,
    causal_correlation,
    causal_joint,
    causal_joint_bbb,
    causal_joint_bbb_from_amplitudes,
    causal_joint_from_paths,
    causal_path_contributions,
    causal_singles,
    causal_singles_bbb,
    cic_rules,
    verify_nonbefore_contradiction,
)
from models.model_utils import ProbabilityTable, correlation_of, max_abs_difference
from models.qm_model import (
    qm_correlation,
    qm_joint,
    qm_joint_closed_L,
    qm_no_signaling_marginal,
    qm_singles,
)

logger = logging.getLogger(__name__)

PHASE_GRID_SEED = 20240601
INTERFERING = (Subensemble.LONG, Subensemble.SHORT)
TABULATED_PATHS = [path for path in PATH_PAIRS if path.subensemble.is_interfering]
TABULATED_SEGMENTS = (SegmentPair.LONG_SHORT, SegmentPair.SHORT_LONG, SegmentPair.LONG_LONG)

Property = Callable[[list[PhaseSettings]], float]


@dataclass
class PropertyResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class SuiteReport:
    results: list[PropertyResult] = field(default_factory=list)
    contradiction: dict = field(default_factory=dict)
    "Contradiction chain at zero phases."
    seed: int = PHASE_GRID_SEED

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> list[PropertyResult]:
        return [result for result in self.results if not result.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "properties": [result.to_dict() for result in self.results],
            "failures": [result.name for result in self.failures],
            "contradiction_at_zero_phases": self.contradiction,
        }


def phase_grid(seed: int = PHASE_GRID_SEED, n: int = 100) -> list[PhaseSettings]:
    """n uniform triples from [0, 2 pi)^3 followed by the eight corners {0, pi/2}^3."""
    rng = np.random.default_rng(seed)
    random_triples = [PhaseSettings(*triple) for triple in rng.uniform(0.0, TWO_PI, size=(n, 3))]
    corners = [PhaseSettings(*triple) for triple in itertools.product((0.0, math.pi / 2), repeat=3)]
    return random_triples + corners


def _swap_sigma(table: ProbabilityTable) -> ProbabilityTable:
    return ProbabilityTable({outcome: table[Outcome(~outcome.sigma, outcome.omega)] for outcome in OUTCOMES})


def _swap_omega(table: ProbabilityTable) -> ProbabilityTable:
    return ProbabilityTable({outcome: table[Outcome(outcome.sigma, ~outcome.omega)] for outcome in OUTCOMES})


def _normalization_deviation(table: ProbabilityTable) -> float:
    values = table.as_array()
    return max(abs(values.sum() - 1.0), float(np.max(-values)), float(np.max(values - 1.0)), 0.0)


def _pairs_deviation(first, second) -> float:
    return max(abs(a - b) for a, b in zip(first, second))


def _structural(condition: bool) -> float:
    return 0.0 if condition else 1.0


# amplitude tables


def pair_modulus(grid: list[PhaseSettings]) -> float:
    return max(
        abs(abs(amp_pair(path, outcome, phases)) - PAIR_MODULUS)
        for phases in grid for path in TABULATED_PATHS for outcome in OUTCOMES
    )


def pair_weight_per_path(grid: list[PhaseSettings]) -> float:
    return max(
        abs(sum(abs(amp_pair(path, outcome, phases))**2 for outcome in OUTCOMES) - 1.0 / 3.0)
        for phases in grid for path in TABULATED_PATHS
    )


def segment_modulus(grid: list[PhaseSettings]) -> float:
    return max(
        abs(abs(amp_segment(segment, omega, phases)) - SEGMENT_MODULUS)
        for phases in grid for segment in TABULATED_SEGMENTS for omega in Sign
    )


def photon1_modulus(grid: list[PhaseSettings]) -> float:
    return max(
        abs(abs(amp_photon1(arm, sigma, phases))**2 - 0.5) for phases in grid for arm in Arm for sigma in Sign
    )


def amplitude_periodicity(grid: list[PhaseSettings]) -> float:
    deviation = 0.0
    for phases in grid:
        for k in range(3):
            shifted = list(phases())
            shifted[k] += TWO_PI
            shifted_phases = PhaseSettings(*shifted)
            for path in TABULATED_PATHS:
                for outcome in OUTCOMES:
                    deviation = max(
                        deviation, abs(amp_pair(path, outcome, phases) - amp_pair(path, outcome, shifted_phases))
                    )
    return deviation


def canonical_invariance(grid: list[PhaseSettings]) -> float:
    deviation = 0.0
    for phases in grid:
        shifted = PhaseSettings(*(phase + 3 * TWO_PI for phase in phases()))
        for subensemble in INTERFERING:
            deviation = max(
                deviation,
                max_abs_difference(qm_joint(subensemble, shifted), qm_joint(subensemble, shifted.canonical())),
            )
    return deviation


def subensemble_partition(grid: list[PhaseSettings]) -> float:
    sizes = tuple(len(subensemble.paths) for subensemble in Subensemble)
    return _structural(sizes == (1, 3, 3, 1) and sum(sizes) == len(PATH_PAIRS))


def detection_delay_peaks(grid: list[PhaseSettings]) -> float:
    geometry = Geometry()
    step = geometry.arm_difference / SPEED_OF_LIGHT
    expected = {
        Subensemble.TWO_LONG: step,
        Subensemble.LONG: 0.0,
        Subensemble.SHORT: -step,
        Subensemble.TWO_SHORT: -2 * step,
    }
    # relative to the peak spacing, absolute delays are ~1e-9 s
    return max(abs(detection_delay(path, geometry) - expected[path.subensemble]) / step for path in PATH_PAIRS)


# quantum mechanical model


def qm_oracle_equivalence(grid: list[PhaseSettings]) -> float:
    return max(max_abs_difference(qm_joint(Subensemble.LONG, phases), qm_joint_closed_L(phases)) for phases in grid)


def qm_normalization(grid: list[PhaseSettings]) -> float:
    return max(
        _normalization_deviation(table) for phases in grid
        for table in (
            qm_joint(Subensemble.LONG, phases), qm_joint(Subensemble.SHORT, phases), qm_joint_closed_L(phases)
        )
    )


def qm_marginals(grid: list[PhaseSettings]) -> float:
    deviation = 0.0
    for phases in grid:
        for subensemble in INTERFERING:
            table = qm_joint(subensemble, phases)
            for side in (1, 2):
                deviation = max(deviation, _pairs_deviation(qm_singles(side, subensemble, phases), table.singles(side)))
    return deviation


def qm_correlation_consistency(grid: list[PhaseSettings]) -> float:
    return max(
        abs(float(qm_correlation(phases)) - float(correlation_of(qm_joint_closed_L(phases)))) for phases in grid
    )


def qm_sign_symmetry(grid: list[PhaseSettings]) -> float:
    deviation = 0.0
    for phases in grid:
        table = qm_joint_closed_L(phases)
        alpha_shifted = qm_joint_closed_L(replace(phases, alpha=phases.alpha + math.pi))
        gamma_shifted = qm_joint_closed_L(replace(phases, gamma=phases.gamma + math.pi))
        deviation = max(
            deviation,
            max_abs_difference(alpha_shifted, _swap_sigma(table)),
            max_abs_difference(gamma_shifted, _swap_omega(table)),
        )
    return deviation


def qm_no_signaling(grid: list[PhaseSettings]) -> float:
    return max(abs(qm_no_signaling_marginal(phases) - 0.5) for phases in grid)


# causal model


def bbb_dual_route(grid: list[PhaseSettings]) -> float:
    return max(
        max_abs_difference(causal_joint_bbb(phases), causal_joint_bbb_from_amplitudes(phases)) for phases in grid
    )


def bbb_side1_singles(grid: list[PhaseSettings]) -> float:
    return max(_pairs_deviation(causal_singles_bbb(1, phases), (0.5, 0.5)) for phases in grid)


def cic_dual_route(grid: list[PhaseSettings]) -> float:
    return max(max_abs_difference(causal_joint(phases), causal_joint_from_paths(phases)) for phases in grid)


def causal_path_normalization(grid: list[PhaseSettings]) -> float:
    return max(
        _normalization_deviation(table) for phases in grid for table in causal_path_contributions(phases).values()
    )


def causal_normalization(grid: list[PhaseSettings]) -> float:
    return max(
        _normalization_deviation(table) for phases in grid
        for table in (causal_joint(phases), causal_joint_bbb(phases))
    )


def causal_correlation_consistency(grid: list[PhaseSettings]) -> float:
    return max(abs(float(causal_correlation(phases)) - float(correlation_of(causal_joint(phases)))) for phases in grid)


def causal_singles_match_qm(grid: list[PhaseSettings]) -> float:
    deviation = 0.0
    for phases in grid:
        table = causal_joint(phases)
        for side in (1, 2):
            singles = causal_singles(side, phases)
            deviation = max(
                deviation,
                _pairs_deviation(singles, qm_singles(side, Subensemble.LONG, phases)),
                _pairs_deviation(singles, table.singles(side)),
            )
    return deviation


def causal_sign_symmetry(grid: list[PhaseSettings]) -> float:
    deviation = 0.0
    for phases in grid:
        table = causal_joint(phases)
        alpha_shifted = causal_joint(replace(phases, alpha=phases.alpha + math.pi))
        gamma_shifted = causal_joint(replace(phases, gamma=phases.gamma + math.pi))
        deviation = max(
            deviation,
            max_abs_difference(alpha_shifted, _swap_sigma(table)),
            max_abs_difference(gamma_shifted, _swap_omega(table)),
        )
    return deviation


def cic_rule_set(grid: list[PhaseSettings]) -> float:
    rules = cic_rules()
    expected = [True, True, False]
    all_long = set(Subensemble.LONG.paths)
    forbidden_at_bs22 = not rules.query(all_long, (BeamSplitter.BS11, BeamSplitter.BS22), SECOND_ORDER)
    first_order_bs22 = rules.query(
        {PathPair.from_label("l|Ll"), PathPair.from_label("l|lL")}, (BeamSplitter.BS22, ), FIRST_ORDER
    )
    return _structural([rule.allowed for rule in rules] == expected and forbidden_at_bs22 and first_order_bs22)


def contradiction_discrepancy(grid: list[PhaseSettings]) -> float:
    deviation = 0.0
    for phases in grid:
        report = verify_nonbefore_contradiction(phases)
        expected = abs(math.cos(phases.alpha + phases.beta)) / 3
        deviation = max(deviation, abs(report.discrepancy - expected))
        if report.consistent != (expected < ATOL):
            return 1.0
    return deviation


def discrimination_point(grid: list[PhaseSettings]) -> float:
    phases = PhaseSettings.discrimination_point()
    divergence = abs(float(causal_correlation(phases)) - float(qm_correlation(phases)))
    return max(
        abs(float(qm_correlation(phases)) - 2.0 / 3.0),
        abs(float(causal_correlation(phases))),
        abs(divergence - 2.0 / 3.0),
    )


# kinematics


def boost_sanity(grid: list[PhaseSettings]) -> float:
    events = [ImpactEvent(BeamSplitter.BS11, t, x) for t in (0.0, 1e-9, 1e-6, 3.3e-5) for x in (-1e4, -1.0, 0.0, 2e3)]
    deviation = max(abs(boost_time(event, 0.0) - event.t) / max(abs(event.t), 1e-30) for event in events)
    for v in (-0.9 * SPEED_OF_LIGHT, -1e5, 1e5, 0.5 * SPEED_OF_LIGHT):
        if lorentz_gamma(v) < 1.0:
            return 1.0
        earlier, later = ImpactEvent(BeamSplitter.BS11, 1e-6, 10.0), ImpactEvent(BeamSplitter.BS11, 2e-6, 10.0)
        if not boost_time(earlier, v) < boost_time(later, v):
            return 1.0
    return deviation


def zero_velocity_reduction(grid: list[PhaseSettings]) -> float:
    for name in ("time_ordering_1", "time_ordering_2"):
        geometry = GEOMETRY_PRESETS[name]()
        for path in PATH_PAIRS:
            bs11, bs21, bs22 = impact_times(geometry, path)
            direct = (bs11.t < bs21.t, bs21.t < bs11.t, bs22.t < bs11.t)
            labels = tuple(c.label == ImpactLabel.BEFORE for c in classify_impacts(geometry, path))
            if direct != labels:
                return 1.0
    return 0.0


def time_translation(grid: list[PhaseSettings]) -> float:
    for name, preset in GEOMETRY_PRESETS.items():
        geometry = preset()
        shifted = replace(
            geometry, delay_photon1=geometry.delay_photon1 + 1e-6, delay_photon2=geometry.delay_photon2 + 1e-6
        )
        for path in PATH_PAIRS:
            if classify_impacts(geometry, path) != classify_impacts(shifted, path):
                return 1.0
    return 0.0


def ordering_insensitivity(grid: list[PhaseSettings]) -> float:
    cases = [select_model_case(GEOMETRY_PRESETS[name]()) for name in ("time_ordering_1", "time_ordering_2")]
    if any(case.rule != ModelRule.CAUSAL_INDISTINGUISHABILITY for case in cases):
        return 1.0
    if select_model_case(GEOMETRY_PRESETS["all_before"]()).rule != ModelRule.ALL_BEFORE:
        return 1.0
    first, second = (CausalModel(case) for case in cases)
    return max(max_abs_difference(first(phases), second(phases)) for phases in grid)


PROPERTIES: list[tuple[str, Property, float]] = [
    ("amplitude.pair_modulus", pair_modulus, ATOL),
    ("amplitude.pair_weight_per_path", pair_weight_per_path, ATOL),
    ("amplitude.segment_modulus", segment_modulus, ATOL),
    ("amplitude.photon1_modulus", photon1_modulus, ATOL),
    ("amplitude.periodicity", amplitude_periodicity, ATOL),
    ("amplitude.canonical_invariance", canonical_invariance, ATOL),
    ("amplitude.subensemble_partition", subensemble_partition, 0.0),
    ("amplitude.detection_delay_peaks", detection_delay_peaks, ATOL),
    ("qm.oracle_equivalence", qm_oracle_equivalence, ATOL),
    ("qm.normalization", qm_normalization, ATOL),
    ("qm.marginals", qm_marginals, ATOL),
    ("qm.correlation", qm_correlation_consistency, ATOL),
    ("qm.sign_symmetry", qm_sign_symmetry, ATOL),
    ("qm.no_signaling", qm_no_signaling, ATOL),
    ("causal.bbb_dual_route", bbb_dual_route, ATOL),
    ("causal.bbb_side1_singles", bbb_side1_singles, ATOL),
    ("causal.cic_dual_route", cic_dual_route, ATOL),
    ("causal.path_normalization", causal_path_normalization, ATOL),
    ("causal.normalization", causal_normalization, ATOL),
    ("causal.correlation", causal_correlation_consistency, ATOL),
    ("causal.singles_match_qm", causal_singles_match_qm, ATOL),
    ("causal.sign_symmetry", causal_sign_symmetry, ATOL),
    ("causal.cic_rules", cic_rule_set, 0.0),
    ("causal.contradiction_discrepancy", contradiction_discrepancy, ATOL),
    ("models.discrimination_point", discrimination_point, ATOL),
    ("kinematics.boost_sanity", boost_sanity, 1e-15),
    ("kinematics.zero_velocity_reduction", zero_velocity_reduction, 0.0),
    ("kinematics.time_translation", time_translation, 0.0),
    ("kinematics.ordering_insensitivity", ordering_insensitivity, ATOL),
]


def check_property(name: str, prop: Property, tolerance: float, grid: list[PhaseSettings]) -> PropertyResult:
    try:
        deviation = float(prop(grid))
    except Exception as e:    # noqa: BLE001
        logger.warning("Property %s raised %s: %s", name, type(e).__name__, e)
        return PropertyResult(name, False, math.inf, tolerance, f"{type(e).__name__}: {e}")
    passed = deviation <= tolerance
    if not passed:
        logger.warning("Property %s failed, max deviation %.3e > %.1e", name, deviation, tolerance)
    return PropertyResult(name, passed, deviation, tolerance)


def run_invariant_suite(seed: int = PHASE_GRID_SEED, n: int = 100) -> SuiteReport:
    """Run every property on the seeded phase grid, plus the contradiction chain at zero phases."""
    grid = phase_grid(seed, n)
    logger.info("Running %d properties on %d phase triples", len(PROPERTIES), len(grid))
    results = [check_property(name, prop, tolerance, grid) for name, prop, tolerance in PROPERTIES]
    contradiction = verify_nonbefore_contradiction(PhaseSettings()).to_dict()
    return SuiteReport(results, contradiction, seed)
