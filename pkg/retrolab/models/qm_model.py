"""
Quantum mechanical predictions: joint probabilities are squared moduli of the summed pair amplitudes of the three
indistinguishable path pairs of a subensemble. The predictions hold for every time ordering.
"""

import math

from interferometer.amplitudes import amp_pair
from interferometer.interferometer_utils import (
    OUTCOMES,
    PathPair,
    PhaseSettings,
    Subensemble,
)
from models.base_model import BaseModel
from models.model_utils import (
    CorrelationCoefficient,
    ProbabilityTable,
    SinglesPair,
)

SINGLETON_PATHS = (PathPair.from_label("l|LL"), PathPair.from_label("L|ll"))


def qm_joint(subensemble: Subensemble, phases: PhaseSettings) -> ProbabilityTable:
    """P_{sigma omega} = |sum of A_{sigma omega}(path)|^2 over the three path pairs of subensemble L or l."""
    if not subensemble.is_interfering:
        raise ValueError(f"subensemble {subensemble.value} has a single path pair, use qm_joint_singleton")
    probabilities = {}
    for outcome in OUTCOMES:
        amplitude = sum(amp_pair(path, outcome, phases) for path in subensemble.paths)
        probabilities[outcome] = abs(amplitude)**2
    return ProbabilityTable(probabilities, subensemble)


def qm_joint_closed_L(phases: PhaseSettings) -> ProbabilityTable:
    """Closed form of the subensemble L joint probabilities."""
    alpha, beta, gamma = phases()
    c_ab = math.cos(alpha + beta)
    c_ag = math.cos(alpha + gamma)
    c_gb = math.cos(gamma - beta)
    return ProbabilityTable.from_function(
        # sigma on cos(alpha+beta), sigma*omega on cos(alpha+gamma), omega on cos(gamma-beta)
        lambda s, w: (3 - 2 * s * c_ab - 2 * s * w * c_ag + 2 * w * c_gb) / 12
    )


def qm_joint_singleton(path: PathPair) -> ProbabilityTable:
    """Uniform table for the singleton path pairs (l,LL) and (L,ll), which have no interference partners."""
    if path not in SINGLETON_PATHS:
        raise ValueError(f"{path} is not a singleton path pair, expected one of {[str(p) for p in SINGLETON_PATHS]}")
    return ProbabilityTable.uniform(path.subensemble)


def qm_correlation(phases: PhaseSettings) -> CorrelationCoefficient:
    """E_QM = (2/3) cos(alpha + gamma)."""
    return CorrelationCoefficient(2.0 / 3.0 * math.cos(phases.alpha + phases.gamma))


def qm_singles(side: int, subensemble: Subensemble, phases: PhaseSettings) -> SinglesPair:
    """
    Single probabilities (+, -) at D1 (side 1) or D2 (side 2).

    Side 2 of subensemble l has no closed form here and is taken as the marginal of the amplitude route.
    """
    assert side in (1, 2), f"Side must be 1 or 2, got {side}"
    alpha, beta, gamma = phases()
    if subensemble == Subensemble.LONG:
        if side == 1:
            shift = -math.cos(alpha + beta) / 3
        else:
            shift = math.cos(beta - gamma) / 3
    elif subensemble == Subensemble.SHORT:
        if side == 2:
            return qm_joint(Subensemble.SHORT, phases).singles(2)
        shift = math.cos(alpha + beta) / 3
    else:
        return (0.5, 0.5)
    return 0.5 + shift, 0.5 - shift


def qm_no_signaling_marginal(phases: PhaseSettings) -> float:
    """Probability of a count in D1(+) over the full ensemble of eight equally likely path pairs."""
    weights = {subensemble: len(subensemble.paths) / 8 for subensemble in Subensemble}
    return sum(weight * qm_singles(1, subensemble, phases)[0] for subensemble, weight in weights.items())


class QuantumModel(BaseModel):
    """Superposition principle over indistinguishable path pairs."""
    name = "qm"

    def joint(self, subensemble: Subensemble, phases: PhaseSettings) -> ProbabilityTable:
        if subensemble.is_interfering:
            return qm_joint(subensemble, phases)
        return qm_joint_singleton(subensemble.paths[0])

    def correlation(self, phases: PhaseSettings) -> CorrelationCoefficient:
        return qm_correlation(phases)

    def singles(self, side: int, phases: PhaseSettings) -> tuple[float, float]:
        return qm_singles(side, Subensemble.LONG, phases)
