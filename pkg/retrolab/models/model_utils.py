from dataclasses import dataclass

import numpy as np
from interferometer.interferometer_utils import ATOL, OUTCOMES, Outcome, Sign, Subensemble

# single probabilities ordered as (+, -)
SinglesPair = tuple[float, float]


@dataclass(frozen=True)
class ProbabilityTable:
    """Joint probabilities of the four outcomes for one subensemble."""
    p: dict[Outcome, float]
    subensemble: Subensemble = Subensemble.LONG

    def __getitem__(self, outcome: Outcome | str) -> float:
        if isinstance(outcome, str):
            outcome = Outcome.from_label(outcome)
        return self.p[outcome]

    def as_array(self) -> np.ndarray:
        """Probabilities in (++, +-, -+, --) order."""
        return np.array([self.p[outcome] for outcome in OUTCOMES])

    def total(self) -> float:
        return float(sum(self.p.values()))

    def is_normalized(self, atol: float = ATOL) -> bool:
        values = self.as_array()
        return bool(np.all(values >= -atol) and np.all(values <= 1 + atol) and abs(values.sum() - 1.0) < atol)

    def correlation(self) -> "CorrelationCoefficient":
        return correlation_of(self)

    def singles(self, side: int) -> SinglesPair:
        """Marginal probabilities (+, -) at D1 (side 1) or D2 (side 2)."""
        assert side in (1, 2), f"Side must be 1 or 2, got {side}"
        if side == 1:
            return tuple(sum(self.p[Outcome(s, w)] for w in Sign) for s in Sign)    # type: ignore
        return tuple(sum(self.p[Outcome(s, w)] for s in Sign) for w in Sign)    # type: ignore

    def to_dict(self) -> dict:
        return {outcome.label: self.p[outcome] for outcome in OUTCOMES}

    @classmethod
    def from_dict(cls, data: dict, subensemble: Subensemble = Subensemble.LONG) -> "ProbabilityTable":
        return cls({Outcome.from_label(label): float(value) for label, value in data.items()}, subensemble)

    @classmethod
    def from_function(cls, fn, subensemble: Subensemble = Subensemble.LONG) -> "ProbabilityTable":
        """Tabulate fn(sigma, omega) with sigma, omega in {+1, -1}."""
        return cls({outcome: float(fn(int(outcome.sigma), int(outcome.omega))) for outcome in OUTCOMES}, subensemble)

    @classmethod
    def uniform(cls, subensemble: Subensemble) -> "ProbabilityTable":
        return cls({outcome: 0.25 for outcome in OUTCOMES}, subensemble)


@dataclass(frozen=True)
class CorrelationCoefficient:
    """E = sum over outcomes of (-sigma omega) P_{sigma omega}."""
    e: float

    def __float__(self) -> float:
        return self.e


def correlation_of(table: ProbabilityTable) -> CorrelationCoefficient:
    return CorrelationCoefficient(float(sum(-outcome.parity * table.p[outcome] for outcome in OUTCOMES)))


def max_abs_difference(first: ProbabilityTable, second: ProbabilityTable) -> float:
    """Largest entrywise deviation between two tables."""
    return float(np.max(np.abs(first.as_array() - second.as_array())))
