from abc import abstractmethod

from interferometer.interferometer_utils import PathPair, PhaseSettings, Subensemble
from models.model_utils import (
    CorrelationCoefficient,
    ProbabilityTable,
    SinglesPair,
    correlation_of,
)


class BaseModel:
    """Base class for a prediction model of the impact series experiment."""
    name: str = "base"

    def __call__(self, phases: PhaseSettings) -> ProbabilityTable:
        """Return the joint probabilities of the post-selected subensemble L."""
        return self.joint(Subensemble.LONG, phases)

    @abstractmethod
    def joint(self, subensemble: Subensemble, phases: PhaseSettings) -> ProbabilityTable:
        """Return the joint outcome probabilities for a subensemble."""
        if not subensemble.is_interfering:
            # no interference partners and balanced splitters
            return ProbabilityTable.uniform(subensemble)
        raise NotImplementedError()

    def path_table(self, path: PathPair, phases: PhaseSettings) -> ProbabilityTable:
        """Outcome distribution for pairs travelling a given path. By default the table of its subensemble."""
        return self.joint(path.subensemble, phases)

    def correlation(self, phases: PhaseSettings) -> CorrelationCoefficient:
        return correlation_of(self(phases))

    def singles(self, side: int, phases: PhaseSettings) -> SinglesPair:
        """Single probabilities (+, -) at one side for subensemble L."""
        return self(phases).singles(side)

    def describe(self) -> dict:
        return {"model": self.name}


class UniformModel(BaseModel):
    """Model without any interference. Mostly used for testing purposes."""
    name = "uniform"

    def joint(self, subensemble: Subensemble, phases: PhaseSettings) -> ProbabilityTable:
        return ProbabilityTable.uniform(subensemble)


def model_factory(name: str, geometry=None) -> BaseModel:
    """
    Build a model by name: "qm", "causal" or "bbb". With a geometry, "causal" uses the case selected from its
    impact ordering.
    """
    from interferometer.interferometer_utils import ModelCase
    from interferometer.kinematics import select_model_case
    from models.causal_model import CausalModel
    from models.qm_model import QuantumModel

    if name == "qm":
        return QuantumModel()
    if name == "causal":
        return CausalModel(select_model_case(geometry) if geometry is not None else None)
    if name == "bbb":
        return CausalModel(ModelCase.all_before())
    raise ValueError(f"unknown model {name!r}, expected one of qm, causal, bbb")
