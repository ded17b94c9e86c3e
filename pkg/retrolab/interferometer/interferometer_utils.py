import math
from dataclasses import dataclass
from enum import Enum, IntEnum

SPEED_OF_LIGHT = 299_792_458.0
"""Speed of light in vacuum, m/s (exact)."""
ATOL = 1e-12
"""Absolute tolerance used for every analytic identity in the package."""
TWO_PI = 2.0 * math.pi

# Amplitudes are plain Python complex numbers
ComplexAmplitude = complex


class Sign(IntEnum):
    """Detector port sign, + or -."""
    PLUS = 1
    MINUS = -1

    def __invert__(self) -> "Sign":
        """Return the opposite port."""
        return Sign.MINUS if self == Sign.PLUS else Sign.PLUS

    @property
    def symbol(self) -> str:
        return "+" if self == Sign.PLUS else "-"

    @classmethod
    def from_symbol(cls, symbol: str) -> "Sign":
        assert symbol in ("+", "-"), f"Sign symbol must be '+' or '-', got {symbol!r}"
        return cls.PLUS if symbol == "+" else cls.MINUS


class Arm(str, Enum):
    """Interferometer arm: the short arm of length l or the long arm of length L."""
    SHORT = "l"
    LONG = "L"


class SegmentPair(str, Enum):
    """Ordered arm pair travelled by photon 2 through BS21 and BS22."""
    SHORT_SHORT = "ll"
    SHORT_LONG = "lL"
    LONG_SHORT = "Ll"
    LONG_LONG = "LL"

    @property
    def arms(self) -> tuple[Arm, Arm]:
        """Return the (first, second) arm."""
        return Arm(self.value[0]), Arm(self.value[1])

    @classmethod
    def from_arms(cls, first: Arm, second: Arm) -> "SegmentPair":
        return cls(first.value + second.value)


class Subensemble(str, Enum):
    """Subensembles of path pairs, labelled by the path difference between the two photons."""
    TWO_LONG = "2L-l"
    LONG = "L"
    SHORT = "l"
    TWO_SHORT = "2l-L"

    @property
    def paths(self) -> list["PathPair"]:
        """Return the path pairs of the subensemble, in path table order."""
        return [path for path in PathPair.all() if path.subensemble == self]

    @property
    def is_interfering(self) -> bool:
        """Only the subensembles with three indistinguishable path pairs interfere."""
        return self in (Subensemble.LONG, Subensemble.SHORT)


class BeamSplitter(str, Enum):
    """Beam splitters of the impact series: BS11 on side 1, BS21 and BS22 on side 2."""
    BS11 = "BS11"
    BS21 = "BS21"
    BS22 = "BS22"

    @property
    def side(self) -> int:
        return int(self.value[2])

    @property
    def position(self) -> int:
        """Position of the splitter in its series, k in BS_ik."""
        return int(self.value[3])


class ImpactLabel(str, Enum):
    """Relativistic label of an impact, judged in the splitter's own inertial frame."""
    BEFORE = "b"
    NON_BEFORE = "a"


class ModelRule(str, Enum):
    """Probability rule attached to a model case."""
    ALL_BEFORE = "all_before"
    CAUSAL_INDISTINGUISHABILITY = "cic"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class PhaseSettings:
    """The three adjustable phases alpha, beta, gamma (radians) of the BS11, BS21 and BS22 arms."""
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"Phase {name} must be a finite real number, got {value}")

    def __call__(self) -> tuple[float, float, float]:
        """Return the (alpha, beta, gamma) triple."""
        return self.alpha, self.beta, self.gamma

    def canonical(self) -> "PhaseSettings":
        """Reduce every phase modulo 2 pi into [0, 2 pi)."""
        return PhaseSettings(*(phase % TWO_PI for phase in self()))

    @classmethod
    def from_degrees(cls, alpha: float, beta: float, gamma: float) -> "PhaseSettings":
        return cls(math.radians(alpha), math.radians(beta), math.radians(gamma))

    @classmethod
    def discrimination_point(cls) -> "PhaseSettings":
        """alpha = 45, beta = 45, gamma = -45 degrees: alpha+gamma = 0, alpha+beta = beta-gamma = pi/2."""
        return cls.from_degrees(45.0, 45.0, -45.0)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}

    @classmethod
    def from_dict(cls, data: dict, degrees: bool = False) -> "PhaseSettings":
        values = (float(data.get(name, 0.0)) for name in ("alpha", "beta", "gamma"))
        return cls.from_degrees(*values) if degrees else cls(*values)


@dataclass(frozen=True)
class Outcome:
    """Joint outcome: photon 1 in D1(sigma) and photon 2 in D2(omega)."""
    sigma: Sign
    omega: Sign

    @property
    def label(self) -> str:
        return self.sigma.symbol + self.omega.symbol

    @property
    def parity(self) -> int:
        """sigma * omega."""
        return int(self.sigma) * int(self.omega)

    @property
    def index(self) -> int:
        """Position in the fixed (++, +-, -+, --) order."""
        return OUTCOMES.index(self)

    @classmethod
    def all(cls) -> tuple["Outcome", ...]:
        return OUTCOMES

    @classmethod
    def from_label(cls, label: str) -> "Outcome":
        assert len(label) == 2, f"Outcome label must have two signs, got {label!r}"
        return cls(Sign.from_symbol(label[0]), Sign.from_symbol(label[1]))


OUTCOMES: tuple[Outcome, ...] = tuple(Outcome(sigma, omega) for sigma in Sign for omega in Sign)


@dataclass(frozen=True)
class PathPair:
    """Arms taken by both photons: photon 1 through BS11, photon 2 through BS21 then BS22."""
    photon1: Arm
    photon2: SegmentPair

    def __str__(self) -> str:
        return f"({self.photon1.value},{self.photon2.value})"

    @property
    def label(self) -> str:
        """Compact label used in CSV output, e.g. 'l|LL'."""
        return f"{self.photon1.value}|{self.photon2.value}"

    @property
    def index(self) -> int:
        return PATH_PAIRS.index(self)

    @property
    def subensemble(self) -> Subensemble:
        """Subensemble from the path-length excess of photon 2 over photon 1."""
        long_excess = sum(arm == Arm.LONG for arm in self.photon2.arms) - (self.photon1 == Arm.LONG)
        return _SUBENSEMBLE_BY_LONG_EXCESS[long_excess]

    @classmethod
    def all(cls) -> tuple["PathPair", ...]:
        return PATH_PAIRS

    @classmethod
    def from_label(cls, label: str) -> "PathPair":
        """Parse 'l|LL', '(l,LL)' or 'l,LL'."""
        photon1, photon2 = label.strip("()").replace("|", ",").split(",")
        return cls(Arm(photon1), SegmentPair(photon2))


# photon 2 travels 2L-l, L, l, 2l-L further than photon 1 measured in long-arm units
_SUBENSEMBLE_BY_LONG_EXCESS = {
    2: Subensemble.TWO_LONG,
    1: Subensemble.LONG,
    0: Subensemble.SHORT,
    -1: Subensemble.TWO_SHORT,
}

PATH_PAIRS: tuple[PathPair, ...] = (
    PathPair(Arm.SHORT, SegmentPair.LONG_LONG),
    PathPair(Arm.LONG, SegmentPair.LONG_LONG),
    PathPair(Arm.SHORT, SegmentPair.LONG_SHORT),
    PathPair(Arm.SHORT, SegmentPair.SHORT_LONG),
    PathPair(Arm.SHORT, SegmentPair.SHORT_SHORT),
    PathPair(Arm.LONG, SegmentPair.LONG_SHORT),
    PathPair(Arm.LONG, SegmentPair.SHORT_LONG),
    PathPair(Arm.LONG, SegmentPair.SHORT_SHORT),
)


@dataclass(frozen=True)
class Photon1SegmentAmplitude:
    """First order amplitude of photon 1 reaching D1(sigma) through one arm of the BS11 interferometer."""
    arm: Arm
    sigma: Sign
    value: ComplexAmplitude


@dataclass(frozen=True)
class ImpactClass:
    """Before / non-before label of the impact on one beam splitter."""
    label: ImpactLabel
    beam_splitter: BeamSplitter

    def __str__(self) -> str:
        """Short form, e.g. b11 or a22."""
        return f"{self.label.value}{self.beam_splitter.value[2:]}"

    @classmethod
    def from_str(cls, value: str) -> "ImpactClass":
        return cls(ImpactLabel(value[0]), BeamSplitter(f"BS{value[1:]}"))


@dataclass(frozen=True)
class ModelCase:
    """Impact classes on (BS11, BS21, BS22) together with the probability rule they select."""
    classes: tuple[ImpactClass, ImpactClass, ImpactClass]
    observed: tuple[ImpactClass, ImpactClass, ImpactClass] | None = None
    """Raw classification the case was selected from, if it differs from the effective classes."""

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.classes) + ")"

    @property
    def labels(self) -> tuple[ImpactLabel, ImpactLabel, ImpactLabel]:
        return tuple(c.label for c in self.classes)    # type: ignore

    @property
    def rule(self) -> ModelRule:
        b, a = ImpactLabel.BEFORE, ImpactLabel.NON_BEFORE
        if self.labels == (b, b, b):
            return ModelRule.ALL_BEFORE
        if self.labels == (b, a, b):
            return ModelRule.CAUSAL_INDISTINGUISHABILITY
        return ModelRule.UNSUPPORTED

    @property
    def is_computable(self) -> bool:
        return self.rule != ModelRule.UNSUPPORTED

    @classmethod
    def from_labels(cls, *labels: str | ImpactLabel, observed: tuple | None = None) -> "ModelCase":
        """Build a case from three labels in (BS11, BS21, BS22) order, e.g. from_labels('b', 'a', 'b')."""
        assert len(labels) == 3, f"Expected three labels, got {len(labels)}"
        classes = tuple(ImpactClass(ImpactLabel(label), bs) for label, bs in zip(labels, BeamSplitter))
        return cls(classes, observed)    # type: ignore

    @classmethod
    def all_before(cls) -> "ModelCase":
        return cls.from_labels("b", "b", "b")

    @classmethod
    def causal_indistinguishability(cls, observed: tuple | None = None) -> "ModelCase":
        return cls.from_labels("b", "a", "b", observed=observed)

    def to_dict(self) -> dict:
        return {
            "classes": [str(c) for c in self.classes],
            "observed": [str(c) for c in self.observed] if self.observed else None,
            "rule": self.rule.value,
        }
