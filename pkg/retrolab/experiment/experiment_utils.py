import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass, field, fields
from enum import Enum

import numpy as np
import pandas as pd
from experiment_logging.base_logging_connector import (
    BaseLoggingConnector,
    NoopLoggingConnector,
)
from interferometer.interferometer_utils import (
    OUTCOMES,
    PATH_PAIRS,
    Outcome,
    PathPair,
    PhaseSettings,
)
from interferometer.kinematics import GEOMETRY_PRESETS, Geometry, time_ordering_2

logger = logging.getLogger(__name__)

OUTCOME_COLUMNS = ["count_pp", "count_pm", "count_mp", "count_mm"]
COHERENCE_MARGIN = 10.0
"""Factor by which the coherence lengths have to clear L - l."""


class ConfigError(ValueError):
    """Invalid experiment configuration, tagged with the dotted name of the offending field."""
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class ModelName(Enum):
    """Model used to draw outcomes."""
    QM = "qm"
    CAUSAL = "causal"


class NonLPolicy(Enum):
    """Outcome table used by the causal model outside subensemble L."""
    QM = "qm"
    UNIFORM = "uniform"


@dataclass
class CoincidenceWindow:
    """Time difference window on t2 - t1 - reference offset, in seconds."""
    center: float = 0.0
    "Window center."
    half_width: float = 0.25e-9
    "Half width, records with |delay - center| <= half_width are selected."

    def contains(self, delays: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(delays) - self.center) <= self.half_width

    def to_dict(self) -> dict:
        return {"center": self.center, "half_width": self.half_width}


def _as_float(value, field_name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field_name, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(field_name, f"expected a finite number, got {value!r}")
    return float(value)


def _as_int(value, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(field_name, f"expected an integer, got {value!r}")
    return value


def _as_enum(enum_cls, value, field_name: str):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(str(member.value) for member in enum_cls)
        raise ConfigError(field_name, f"expected one of {choices}, got {value!r}") from None


def _parse_geometry(value) -> Geometry:
    if isinstance(value, str):
        if value not in GEOMETRY_PRESETS:
            raise ConfigError("geometry", f"unknown preset {value!r}, expected one of {', '.join(GEOMETRY_PRESETS)}")
        return GEOMETRY_PRESETS[value]()
    if not isinstance(value, dict):
        raise ConfigError("geometry", f"expected a preset name or an object, got {value!r}")
    known = {f.name for f in fields(Geometry)}
    for name in value:
        if name not in known:
            raise ConfigError(f"geometry.{name}", "unknown field")
    return Geometry(**{name: _as_float(v, f"geometry.{name}") for name, v in value.items()})


def _parse_phases(value, degrees: bool) -> PhaseSettings:
    if not isinstance(value, dict):
        raise ConfigError("phases", f"expected an object with alpha, beta and gamma, got {value!r}")
    for name in value:
        if name not in ("alpha", "beta", "gamma"):
            raise ConfigError(f"phases.{name}", "unknown field")
    values = {name: _as_float(v, f"phases.{name}") for name, v in value.items()}
    return PhaseSettings.from_dict(values, degrees=degrees)


def _parse_window(value) -> CoincidenceWindow:
    if not isinstance(value, dict):
        raise ConfigError("window", f"expected an object with center and half_width, got {value!r}")
    for name in value:
        if name not in ("center", "half_width"):
            raise ConfigError(f"window.{name}", "unknown field")
    return CoincidenceWindow(**{name: _as_float(v, f"window.{name}") for name, v in value.items()})


@dataclass
class ExperimentConfig:
    """Configuration of a simulated impact series run."""
    geometry: Geometry = field(default_factory=time_ordering_2)
    "Setup geometry, by default the splitters at rest with photon 2 delayed."
    phases: PhaseSettings = field(default_factory=PhaseSettings.discrimination_point)
    "Phase settings alpha, beta, gamma."
    model: ModelName = ModelName.QM
    "Model the outcomes are drawn from."
    n_events: int = 100_000
    "Number of emitted photon pairs."
    seed: int = 0
    "Root seed of the counter based event streams."
    jitter_sigma: float = 0.1e-9
    "Standard deviation of the Gaussian timing jitter of each detector (s)."
    window: CoincidenceWindow = field(default_factory=CoincidenceWindow)
    "Coincidence window for post-selecting subensemble L."
    non_L_policy: NonLPolicy | None = NonLPolicy.QM
    "Outcome table of the causal model outside subensemble L."
    bin_width: float = 0.05e-9
    "Delay spectrum bin width (s)."
    max_workers: int = 1
    "Number of worker processes generating chunks. Results do not depend on it."
    pair_coherence_length: float = 10e-6
    "Coherence length of the down-converted photons (m)."
    pump_coherence_length: float = 30.0
    "Coherence length of the pump laser (m)."
    metric_logger: BaseLoggingConnector = field(default_factory=NoopLoggingConnector, repr=False, compare=False)
    "Connector receiving run metrics. Not serialized."

    def validate(self):
        """Raise ConfigError naming the first invalid field."""
        if self.n_events <= 0:
            raise ConfigError("n_events", f"must be > 0, got {self.n_events}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed}")
        if self.jitter_sigma < 0:
            raise ConfigError("jitter_sigma", f"must be >= 0, got {self.jitter_sigma}")
        if self.window.half_width <= 0:
            raise ConfigError("window.half_width", f"must be > 0, got {self.window.half_width}")
        if self.bin_width <= 0:
            raise ConfigError("bin_width", f"must be > 0, got {self.bin_width}")
        if self.max_workers < 1:
            raise ConfigError("max_workers", f"must be >= 1, got {self.max_workers}")
        if self.model == ModelName.CAUSAL and self.non_L_policy is None:
            raise ConfigError("non_L_policy", "must be set for the causal model")
        try:
            self.geometry.validate()
        except ValueError as e:
            raise ConfigError("geometry", str(e)) from e

    def coherence_warnings(self) -> list[str]:
        """Warnings for a violated pair coherence << L - l << pump coherence ordering."""
        warnings = []
        difference = self.geometry.arm_difference
        if self.pair_coherence_length * COHERENCE_MARGIN > difference:
            warnings.append(
                f"pair coherence length {self.pair_coherence_length} m is not much shorter than L - l = {difference} m,"
                " first order interference is not suppressed"
            )
        if difference * COHERENCE_MARGIN > self.pump_coherence_length:
            warnings.append(
                f"L - l = {difference} m is not much shorter than the pump coherence length "
                f"{self.pump_coherence_length} m, second order interference is lost"
            )
        for warning in warnings:
            logger.warning(warning)
        return warnings

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "phases": self.phases.to_dict(),
            "model": self.model.value,
            "n_events": self.n_events,
            "seed": self.seed,
            "jitter_sigma": self.jitter_sigma,
            "window": self.window.to_dict(),
            "non_L_policy": self.non_L_policy.value if self.non_L_policy else None,
            "bin_width": self.bin_width,
            "max_workers": self.max_workers,
            "pair_coherence_length": self.pair_coherence_length,
            "pump_coherence_length": self.pump_coherence_length,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """
        Build a config from a plain dict such as a parsed JSON config file.

        Missing fields take their defaults. The geometry may be a preset name. Phases are radians unless the top level
        carries "degrees": true. Unknown keys and wrongly typed values raise ConfigError.
        """
        if not isinstance(data, dict):
            raise ConfigError("config", f"expected an object, got {type(data).__name__}")
        known = {f.name for f in fields(cls)} - {"metric_logger"}
        for key in data:
            if key not in known and key != "degrees":
                raise ConfigError(key, "unknown field")
        degrees = data.get("degrees", False)
        if not isinstance(degrees, bool):
            raise ConfigError("degrees", f"expected true or false, got {degrees!r}")

        kwargs = {}
        if "geometry" in data:
            kwargs["geometry"] = _parse_geometry(data["geometry"])
        if "phases" in data:
            kwargs["phases"] = _parse_phases(data["phases"], degrees)
        if "model" in data:
            kwargs["model"] = _as_enum(ModelName, data["model"], "model")
        if "window" in data:
            kwargs["window"] = _parse_window(data["window"])
        if "non_L_policy" in data:
            value = data["non_L_policy"]
            kwargs["non_L_policy"] = None if value is None else _as_enum(NonLPolicy, value, "non_L_policy")
        for name in ("n_events", "seed", "max_workers"):
            if name in data:
                kwargs[name] = _as_int(data[name], name)
        for name in ("jitter_sigma", "bin_width", "pair_coherence_length", "pump_coherence_length"):
            if name in data:
                kwargs[name] = _as_float(data[name], name)
        return cls(**kwargs)


@dataclass(frozen=True)
class DetectionRecord:
    """One detected pair: the outcome, both detector timestamps (s) and the path pair it actually took."""
    outcome: Outcome
    t1: float
    t2: float
    true_path: PathPair
    reference_offset: float = 0.0
    "Geometric t2 - t1 of the subensemble L path pairs under the geometry that produced the record (s)."

    @property
    def delay(self) -> float:
        return self.t2 - self.t1 - self.reference_offset


@dataclass
class RecordBatch:
    """
    Columnar store of detection records.

    Behaves as a sequence of DetectionRecord while keeping the columns as numpy arrays. reference_offset is the
    geometric t2 - t1 of the subensemble L path pairs, subtracted when forming delays.
    """
    path_index: np.ndarray
    outcome_index: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    reference_offset: float = 0.0

    def __post_init__(self):
        n = len(self.path_index)
        assert all(len(column) == n for column in (self.outcome_index, self.t1, self.t2)), "Columns differ in length"

    def __len__(self) -> int:
        return len(self.path_index)

    def __getitem__(self, i: int) -> DetectionRecord:
        return DetectionRecord(
            OUTCOMES[int(self.outcome_index[i])],
            float(self.t1[i]),
            float(self.t2[i]),
            PATH_PAIRS[int(self.path_index[i])],
            self.reference_offset,
        )

    def __iter__(self) -> Iterator[DetectionRecord]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RecordBatch):
            return False
        return (
            self.reference_offset == other.reference_offset and np.array_equal(self.path_index, other.path_index)
            and np.array_equal(self.outcome_index, other.outcome_index) and np.array_equal(self.t1, other.t1)
            and np.array_equal(self.t2, other.t2)
        )

    @property
    def delays(self) -> np.ndarray:
        """t2 - t1 - reference offset per record."""
        return self.t2 - self.t1 - self.reference_offset

    def subensemble_counts(self) -> dict[str, int]:
        counts = np.bincount(self.path_index, minlength=len(PATH_PAIRS))
        totals: dict[str, int] = {}
        for path, count in zip(PATH_PAIRS, counts):
            key = path.subensemble.value
            totals[key] = totals.get(key, 0) + int(count)
        return totals

    def to_frame(self) -> pd.DataFrame:
        """Event log table with columns index, sigma, omega, t1_s, t2_s, true_path."""
        sigma = np.array([int(outcome.sigma) for outcome in OUTCOMES])
        omega = np.array([int(outcome.omega) for outcome in OUTCOMES])
        labels = np.array([path.label for path in PATH_PAIRS])
        return pd.DataFrame({
            "index": np.arange(len(self)),
            "sigma": sigma[self.outcome_index],
            "omega": omega[self.outcome_index],
            "t1_s": self.t1,
            "t2_s": self.t2,
            "true_path": labels[self.path_index],
        })

    @classmethod
    def empty(cls, reference_offset: float = 0.0) -> "RecordBatch":
        return cls(
            np.zeros(0, dtype=np.int8), np.zeros(0, dtype=np.int8), np.zeros(0), np.zeros(0), reference_offset
        )

    @classmethod
    def concat(cls, batches: list["RecordBatch"]) -> "RecordBatch":
        """Concatenate batches in the given order."""
        if not batches:
            return cls.empty()
        offsets = {batch.reference_offset for batch in batches}
        assert len(offsets) == 1, "Cannot concatenate batches with different reference offsets"
        return cls(
            np.concatenate([b.path_index for b in batches]),
            np.concatenate([b.outcome_index for b in batches]),
            np.concatenate([b.t1 for b in batches]),
            np.concatenate([b.t2 for b in batches]),
            batches[0].reference_offset,
        )

    @classmethod
    def from_records(cls, records: list[DetectionRecord], reference_offset: float | None = None) -> "RecordBatch":
        """
        Columnar copy of records.

        Without an explicit reference_offset the records' own offset is used, and they must all agree on it.
        """
        if reference_offset is None:
            offsets = {r.reference_offset for r in records}
            if len(offsets) > 1:
                raise ValueError(f"records mix {len(offsets)} reference offsets, pass reference_offset explicitly")
            reference_offset = offsets.pop() if offsets else 0.0
        if not records:
            return cls.empty(reference_offset)
        return cls(
            np.array([r.true_path.index for r in records], dtype=np.int8),
            np.array([r.outcome.index for r in records], dtype=np.int8),
            np.array([r.t1 for r in records], dtype=float),
            np.array([r.t2 for r in records], dtype=float),
            reference_offset,
        )


@dataclass(frozen=True)
class SpectrumPeak:
    """A cluster of populated delay bins."""
    center: float
    "Count weighted mean of the bin centers (s)."
    count: int
    fraction: float
    "Share of all spectrum counts inside the cluster."


@dataclass
class DelaySpectrum:
    """Histogram of record delays with one count per outcome in each bin. Bin k is centered on k * bin_width."""
    bin_width: float
    bins: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        assert self.bin_width > 0, f"Bin width must be positive, got {self.bin_width}"

    def bin_index(self, delays: np.ndarray) -> np.ndarray:
        return np.floor(np.asarray(delays) / self.bin_width + 0.5).astype(np.int64)

    def add(self, delays: np.ndarray, outcome_index: np.ndarray):
        """Accumulate records given by their delays and outcome indices."""
        indices = self.bin_index(delays)
        for k in range(len(OUTCOMES)):
            values, counts = np.unique(indices[outcome_index == k], return_counts=True)
            for value, count in zip(values, counts):
                row = self.bins.setdefault(int(value), np.zeros(len(OUTCOMES), dtype=np.int64))
                row[k] += count

    @property
    def indices(self) -> np.ndarray:
        return np.array(sorted(self.bins), dtype=np.int64)

    @property
    def centers(self) -> np.ndarray:
        return self.indices * self.bin_width

    @property
    def counts(self) -> np.ndarray:
        """Counts per bin in center order, one column per outcome."""
        if not self.bins:
            return np.zeros((0, len(OUTCOMES)), dtype=np.int64)
        return np.stack([self.bins[i] for i in sorted(self.bins)])

    @property
    def total(self) -> int:
        return int(sum(row.sum() for row in self.bins.values()))

    def merge(self, other: "DelaySpectrum") -> "DelaySpectrum":
        """Commutative sum of two spectra with the same bin width."""
        assert math.isclose(self.bin_width, other.bin_width), "Cannot merge spectra with different bin widths"
        merged = {index: row.copy() for index, row in self.bins.items()}
        for index, row in other.bins.items():
            merged[index] = merged[index] + row if index in merged else row.copy()
        return DelaySpectrum(self.bin_width, merged)

    def peaks(self, min_separation: float = 0.2e-9, min_fraction: float = 0.1) -> list[SpectrumPeak]:
        """
        Clusters of bins holding at least min_fraction of the tallest bin, split where neighbouring qualifying bins
        are more than min_separation apart.
        """
        if not self.bins:
            return []
        centers, heights = self.centers, self.counts.sum(axis=1)
        keep = heights >= min_fraction * heights.max()
        centers, heights = centers[keep], heights[keep]
        total = self.total
        splits = np.flatnonzero(np.diff(centers) > min_separation) + 1
        peaks = []
        for cluster_centers, cluster_heights in zip(np.split(centers, splits), np.split(heights, splits)):
            count = int(cluster_heights.sum())
            center = float(np.average(cluster_centers, weights=cluster_heights))
            peaks.append(SpectrumPeak(center, count, count / total))
        return peaks

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.counts, columns=OUTCOME_COLUMNS)
        frame.insert(0, "bin_center_s", self.centers)
        return frame


@dataclass
class CoincidenceCounts:
    """Coincidence counts R per outcome inside a window."""
    r: np.ndarray
    "Counts in (++, +-, -+, --) order."
    window: CoincidenceWindow

    def __post_init__(self):
        assert self.r.shape == (len(OUTCOMES), ), f"Expected {len(OUTCOMES)} counts, got shape {self.r.shape}"
        assert np.all(self.r >= 0), "Counts must be non-negative"

    def __getitem__(self, outcome: Outcome | str) -> int:
        if isinstance(outcome, str):
            outcome = Outcome.from_label(outcome)
        return int(self.r[outcome.index])

    @property
    def total(self) -> int:
        return int(self.r.sum())

    def merge(self, other: "CoincidenceCounts") -> "CoincidenceCounts":
        assert self.window == other.window, "Cannot merge counts from different windows"
        return CoincidenceCounts(self.r + other.r, self.window)

    def to_dict(self) -> dict:
        return {
            "counts": {outcome.label: int(count) for outcome, count in zip(OUTCOMES, self.r)},
            "total": self.total,
            "window": self.window.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoincidenceCounts":
        r = np.array([int(data["counts"][outcome.label]) for outcome in OUTCOMES], dtype=np.int64)
        return cls(r, CoincidenceWindow(**data["window"]))


@dataclass(frozen=True)
class CorrelationEstimate:
    """Empirical correlation coefficient with its binomial standard error."""
    e_hat: float
    std_error: float
    n: int

    def to_dict(self) -> dict:
        return {"e_hat": self.e_hat, "std_error": self.std_error, "n": self.n}
