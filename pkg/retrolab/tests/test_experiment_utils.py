import math

import numpy as np
import pytest
from experiment.experiment_utils import (
    CoincidenceCounts,
    CoincidenceWindow,
    ConfigError,
    DelaySpectrum,
    DetectionRecord,
    ExperimentConfig,
    ModelName,
    NonLPolicy,
    RecordBatch,
)
from interferometer.interferometer_utils import Outcome, PathPair, PhaseSettings
from interferometer.kinematics import Geometry, all_before, time_ordering_2


def test_default_config():
    config = ExperimentConfig()
    config.validate()
    assert config.geometry == time_ordering_2()
    assert config.phases == PhaseSettings.discrimination_point()
    assert config.window.half_width == 0.25e-9
    assert config.non_L_policy == NonLPolicy.QM
    assert config.coherence_warnings() == []


def test_config_from_dict():
    config = ExperimentConfig.from_dict({
        "geometry": "all_before",
        "phases": {"alpha": 90, "gamma": -45},
        "degrees": True,
        "model": "causal",
        "n_events": 1000,
        "window": {"half_width": 0.5e-9},
        "non_L_policy": "uniform",
    })
    assert config.geometry == all_before()
    assert config.phases.alpha == pytest.approx(math.pi / 2)
    assert config.phases.beta == 0.0
    assert config.model == ModelName.CAUSAL
    assert config.window == CoincidenceWindow(0.0, 0.5e-9)
    assert config.non_L_policy == NonLPolicy.UNIFORM
    # everything else keeps its default
    assert config.seed == 0

    config = ExperimentConfig.from_dict({"geometry": {"long_arm": 0.6, "short_arm": 0.2}, "seed": 7})
    assert config.geometry == Geometry(long_arm=0.6, short_arm=0.2)
    assert ExperimentConfig.from_dict(config.to_dict()) == config


@pytest.mark.parametrize(
    "data, field_name",
    [
        ({"n_events": "many"}, "n_events"),
        ({"n_events": 10.5}, "n_events"),
        ({"seed": True}, "seed"),
        ({"geometry": {"warp": 1.0}}, "geometry.warp"),
        ({"geometry": "time_ordering_3"}, "geometry"),
        ({"geometry": {"long_arm": "long"}}, "geometry.long_arm"),
        ({"phases": {"delta": 0.0}}, "phases.delta"),
        ({"phases": {"alpha": float("nan")}}, "phases.alpha"),
        ({"model": "hidden_variables"}, "model"),
        ({"window": {"width": 1e-9}}, "window.width"),
        ({"non_L_policy": "drop"}, "non_L_policy"),
        ({"degrees": "yes"}, "degrees"),
        ({"bogus": 1}, "bogus"),
    ],
)
def test_config_from_dict_errors(data, field_name):
    with pytest.raises(ConfigError) as error:
        ExperimentConfig.from_dict(data)
    assert error.value.field == field_name, f"Error should name {field_name}, got {error.value.field}"
    assert str(error.value).startswith(field_name)


@pytest.mark.parametrize(
    "overrides, field_name",
    [
        ({"n_events": 0}, "n_events"),
        ({"seed": -1}, "seed"),
        ({"jitter_sigma": -1e-9}, "jitter_sigma"),
        ({"window": CoincidenceWindow(0.0, 0.0)}, "window.half_width"),
        ({"bin_width": 0.0}, "bin_width"),
        ({"max_workers": 0}, "max_workers"),
        ({"model": ModelName.CAUSAL, "non_L_policy": None}, "non_L_policy"),
        ({"geometry": Geometry(long_arm=0.1, short_arm=0.1)}, "geometry"),
    ],
)
def test_config_validation(overrides, field_name):
    with pytest.raises(ConfigError) as error:
        ExperimentConfig(**overrides).validate()
    assert error.value.field == field_name
    # still a ValueError for callers that do not know about ConfigError
    assert isinstance(error.value, ValueError)


def test_coherence_warnings():
    assert len(ExperimentConfig(pump_coherence_length=1.0).coherence_warnings()) == 1
    assert len(ExperimentConfig(pair_coherence_length=0.1, pump_coherence_length=1.0).coherence_warnings()) == 2


def test_coincidence_window():
    window = CoincidenceWindow(1.0, 0.5)
    # both bounds are inclusive
    assert window.contains(np.array([0.5, 1.0, 1.5, 1.6])).tolist() == [True, True, True, False]


def test_record_batch():
    records = [
        DetectionRecord(Outcome.from_label("+-"), 1.0e-8, 1.2e-8, PathPair.from_label("L|LL"), 2e-9),
        DetectionRecord(Outcome.from_label("--"), 2.0e-8, 2.1e-8, PathPair.from_label("l|ll"), 2e-9),
        DetectionRecord(Outcome.from_label("++"), 3.0e-8, 3.3e-8, PathPair.from_label("l|LL"), 2e-9),
    ]
    batch = RecordBatch.from_records(records)
    assert len(batch) == 3
    assert batch.reference_offset == 2e-9
    assert records[2].delay == pytest.approx(1e-9, abs=1e-20)
    assert list(batch) == records
    assert batch.delays == pytest.approx([0.0, -1e-9, 1e-9], abs=1e-20)
    assert batch.subensemble_counts() == {"2L-l": 1, "L": 1, "l": 1, "2l-L": 0}

    frame = batch.to_frame()
    assert list(frame.columns) == ["index", "sigma", "omega", "t1_s", "t2_s", "true_path"]
    assert frame["sigma"].tolist() == [1, -1, 1]
    assert frame["omega"].tolist() == [-1, -1, 1]
    assert frame["true_path"].tolist() == ["L|LL", "l|ll", "l|LL"]

    joined = RecordBatch.concat([batch, batch])
    assert len(joined) == 6
    assert joined[3] == records[0]
    assert len(RecordBatch.empty()) == 0
    with pytest.raises(AssertionError):
        RecordBatch.concat([batch, RecordBatch.empty(reference_offset=0.0)])

    mixed = records + [DetectionRecord(Outcome.from_label("++"), 0.0, 0.0, PathPair.from_label("L|LL"))]
    with pytest.raises(ValueError, match="reference offsets"):
        RecordBatch.from_records(mixed)
    assert RecordBatch.from_records(mixed, reference_offset=0.0).reference_offset == 0.0


def test_delay_spectrum():
    spectrum = DelaySpectrum(0.05e-9)
    # bins are centered on multiples of the bin width
    assert spectrum.bin_index(np.array([0.0, 0.024e-9, 0.026e-9, -0.026e-9])).tolist() == [0, 0, 1, -1]
    spectrum.add(np.array([0.0, 0.01e-9, 1.0e-9]), np.array([0, 3, 1], dtype=np.int8))
    assert spectrum.total == 3
    assert spectrum.counts.tolist() == [[1, 0, 0, 1], [0, 1, 0, 0]]
    assert spectrum.centers == pytest.approx([0.0, 1.0e-9])

    other = DelaySpectrum(0.05e-9)
    other.add(np.array([1.0e-9, 2.0e-9]), np.array([1, 2], dtype=np.int8))
    merged = spectrum.merge(other)
    assert merged.total == 5
    assert np.array_equal(merged.counts, other.merge(spectrum).counts)

    peaks = merged.peaks()
    assert [peak.count for peak in peaks] == [2, 2, 1]
    assert sum(peak.fraction for peak in peaks) == pytest.approx(1.0)
    assert list(merged.to_frame().columns) == ["bin_center_s", "count_pp", "count_pm", "count_mp", "count_mm"]
    assert DelaySpectrum(1e-9).peaks() == []


def test_coincidence_counts():
    window = CoincidenceWindow()
    counts = CoincidenceCounts(np.array([1, 5, 5, 1]), window)
    assert counts["+-"] == 5
    assert counts.total == 12
    assert counts.merge(counts).total == 24
    data = counts.to_dict()
    assert data["counts"] == {"++": 1, "+-": 5, "-+": 5, "--": 1}
    assert np.array_equal(CoincidenceCounts.from_dict(data).r, counts.r)
    with pytest.raises(AssertionError):
        CoincidenceCounts(np.array([1, -1, 0, 0]), window)
