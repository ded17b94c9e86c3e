"""
Monte Carlo simulation of the impact series experiment.

Each emitted pair takes one of the eight path pairs with probability 1/8, which puts the subensembles 2L-l, L, l and
2l-L at 1/8, 3/8, 3/8 and 1/8. Its outcome is drawn from the model table of its subensemble and both detector
timestamps get independent Gaussian jitter. Post-selection on the t2 - t1 delay recovers the subensemble L
statistics.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns
from experiment.event_streams import CHUNK_SIZE, chunk_bounds, chunk_generator
from experiment.experiment_utils import (
    OUTCOME_COLUMNS,
    CoincidenceCounts,
    CoincidenceWindow,
    CorrelationEstimate,
    DelaySpectrum,
    DetectionRecord,
    ExperimentConfig,
    ModelName,
    NonLPolicy,
    RecordBatch,
)
from interferometer.interferometer_utils import (
    OUTCOMES,
    PATH_PAIRS,
    PathPair,
    PhaseSettings,
    Subensemble,
)
from interferometer.kinematics import detection_times
from models.base_model import model_factory
from models.model_utils import ProbabilityTable
from models.qm_model import qm_correlation, qm_joint

logger = logging.getLogger(__name__)

REFERENCE_PATH = PathPair.from_label("L|LL")
SEPARATION_THRESHOLD = 5.0
"""Separation, in combined standard errors, needed to tell the two models apart."""
DISCRIMINATION_TOLERANCE = 1e-9
PROGRESS_EVERY = 16
"""Chunks between progress messages."""

# -sigma * omega per outcome in (++, +-, -+, --) order
_CORRELATION_SIGNS = np.array([-outcome.parity for outcome in OUTCOMES], dtype=float)


@dataclass
class SimulationPlan:
    """Everything a worker needs to generate events: outcome cdfs and noiseless detection times per path pair."""
    cdf: np.ndarray
    "Cumulative outcome probabilities, one row per path pair, last column exactly 1."
    t1: np.ndarray
    t2: np.ndarray
    reference_offset: float
    "Noiseless t2 - t1 of the subensemble L path pairs."
    jitter_sigma: float


def outcome_tables(config: ExperimentConfig) -> list[ProbabilityTable]:
    """
    Outcome table per path pair, in path table order.

    Subensemble L follows the configured model. Outside it the quantum mechanical model gives its own tables, while
    the causal model uses the quantum mechanical or uniform table for subensemble l as non_L_policy says. The
    singleton subensembles are uniform under both models.
    """
    model = model_factory(config.model.value, config.geometry)
    tables = {}
    for subensemble in Subensemble:
        if subensemble == Subensemble.LONG or config.model == ModelName.QM:
            tables[subensemble] = model.joint(subensemble, config.phases)
        elif not subensemble.is_interfering or config.non_L_policy == NonLPolicy.UNIFORM:
            tables[subensemble] = ProbabilityTable.uniform(subensemble)
        else:
            tables[subensemble] = qm_joint(subensemble, config.phases)
    return [tables[path.subensemble] for path in PATH_PAIRS]


def simulation_plan(config: ExperimentConfig) -> SimulationPlan:
    config.validate()
    probabilities = np.clip(np.stack([table.as_array() for table in outcome_tables(config)]), 0.0, None)
    cdf = np.cumsum(probabilities, axis=1)
    cdf[:, -1] = 1.0
    times = np.array([detection_times(config.geometry, path) for path in PATH_PAIRS])
    reference_offset = float(times[REFERENCE_PATH.index, 1] - times[REFERENCE_PATH.index, 0])
    return SimulationPlan(cdf, times[:, 0], times[:, 1], reference_offset, config.jitter_sigma)


def sample_event(
    rng: np.random.Generator, config: ExperimentConfig, plan: SimulationPlan | None = None
) -> DetectionRecord:
    """Draw a single detection record."""
    plan = plan or simulation_plan(config)
    path_index = int(rng.integers(0, len(PATH_PAIRS)))
    u = rng.random()
    jitter = rng.standard_normal(2) * plan.jitter_sigma
    outcome_index = int(np.count_nonzero(plan.cdf[path_index] <= u))
    return DetectionRecord(
        OUTCOMES[outcome_index],
        float(plan.t1[path_index] + jitter[0]),
        float(plan.t2[path_index] + jitter[1]),
        PATH_PAIRS[path_index],
        plan.reference_offset,
    )


def generate_chunk(plan: SimulationPlan, seed: int, chunk_index: int, start: int, stop: int) -> RecordBatch:
    """Events start to stop, all drawn from chunk chunk_index of the stream."""
    assert 0 <= stop - start <= CHUNK_SIZE, f"Chunk {chunk_index} spans {stop - start} events"
    rng = chunk_generator(seed, chunk_index)
    paths = rng.integers(0, len(PATH_PAIRS), size=CHUNK_SIZE, dtype=np.int8)
    u = rng.random(CHUNK_SIZE)
    jitter = rng.standard_normal((CHUNK_SIZE, 2)) * plan.jitter_sigma

    n = stop - start
    paths, u, jitter = paths[:n], u[:n], jitter[:n]
    outcomes = np.count_nonzero(plan.cdf[paths] <= u[:, None], axis=1).astype(np.int8)
    return RecordBatch(paths, outcomes, plan.t1[paths] + jitter[:, 0], plan.t2[paths] + jitter[:, 1],
                       plan.reference_offset)


def run_experiment(config: ExperimentConfig) -> RecordBatch:
    """
    Generate config.n_events detection records.

    The output is bit-identical for identical configs, whatever max_workers is.
    """
    plan = simulation_plan(config)
    bounds = chunk_bounds(config.n_events)
    logger.info(
        "Simulating %d events with model %s in %d chunks on %d worker(s)", config.n_events, config.model.value,
        len(bounds), config.max_workers
    )

    if config.max_workers > 1:
        with ProcessPoolExecutor(max_workers=config.max_workers) as executor:
            futures = [executor.submit(generate_chunk, plan, config.seed, *bound) for bound in bounds]
            batches = [future.result() for future in futures]
    else:
        batches = []
        for n, bound in enumerate(bounds):
            batches.append(generate_chunk(plan, config.seed, *bound))
            if (n + 1) % PROGRESS_EVERY == 0:
                logger.info("Done with %d/%d chunks.", n + 1, len(bounds))

    batch = RecordBatch.concat(batches)
    frequencies = {f"freq_{key}": count / len(batch) for key, count in batch.subensemble_counts().items()}
    config.metric_logger.log({"n_events": len(batch), **frequencies})
    return batch


def _as_batch(records: RecordBatch | Sequence[DetectionRecord], reference_offset: float | None) -> RecordBatch:
    if isinstance(records, RecordBatch):
        return records if reference_offset is None else replace(records, reference_offset=reference_offset)
    return RecordBatch.from_records(list(records), reference_offset)


def delay_spectrum(
    records: RecordBatch | Sequence[DetectionRecord], bin_width: float, reference_offset: float | None = None
) -> DelaySpectrum:
    """
    Histogram of t2 - t1 - reference offset per outcome. An empty input gives an empty spectrum.

    The offset defaults to the one the records carry.
    """
    assert bin_width > 0, f"Bin width must be positive, got {bin_width}"
    batch = _as_batch(records, reference_offset)
    spectrum = DelaySpectrum(bin_width)
    if len(batch):
        spectrum.add(batch.delays, batch.outcome_index)
    return spectrum


def coincidence_select(
    records: RecordBatch | Sequence[DetectionRecord], window: CoincidenceWindow, reference_offset: float | None = None
) -> CoincidenceCounts:
    """Coincidence counts R per outcome over records whose delay falls in the window."""
    assert window.half_width > 0, f"Window half width must be positive, got {window.half_width}"
    batch = _as_batch(records, reference_offset)
    selected = batch.outcome_index[window.contains(batch.delays)]
    return CoincidenceCounts(np.bincount(selected, minlength=len(OUTCOMES)).astype(np.int64), window)


def estimate_correlation(counts: CoincidenceCounts) -> CorrelationEstimate:
    """e = sum (-sigma omega) R / sum R with standard error sqrt((1 - e^2) / sum R)."""
    total = counts.total
    if total == 0:
        raise ValueError(f"no coincidences in window {counts.window.to_dict()}")
    e_hat = float(_CORRELATION_SIGNS @ counts.r) / total
    return CorrelationEstimate(e_hat, math.sqrt(max(0.0, 1.0 - e_hat**2) / total), total)


def on_discrimination_point(phases: PhaseSettings, tol: float = DISCRIMINATION_TOLERANCE) -> bool:
    """alpha + gamma = 0, alpha + beta = pi/2 and beta - gamma = pi/2, all modulo 2 pi."""

    def wrapped(x: float) -> float:
        return (x + math.pi) % (2 * math.pi) - math.pi

    alpha, beta, gamma = phases()
    return all(
        abs(wrapped(x)) < tol for x in (alpha + gamma, alpha + beta - math.pi / 2, beta - gamma - math.pi / 2)
    )


@dataclass
class DiscriminationReport:
    """Both models run at the same settings, analytic and empirical correlation coefficients side by side."""
    phases: PhaseSettings
    analytic_qm: float
    analytic_causal: float
    causal_case: dict
    qm: CorrelationEstimate
    causal: CorrelationEstimate
    separation: float
    "Distance between the two estimates in combined standard errors."
    sufficient: bool
    on_discrimination_point: bool
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "phases": self.phases.to_dict(),
            "analytic": {"qm": self.analytic_qm, "causal": self.analytic_causal},
            "empirical": {"qm": self.qm.to_dict(), "causal": self.causal.to_dict()},
            "causal_case": self.causal_case,
            "separation": self.separation,
            "sufficient": self.sufficient,
            "on_discrimination_point": self.on_discrimination_point,
            "warnings": list(self.warnings),
        }


def discrimination_configs(n_events: int, seed: int, **overrides) -> tuple[ExperimentConfig, ExperimentConfig]:
    """Quantum mechanical and causal configs at the discrimination settings. The causal run uses seed + 1."""
    qm_config = ExperimentConfig(model=ModelName.QM, n_events=n_events, seed=seed, **overrides)
    causal_config = ExperimentConfig(model=ModelName.CAUSAL, n_events=n_events, seed=seed + 1, **overrides)
    return qm_config, causal_config


def discriminate(qm_config: ExperimentConfig, causal_config: ExperimentConfig) -> DiscriminationReport:
    """
    Run both models and compare their windowed correlation estimates.

    Phases off the discrimination point are allowed and only produce a warning; the analytic values are then those
    of the actual phases.
    """
    assert qm_config.model == ModelName.QM, "First config must use the qm model"
    assert causal_config.model == ModelName.CAUSAL, "Second config must use the causal model"
    phases = qm_config.phases
    warnings = []
    on_point = on_discrimination_point(phases)
    if not on_point:
        warnings.append(
            f"phases {phases.to_dict()} are off the discrimination point alpha + gamma = 0, alpha + beta = "
            "beta - gamma = pi/2"
        )
    if causal_config.phases != phases:
        warnings.append(f"causal run uses different phases {causal_config.phases.to_dict()}")
    for warning in warnings:
        logger.warning(warning)

    causal_model = model_factory(ModelName.CAUSAL.value, causal_config.geometry)
    estimates = []
    for config in (qm_config, causal_config):
        batch = run_experiment(config)
        counts = coincidence_select(batch, config.window)
        estimates.append(estimate_correlation(counts))
    qm_estimate, causal_estimate = estimates

    combined = math.hypot(qm_estimate.std_error, causal_estimate.std_error)
    difference = abs(qm_estimate.e_hat - causal_estimate.e_hat)
    if combined > 0:
        separation = difference / combined
    else:
        separation = math.inf if difference > 0 else 0.0
    sufficient = separation >= SEPARATION_THRESHOLD
    if not sufficient:
        logger.warning("Separation of %.2f combined standard errors is below %.1f", separation, SEPARATION_THRESHOLD)

    report = DiscriminationReport(
        phases=phases,
        analytic_qm=float(qm_correlation(phases)),
        analytic_causal=float(causal_model.correlation(causal_config.phases)),
        causal_case=causal_model.describe()["case"],
        qm=qm_estimate,
        causal=causal_estimate,
        separation=separation,
        sufficient=sufficient,
        on_discrimination_point=on_point,
        warnings=warnings,
    )
    qm_config.metric_logger.log({
        "e_hat_qm": qm_estimate.e_hat,
        "e_hat_causal": causal_estimate.e_hat,
        "separation": separation,
    })
    return report


def log_run_metrics(config: ExperimentConfig, spectrum: DelaySpectrum, counts: CoincidenceCounts,
                    estimate: CorrelationEstimate | None):
    """Push window counts, the estimate and the spectrum to the config's metric logger."""
    metrics = {f"R_{outcome.label}": int(count) for outcome, count in zip(OUTCOMES, counts.r)}
    metrics["coincidences"] = counts.total
    if estimate is not None:
        metrics.update({"e_hat": estimate.e_hat, "std_error": estimate.std_error})
    config.metric_logger.log(metrics)
    if spectrum.bins:
        config.metric_logger.log_array(
            "delay_spectrum",
            np.column_stack([spectrum.centers, spectrum.counts]),
            columns=["bin_center_s", *OUTCOME_COLUMNS],
        )


def write_events_csv(records: RecordBatch, path: str | Path) -> Path:
    """Event log with header index,sigma,omega,t1_s,t2_s,true_path."""
    path = Path(path)
    records.to_frame().to_csv(path, index=False, float_format="%.16e")
    logger.info("Stored %d events in %s", len(records), path)
    return path


def write_spectrum_csv(spectrum: DelaySpectrum, path: str | Path) -> Path:
    """Spectrum with header bin_center_s,count_pp,count_pm,count_mp,count_mm."""
    path = Path(path)
    spectrum.to_frame().to_csv(path, index=False, float_format="%.16e")
    logger.info("Stored delay spectrum with %d bins in %s", len(spectrum.bins), path)
    return path


def plot_delay_spectrum(spectrum: DelaySpectrum, plot_filename: str | Path = "delay_spectrum.png") -> Path:
    """Store a step plot of the four outcome spectra, delays in ns."""
    plt.switch_backend("Agg")
    frame = spectrum.to_frame()
    frame["bin_center_ns"] = frame.pop("bin_center_s") * 1e9
    long_frame = frame.melt(id_vars="bin_center_ns", var_name="outcome", value_name="count")
    long_frame["outcome"] = long_frame["outcome"].map(dict(zip(OUTCOME_COLUMNS, (o.label for o in OUTCOMES))))

    plt.figure(figsize=(10, 5))
    sns.lineplot(data=long_frame, x="bin_center_ns", y="count", hue="outcome", drawstyle="steps-mid")
    plt.xlabel("t2 - t1 - reference offset (ns)")
    plt.ylabel("coincidences per bin")
    plot_filename = Path(plot_filename)
    plt.savefig(plot_filename)
    plt.close()
    logger.info("Stored delay spectrum plot in %s", plot_filename.resolve())
    return plot_filename
