"""
Command line front end.

    retrolab predict --model qm --alpha 45 --beta 45 --gamma -45 --degrees
    retrolab simulate --config run.json --seed 7 --out runs/a
    retrolab spectrum --events 1000000 --plot
    retrolab discriminate --events 1000000
    retrolab verify
    retrolab replay runs/a/manifest.json --out runs/b

Reports are printed to stdout as JSON and diagnostics go to stderr. Exit codes: 0 success, 1 failed verification,
2 usage or configuration error.
"""

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

from cli.run_manifest import RunManifest
from experiment.experiment_sim import (
    coincidence_select,
    delay_spectrum,
    discriminate,
    estimate_correlation,
    log_run_metrics,
    plot_delay_spectrum,
    run_experiment,
    write_events_csv,
    write_spectrum_csv,
)
from experiment.experiment_utils import (
    CoincidenceWindow,
    ConfigError,
    ExperimentConfig,
    ModelName,
)
from experiment_logging.base_logging_connector import (
    BaseLoggingConnector,
    NoopLoggingConnector,
)
from interferometer.interferometer_utils import PhaseSettings, Subensemble
from interferometer.kinematics import GEOMETRY_PRESETS
from models.base_model import model_factory
from models.model_utils import correlation_of
from verification.invariant_suite import PHASE_GRID_SEED, run_invariant_suite

logger = logging.getLogger(__name__)

SEED_ENV = "RETROLAB_SEED"
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
DISCRIMINATION_EVENTS = 1_000_000
DEFAULT_OUT = "retrolab_out"


def _add_phase_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--alpha", type=float, default=None, help="Phase of the BS11 long arm")
    parser.add_argument("--beta", type=float, default=None, help="Phase of the BS21 long arm")
    parser.add_argument("--gamma", type=float, default=None, help="Phase of the BS22 long arm")
    parser.add_argument("--degrees", action="store_true", help="Read --alpha/--beta/--gamma as degrees")


def _add_run_arguments(parser: argparse.ArgumentParser, with_model: bool = True):
    parser.add_argument("--config", type=str, default=None, help="JSON file with ExperimentConfig fields")
    if with_model:
        parser.add_argument("--model", choices=[m.value for m in ModelName], default=None, help="Outcome model")
    parser.add_argument("--geometry", choices=list(GEOMETRY_PRESETS), default=None, help="Geometry preset")
    parser.add_argument("--seed", type=int, default=None, help=f"Root seed, overrides ${SEED_ENV} and the config")
    parser.add_argument("--events", type=int, default=None, help="Number of emitted pairs")
    parser.add_argument("--window-center", type=float, default=None, help="Coincidence window center (s)")
    parser.add_argument("--window-width", type=float, default=None, help="Coincidence window half width (s)")
    parser.add_argument("--jitter", type=float, default=None, help="Detector timing jitter sigma (s)")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes for event generation")
    parser.add_argument("--out", type=str, default=DEFAULT_OUT, help="Output directory")
    parser.add_argument("--wandb", action="store_true", help="Log metrics to Weights and Biases")
    _add_phase_arguments(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="retrolab", description="Impact series interferometer toolkit.")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    predict = commands.add_parser("predict", help="Analytic joint table, singles and correlation of a model")
    predict.add_argument("--model", choices=["qm", "causal", "bbb"], default="qm")
    predict.add_argument(
        "--subensemble", choices=[s.value for s in Subensemble], default=Subensemble.LONG.value,
        help="Subensemble to predict for"
    )
    predict.add_argument("--geometry", choices=list(GEOMETRY_PRESETS), default=None,
                         help="Select the causal case from a geometry preset")
    predict.add_argument("--out", type=str, default=DEFAULT_OUT, help="Directory for the run manifest")
    _add_phase_arguments(predict)
    predict.set_defaults(func=cmd_predict)

    simulate = commands.add_parser("simulate", help="Simulate events and estimate the correlation coefficient")
    _add_run_arguments(simulate)
    simulate.set_defaults(func=cmd_simulate)

    spectrum = commands.add_parser("spectrum", help="Simulate events and store the delay spectrum")
    _add_run_arguments(spectrum)
    spectrum.add_argument("--plot", action="store_true", help="Also store delay_spectrum.png")
    spectrum.set_defaults(func=cmd_spectrum)

    discriminate_parser = commands.add_parser("discriminate", help="Run both models at the discrimination point")
    _add_run_arguments(discriminate_parser, with_model=False)
    discriminate_parser.set_defaults(func=cmd_discriminate, default_events=DISCRIMINATION_EVENTS)

    verify = commands.add_parser("verify", help="Run the analytic property suite")
    verify.add_argument("--grid-seed", type=int, default=PHASE_GRID_SEED, help="Seed of the random phase grid")
    verify.add_argument("--grid-size", type=int, default=100, help="Number of random phase triples")
    verify.add_argument("--out", type=str, default=DEFAULT_OUT, help="Directory for the run manifest")
    verify.set_defaults(func=cmd_verify)

    replay = commands.add_parser("replay", help="Re-run a recorded simulate or spectrum run from its manifest")
    replay.add_argument("manifest", type=str, help="Path to a manifest.json")
    replay.add_argument("--out", type=str, default=None, help="Output directory, default <manifest dir>/replay")
    replay.set_defaults(func=cmd_replay)
    return parser


def resolve_seed(cli_seed: int | None, config_seed: int) -> int:
    """--seed, then $RETROLAB_SEED, then the config value."""
    if cli_seed is not None:
        return cli_seed
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            return int(env_seed)
        except ValueError:
            raise ConfigError(SEED_ENV, f"expected an integer, got {env_seed!r}") from None
    return config_seed


def resolve_phases(args: argparse.Namespace, base: PhaseSettings) -> PhaseSettings:
    """Override the given phases with any of --alpha/--beta/--gamma."""
    overrides = {name: getattr(args, name) for name in ("alpha", "beta", "gamma") if getattr(args, name) is not None}
    if not overrides:
        return base
    if args.degrees:
        overrides = {name: math.radians(value) for name, value in overrides.items()}
    return replace(base, **overrides)


def _load_config_file(path: str) -> dict:
    with open(path) as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"{path} is not valid JSON: {e}") from None


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values, overridden by flags, with the seed resolved last."""
    data = _load_config_file(args.config) if args.config else {}
    config = ExperimentConfig.from_dict(data)

    overrides = {}
    if getattr(args, "model", None):
        overrides["model"] = ModelName(args.model)
    if args.geometry:
        overrides["geometry"] = GEOMETRY_PRESETS[args.geometry]()
    if args.events is not None:
        overrides["n_events"] = args.events
    elif getattr(args, "default_events", None) and "n_events" not in data:
        overrides["n_events"] = args.default_events
    if args.jitter is not None:
        overrides["jitter_sigma"] = args.jitter
    if args.workers is not None:
        overrides["max_workers"] = args.workers
    if args.window_center is not None or args.window_width is not None:
        overrides["window"] = CoincidenceWindow(
            center=config.window.center if args.window_center is None else args.window_center,
            half_width=config.window.half_width if args.window_width is None else args.window_width,
        )
    overrides["phases"] = resolve_phases(args, config.phases)
    overrides["seed"] = resolve_seed(args.seed, config.seed)
    config = replace(config, **overrides)
    config.validate()
    return config


def _metric_logger(args: argparse.Namespace) -> BaseLoggingConnector:
    if getattr(args, "wandb", False):
        from experiment_logging.wandb_connector import WandBConnector
        return WandBConnector()
    return NoopLoggingConnector()


def _emit(document: dict):
    print(json.dumps(document, indent=2))


def _write_json(document: dict, path: Path) -> Path:
    with open(path, "w") as f:
        json.dump(document, f, indent=2)
    return path


def cmd_predict(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    phases = resolve_phases(args, PhaseSettings())
    geometry = GEOMETRY_PRESETS[args.geometry]() if args.geometry else None
    model = model_factory(args.model, geometry)
    subensemble = Subensemble(args.subensemble)

    table = model.joint(subensemble, phases)
    if subensemble == Subensemble.LONG:
        singles = [model.singles(side, phases) for side in (1, 2)]
        correlation = float(model.correlation(phases))
    else:
        singles = [table.singles(side) for side in (1, 2)]
        correlation = float(correlation_of(table))

    config = {"model": args.model, "phases": phases.to_dict(), "subensemble": subensemble.value}
    manifest = RunManifest("predict", config, argv=args.argv)
    manifest.finish(started)
    manifest.store(args.out)
    _emit({
        **model.describe(),
        "phases": phases.to_dict(),
        "subensemble": subensemble.value,
        "joint": table.to_dict(),
        "singles": {"side1": list(singles[0]), "side2": list(singles[1])},
        "correlation": correlation,
        "manifest": manifest.to_dict(),
    })
    return EXIT_OK


def simulate_run(config: ExperimentConfig, out_dir: Path, manifest: RunManifest, plot: bool = False,
                 events: bool = True) -> dict:
    """Run one simulation and write its files, returning the report document."""
    out_dir.mkdir(parents=True, exist_ok=True)
    warnings = config.coherence_warnings()
    batch = run_experiment(config)
    spectrum = delay_spectrum(batch, config.bin_width)
    counts = coincidence_select(batch, config.window)
    try:
        estimate = estimate_correlation(counts)
    except ValueError as e:
        logger.warning(str(e))
        warnings.append(str(e))
        estimate = None
    log_run_metrics(config, spectrum, counts, estimate)

    model = model_factory(config.model.value, config.geometry)
    outputs = []
    if events:
        outputs.append(write_events_csv(batch, out_dir / "events.csv"))
    outputs.append(write_spectrum_csv(spectrum, out_dir / "spectrum.csv"))
    if plot:
        outputs.append(plot_delay_spectrum(spectrum, out_dir / "delay_spectrum.png"))
    counts_doc = {**counts.to_dict(), "subensembles": batch.subensemble_counts()}
    estimate_doc = {
        **model.describe(),
        "phases": config.phases.to_dict(),
        "analytic": float(model.correlation(config.phases)),
        "estimate": estimate.to_dict() if estimate else None,
        "warnings": warnings,
    }
    if events:
        outputs.append(_write_json(counts_doc, out_dir / "counts.json"))
        outputs.append(_write_json(estimate_doc, out_dir / "estimate.json"))
    manifest.outputs.extend(str(path) for path in outputs)
    return {
        "counts": counts_doc,
        "estimate": estimate_doc,
        "peaks": [asdict(peak) for peak in spectrum.peaks()],
    }


def _run_with_manifest(args: argparse.Namespace, command: str, plot: bool = False, events: bool = True) -> int:
    started = time.perf_counter()
    config = resolve_config(args)
    config.metric_logger = _metric_logger(args)
    manifest = RunManifest(command, config.to_dict(), seed=config.seed, argv=args.argv)
    config.metric_logger.start(config.to_dict())
    try:
        report = simulate_run(config, Path(args.out), manifest, plot=plot, events=events)
    finally:
        config.metric_logger.finish()
    manifest.finish(started)
    manifest.store(args.out)
    _emit({**report, "manifest": manifest.to_dict()})
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    return _run_with_manifest(args, "simulate")


def cmd_spectrum(args: argparse.Namespace) -> int:
    return _run_with_manifest(args, "spectrum", plot=args.plot, events=False)


def cmd_discriminate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    base = resolve_config(args)
    metric_logger = _metric_logger(args)
    qm_config = replace(base, model=ModelName.QM, metric_logger=metric_logger)
    causal_config = replace(base, model=ModelName.CAUSAL, seed=base.seed + 1, metric_logger=metric_logger)
    metric_logger.start(qm_config.to_dict())
    try:
        report = discriminate(qm_config, causal_config)
    finally:
        metric_logger.finish()
    manifest = RunManifest("discriminate", qm_config.to_dict(), seed=base.seed, argv=args.argv)
    manifest.finish(started)
    manifest.store(args.out)
    _emit({**report.to_dict(), "manifest": manifest.to_dict()})
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    report = run_invariant_suite(args.grid_seed, args.grid_size)
    manifest = RunManifest(
        "verify", {"grid_seed": args.grid_seed, "grid_size": args.grid_size}, seed=args.grid_seed, argv=args.argv
    )
    manifest.finish(started)
    manifest.store(args.out)
    _emit({**report.to_dict(), "manifest": manifest.to_dict()})
    if not report.passed:
        logger.error("Verification failed: %s", ", ".join(result.name for result in report.failures))
        return EXIT_FAILED
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    recorded = RunManifest.load(args.manifest)
    if recorded.command not in ("simulate", "spectrum"):
        raise ConfigError("command", f"only simulate and spectrum runs can be replayed, got {recorded.command!r}")
    config = ExperimentConfig.from_dict(recorded.config)
    config.validate()
    out_dir = Path(args.out) if args.out else Path(args.manifest).parent / "replay"
    manifest = RunManifest(recorded.command, config.to_dict(), seed=config.seed, argv=args.argv)
    report = simulate_run(config, out_dir, manifest, events=recorded.command == "simulate")
    manifest.finish(started)
    manifest.store(out_dir)
    _emit({**report, "replayed": str(args.manifest), "manifest": manifest.to_dict()})
    return EXIT_OK


def setup_logging(verbose: bool):
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    args.argv = list(sys.argv[1:] if argv is None else argv)
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except (ValueError, NotImplementedError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
