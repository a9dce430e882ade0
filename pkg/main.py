# -*- coding: utf-8 -*-
"""
Main Orchestration Script for the Hashtag Epidemic Pipeline
Subcommands for ingesting event dumps, fitting SIR/SIRI models per hashtag,
reporting corpus-level summaries, generating synthetic corpora and replaying
event files.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from analysis import (
    CorpusSummary,
    compare_locations,
    infectious_fraction,
    load_summaries,
    r_histogram,
    scatter_table,
    split_by_model,
)
from config import ALL_LOCATIONS
from config_loader import PipelineConfig, load_pipeline_config
from dynamics import ParamVector
from ingest import group_by_hashtag, merge_records, read_events, replay, write_ndjson
from pipeline import FitEngine
from reporter import HashtagReporter
from synth import SynthScenario, generate_events, mixture_scenarios, parse_mixture, to_records, truth_frame
from validators import ConfigValidationError, EmptyInput, PipelineError

logger = logging.getLogger("hashtag_pipeline")

EXIT_OK = 0
EXIT_NO_RESULTS = 1
EXIT_INPUT_ERROR = 2


def setup_logging(verbose: bool = False) -> None:
    """Progress goes to standard error; data goes to files or standard output."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
    )


def banner(title: str) -> None:
    logger.info("=" * 80)
    logger.info(title)
    logger.info("=" * 80)


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Merge defaults, the optional config file and command-line flags."""
    overrides = {
        "window": args.window,
        "step": args.step,
        "fraction": args.fraction,
        "models": args.models,
        "samples": args.samples,
        "burn_in": args.burn_in,
        "walkers": args.walkers,
        "seed": args.seed,
        "jobs": args.jobs,
        "out_dir": args.out_dir,
        "threshold": getattr(args, "threshold", None),
        "bins": getattr(args, "bins", None),
        "log_scale": True if getattr(args, "log_scale", False) else None,
    }
    return load_pipeline_config(args.config, overrides)


# =============================================================================
# SUBCOMMANDS
# =============================================================================
def cmd_ingest(args: argparse.Namespace) -> int:
    """Merge event files into one normalized NDJSON file."""
    config = resolve_config(args)
    formats = args.format or []
    if len(formats) not in (0, 1, len(args.inputs)):
        raise ConfigValidationError("--format must be given once, or once per input file")

    banner("HASHTAG EPIDEMIC PIPELINE - INGEST")
    logger.info("\n[STEP 1] Reading %d input file(s)...", len(args.inputs))
    batches = []
    malformed = 0
    for index, path in enumerate(args.inputs):
        fmt = formats[index] if len(formats) > 1 else (formats[0] if formats else None)
        records, bad = read_events(path, fmt)
        batches.append(records)
        malformed += bad
        logger.info("  ✓ %s: %d records, %d malformed", path, len(records), bad)

    logger.info("\n[STEP 2] Merging and writing normalized events...")
    merged = merge_records(batches)
    output = Path(args.output) if args.output else config.out_dir / "events.ndjson"
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", encoding="utf-8", newline="\n") as handle:
        write_ndjson(merged, handle)
    logger.info("  ✓ Wrote %s", output)

    n_hashtags = len({record.hashtag for record in merged})
    print(f"records={len(merged)} hashtags={n_hashtags} malformed={malformed}")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    """Fit the configured models to every (hashtag, location) of an events file."""
    config = resolve_config(args)
    banner("HASHTAG EPIDEMIC PIPELINE - FIT")

    logger.info("\n[STEP 1] Loading events from %s...", args.events)
    records, malformed = read_events(args.events, args.format[0] if args.format else None)
    series_list = group_by_hashtag(records)
    logger.info("  ✓ %d records, %d series, %d malformed", len(records), len(series_list), malformed)

    logger.info("\n[STEP 2] Fitting models: %s", ", ".join(spec.kind for spec in config.models))
    engine = FitEngine(config)
    outcomes = engine.run(series_list)

    logger.info("\n[STEP 3] Writing results to %s...", config.out_dir)
    written = engine.write_outputs(config.out_dir, chains=args.chains, traces=args.traces)
    n_fitted = sum(outcome.succeeded for outcome in outcomes)
    logger.info("  ✓ %d fitted, %d skipped", n_fitted, len(outcomes) - n_fitted)
    logger.info("  ✓ Summary: %s", written["summary"])
    logger.info("  ✓ Skip report: %s", written["skipped"])

    if n_fitted == 0:
        logger.error("✗ No fit succeeded")
        return EXIT_NO_RESULTS
    return EXIT_OK


def _report_model(summary: CorpusSummary, config: PipelineConfig, compare: Optional[List[str]]) -> None:
    kind = summary.model.kind
    out_dir = config.out_dir

    HashtagReporter.write_csv(scatter_table(summary), out_dir / f"scatter_{kind}.csv")
    HashtagReporter.write_csv(
        r_histogram(summary, config.bins, config.log_scale), out_dir / f"rhist_{kind}_{ALL_LOCATIONS}.csv"
    )

    locations = summary.by_location()
    for location, part in locations.items():
        if location:
            HashtagReporter.write_csv(
                r_histogram(part, config.bins, config.log_scale), out_dir / f"rhist_{kind}_{location}.csv"
            )

    if compare:
        first, second = (label.strip().casefold() for label in compare)
        missing = [label for label in (first, second) if label not in locations]
        if missing:
            logger.warning("  ✗ %s: no rows for location(s) %s, comparison skipped", kind, missing)
        else:
            comparison = compare_locations(locations[first], locations[second], first, second)
            HashtagReporter.write_csv(comparison.to_frame(), out_dir / f"compare_{first}_{second}.csv")
            logger.info("  ✓ %s: U=%.1f z=%.3f", kind, comparison.u_statistic, comparison.z_score)

    report = HashtagReporter.generate_text_report(summary, config.threshold)
    (out_dir / f"report_{kind}.txt").write_text(report + "\n", encoding="utf-8")

    fraction = infectious_fraction(summary, config.threshold)
    print(f"{kind} infectious_fraction(R>{config.threshold:g})={fraction:.4f}")


def cmd_report(args: argparse.Namespace) -> int:
    """Corpus tables from one or more summary CSVs."""
    config = resolve_config(args)
    banner("HASHTAG EPIDEMIC PIPELINE - REPORT")

    logger.info("\n[STEP 1] Loading summaries...")
    try:
        frame = load_summaries(args.summaries)
    except EmptyInput as exc:
        logger.error("✗ %s", exc)
        return EXIT_NO_RESULTS
    logger.info("  ✓ %d summary rows", len(frame))

    logger.info("\n[STEP 2] Writing corpus tables to %s...", config.out_dir)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    for kind, summary in split_by_model(frame).items():
        _report_model(summary, config, args.compare)
        logger.info("  ✓ %s: %d hashtags", kind, len(summary))
    return EXIT_OK


def _base_scenario(args: argparse.Namespace, config: PipelineConfig) -> SynthScenario:
    truth = ParamVector(beta=args.beta, decay=args.decay, s0=args.s0, i0=args.i0, sigma=args.sigma)
    return SynthScenario(
        spec=config.models[0],
        truth=truth,
        duration=args.duration,
        seed=config.fit.seed,
        emission=args.emission,
        hashtag=args.hashtag,
        location=args.location,
        window=config.window,
    )


def cmd_synth(args: argparse.Namespace) -> int:
    """Generate a synthetic events file and its ground-truth table."""
    config = resolve_config(args)
    banner("HASHTAG EPIDEMIC PIPELINE - SYNTH")

    logger.info("\n[STEP 1] Building scenarios...")
    mixture = args.mixture or config.mixture
    if mixture:
        groups = parse_mixture(mixture if isinstance(mixture, str) else ",".join(map(str, mixture)))
        scenarios = mixture_scenarios(groups, _base_scenario(args, config), config.fit.seed)
    elif config.scenarios:
        scenarios = [SynthScenario.from_dict(raw) for raw in config.scenarios]
    else:
        scenarios = [_base_scenario(args, config)]
    logger.info("  ✓ %d scenario(s)", len(scenarios))

    logger.info("\n[STEP 2] Generating events...")
    origin = pd.Timestamp(args.origin)
    records = []
    for scenario in scenarios:
        series = generate_events(scenario, args.generation_step or config.step)
        records.append(to_records(series, origin))
        logger.debug("  %s: %d events, true R=%.4f", scenario.hashtag, len(series), scenario.truth_r)

    out_dir = config.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    events_path = Path(args.output) if args.output else out_dir / "events.ndjson"
    events_path.parent.mkdir(parents=True, exist_ok=True)
    with open(events_path, "w", encoding="utf-8", newline="\n") as handle:
        n_events = write_ndjson(merge_records(records), handle)
    truth_path = HashtagReporter.write_csv(truth_frame(scenarios), events_path.parent / "truth.csv")

    logger.info("  ✓ Wrote %d events to %s", n_events, events_path)
    logger.info("  ✓ Wrote ground truth to %s", truth_path)
    print(f"scenarios={len(scenarios)} events={n_events}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    """Stream an events file to standard output at a chosen speed."""
    records, _ = read_events(args.events, args.format[0] if args.format else None)
    speedup = None if args.speedup is None or math.isinf(args.speedup) else args.speedup
    delivered = replay(records, speedup, lambda record: write_ndjson([record], sys.stdout))
    sys.stdout.flush()
    logger.info("  ✓ Replayed %d records", delivered)
    return EXIT_OK


# =============================================================================
# ARGUMENT PARSING
# =============================================================================
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="YAML/JSON configuration file")
    common.add_argument("--out-dir", type=str, default=None, help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="Run seed")
    common.add_argument("--verbose", action="store_true", help="Debug-level progress output")

    fitting = argparse.ArgumentParser(add_help=False)
    fitting.add_argument("--window", type=float, default=None, help="Smoothing window in hours")
    fitting.add_argument("--step", type=float, default=None, help="Smoothing grid step in hours")
    fitting.add_argument("--fraction", type=float, default=None, help="Occurrence threshold as a share of the peak")
    fitting.add_argument("--models", type=str, default=None, help="Comma-separated model kinds (sir,siri)")
    fitting.add_argument("--samples", type=int, default=None, help="Total walker-samples per fit")
    fitting.add_argument("--burn-in", type=float, default=None, help="Share of sweeps discarded as burn-in")
    fitting.add_argument("--walkers", type=int, default=None, help="Ensemble size (even)")
    fitting.add_argument("--jobs", type=int, default=None, help="Parallel fits")

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--format", action="append", choices=["ndjson", "csv"], default=None,
                        help="Input format (repeat once per input file to set each)")

    parser = argparse.ArgumentParser(
        description="Hashtag Epidemic Pipeline",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Normalize and merge raw dumps
  python main.py ingest dump1.csv dump2.ndjson --out-dir work

  # Fit SIR and SIRI to every hashtag
  python main.py fit work/events.ndjson --models sir,siri --seed 7 --jobs 4

  # Corpus tables and the infectious share
  python main.py report work/summary.csv --threshold 5 --compare nyc sf

  # Synthetic 80/20 corpus
  python main.py synth --mixture 80:1.05:1.5,20:5:20 --out-dir synthetic
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", parents=[common, fitting, inputs], help="Merge and normalize event files")
    p_ingest.add_argument("inputs", nargs="+", help="Event files (.ndjson/.jsonl/.json/.csv)")
    p_ingest.add_argument("--output", type=str, default=None, help="Output NDJSON path")
    p_ingest.set_defaults(handler=cmd_ingest)

    p_fit = sub.add_parser("fit", parents=[common, fitting, inputs], help="Fit models per hashtag")
    p_fit.add_argument("events", help="Events file")
    p_fit.add_argument("--chains", action="store_true", help="Write full chains")
    p_fit.add_argument("--traces", action="store_true", help="Write occurrence, best-fit trace and window-sweep tables")
    p_fit.set_defaults(handler=cmd_fit)

    p_report = sub.add_parser("report", parents=[common, fitting], help="Corpus-level tables")
    p_report.add_argument("summaries", nargs="+", help="Summary CSV files")
    p_report.add_argument("--threshold", type=float, default=None, help="R cutoff for the infectious share")
    p_report.add_argument("--bins", type=int, default=None, help="Histogram bins")
    p_report.add_argument("--log-scale", action="store_true", help="Geometric histogram bins")
    p_report.add_argument("--compare", nargs=2, metavar=("A", "B"), default=None, help="Compare two locations")
    p_report.set_defaults(handler=cmd_report)

    p_synth = sub.add_parser("synth", parents=[common, fitting], help="Generate a synthetic corpus")
    p_synth.add_argument("--mixture", type=str, default=None, help="Groups count:r_lo:r_hi,...")
    p_synth.add_argument("--beta", type=float, default=0.6, help="Infection rate (1/h)")
    p_synth.add_argument("--decay", type=float, default=0.2, help="Recovery or feedback rate (1/h)")
    p_synth.add_argument("--s0", type=float, default=5000.0, help="Initial susceptible")
    p_synth.add_argument("--i0", type=float, default=10.0, help="Initial infected")
    p_synth.add_argument("--sigma", type=float, default=20.0, help="Gaussian emission noise")
    p_synth.add_argument("--duration", type=float, default=48.0, help="Scenario length in hours")
    p_synth.add_argument("--emission", choices=["poisson_counts", "gaussian_counts"], default="poisson_counts")
    p_synth.add_argument("--generation-step", type=float, default=None, help="Generation cell width in hours")
    p_synth.add_argument("--hashtag", type=str, default="synthetic", help="Hashtag (prefix for mixtures)")
    p_synth.add_argument("--location", type=str, default=None, help="Location label")
    p_synth.add_argument("--origin", type=str, default="2024-01-01T00:00:00Z", help="Timestamp of t=0")
    p_synth.add_argument("--output", type=str, default=None, help="Output NDJSON path")
    p_synth.set_defaults(handler=cmd_synth)

    p_replay = sub.add_parser("replay", parents=[common, fitting, inputs], help="Replay events to stdout")
    p_replay.add_argument("events", help="Events file")
    p_replay.add_argument("--speedup", type=float, default=None, help="Time compression (omit for immediate)")
    p_replay.set_defaults(handler=cmd_replay)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point with argument parsing.

    Returns:
        int: 0 success, 1 no usable results, 2 input error
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    try:
        return args.handler(args)
    except (PipelineError, FileNotFoundError, OSError, ValueError) as e:
        logger.error("\n✗ Error: %s", e)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
