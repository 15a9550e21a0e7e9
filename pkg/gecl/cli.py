# gecl/cli.py
"""
Batch experiment runner.

Usage:
    python -m gecl --config configs/polynomial.json --out results/poly --experiment validate
    python -m gecl --config configs/counterexample.json --experiment all --threads 4 --xlsx

Precedence: command-line flags override GECL_* environment settings,
which override the values of the config document.
"""
import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .config import EXPERIMENT_NAMES, AppConfig, ConfigError, load_config
from .domain.experiment import ExperimentResult, ExperimentStatus
from .logging_config import get_logger, log_section, setup_logging
from .services.coefficient_service import CoefficientService
from .services.experiments import ExperimentPipeline
from .services.export_service import ExportService
from .services.interfaces import ExperimentContext
from .settings import Settings, get_settings
from .utils.timing import PhaseTimer

logger = get_logger('cli')

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='gecl',
        description='Numerical lab for the generalised energy conservation law of wave equations',
    )
    parser.add_argument('--config', type=Path, help='JSON experiment configuration (default: built-in defaults)')
    parser.add_argument('--out', type=Path, help='Output directory for CSV/JSON artifacts')
    parser.add_argument('--threads', type=int, help='Worker threads for per-frequency tasks')
    parser.add_argument('--seed', type=int, help='Seed for randomised sampling')
    parser.add_argument(
        '--experiment',
        action='append',
        choices=list(EXPERIMENT_NAMES) + ['all'],
        help='Experiment to run (repeatable); replaces the list in the config',
    )
    parser.add_argument('--xlsx', action='store_true', help='Also write results.xlsx')
    parser.add_argument('--log-level', help='Logging level (default: GECL_LOG_LEVEL or INFO)')
    return parser


def apply_overrides(config: AppConfig, args: argparse.Namespace, settings: Settings) -> AppConfig:
    """
    Layer environment settings and command-line flags over the config document.

    Only settings that were actually provided through the environment
    take part, so their defaults never mask values from the document.
    """
    provided = settings.model_fields_set
    output = config.output
    if 'threads' in provided:
        config = replace(config, threads=settings.threads)
    if 'seed' in provided:
        config = replace(config, seed=settings.seed)
    if 'output_dir' in provided:
        output = replace(output, directory=settings.output_dir)

    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        config = replace(config, threads=args.threads)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.out is not None:
        output = replace(output, directory=str(args.out))
    if args.xlsx:
        output = replace(output, xlsx=True)
    if args.experiment:
        config = replace(config, experiments=list(args.experiment))
    return replace(config, output=output)


def _log_verdicts(results: Dict[str, ExperimentResult]) -> None:
    log_section(logger, "VERDICTS")
    if not results:
        logger.info("  (no experiments requested)")
    for name, result in results.items():
        logger.info(f"  {name:<15} {result.status.value.upper()}")
        for report in result.reports:
            logger.info(f"      {report.name:<24} {report.status.value}")
        if result.message:
            logger.info(f"      {result.message}")


def run(config: AppConfig, pipeline: Optional[ExperimentPipeline] = None) -> int:
    """
    Execute the configured experiments and write their artifacts.

    Writes ``<experiment>.csv`` for every executed experiment, ``summary.json``
    and, when enabled, ``results.xlsx`` to ``config.output.directory``.

    Args:
        config: Validated experiment configuration
        pipeline: Strategy pipeline (default: all standard strategies)

    Returns:
        0 when every experiment executed (failed verdicts included), 1 otherwise
    """
    out_dir = Path(config.output.directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    exporter = ExportService(config)
    pipeline = pipeline or ExperimentPipeline.create_default()
    names: List[str] = config.experiment_list()
    timer = PhaseTimer("gecl run")

    try:
        coefficient = CoefficientService(config).build()
    except Exception as e:
        logger.error(f"❌ cannot build the coefficient: {type(e).__name__}: {e}")
        results = {name: ExperimentResult.error(name, e) for name in names}
        exporter.write_summary(out_dir, exporter.build_summary(results, timing=timer.finish()))
        return EXIT_ERROR
    timer.checkpoint("coefficient")

    def write(result: ExperimentResult) -> None:
        if result.executed:
            exporter.write_experiment(out_dir, result)
        timer.checkpoint(result.name)

    context = ExperimentContext(config=config, coefficient=coefficient)
    results = pipeline.run(context, names, on_result=write)

    if config.output.xlsx and results:
        exporter.write_workbook(out_dir, results)
    timing = timer.finish()
    exporter.write_summary(out_dir, exporter.build_summary(results, coefficient, timing))
    _log_verdicts(results)

    if any(r.status == ExperimentStatus.ERROR for r in results.values()):
        return EXIT_ERROR
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(level=args.log_level or settings.log_level, log_file=settings.log_file)

    try:
        config = apply_overrides(load_config(args.config), args, settings)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_CONFIG

    logger.info(f"📍 experiments: {', '.join(config.experiment_list()) or '(none)'} → {config.output.directory}")
    try:
        return run(config)
    except OSError as e:
        logger.error(f"❌ cannot write artifacts: {e}")
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
